"""
Relation (Gram) matrices of prediction batches, plus the warm-up fixtures
used by the golden checks.
"""

from dataclasses import dataclass

import numpy as np

from errors import ContractError
from spectral import SymMatrix

ROW_SUM_TOL = 1e-8
GRAM_TOL = 1e-10


@dataclass(frozen=True)
class PredictionBatch:
    """b x k matrix whose rows are probability vectors."""

    rows: np.ndarray

    def __post_init__(self):
        arr = np.array(self.rows, dtype=float)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ContractError(f"expected a non-empty b x k matrix, got shape {arr.shape}")
        if np.any(arr < 0):
            raise ContractError("prediction rows must be nonnegative")
        sums = arr.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL):
            worst = sums[np.argmax(np.abs(sums - 1.0))]
            raise ContractError(f"prediction row sums to {worst!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "rows", arr)

    @property
    def b(self) -> int:
        return self.rows.shape[0]

    @property
    def k(self) -> int:
        return self.rows.shape[1]

    @classmethod
    def one_hot(cls, labels, k: int) -> "PredictionBatch":
        labels = np.asarray(labels, dtype=int).reshape(-1)
        rows = np.zeros((labels.size, k))
        rows[np.arange(labels.size), labels] = 1.0
        return cls(rows)

    def classes(self) -> np.ndarray:
        return self.rows.argmax(axis=1)

    def is_one_hot(self) -> bool:
        return bool(np.all((self.rows == 0) | (self.rows == 1)))

    def subset(self, mask) -> "PredictionBatch":
        return PredictionBatch(self.rows[np.asarray(mask, dtype=bool)])


def relation(a: PredictionBatch) -> SymMatrix:
    """R(A) = A A^T."""
    return SymMatrix(a.rows @ a.rows.T)


def relation_normalized(a: PredictionBatch) -> SymMatrix:
    """(1/b) A A^T; unit trace exactly when every row is one-hot."""
    return SymMatrix(a.rows @ a.rows.T / a.b)


def check_one_hot_equality(z1: PredictionBatch, z2: PredictionBatch) -> bool:
    """Whether Z1 Z1^T == Z2 Z2^T for a one-hot Z1."""
    if not z1.is_one_hot():
        raise ContractError("z1 must be one-hot")
    if z1.rows.shape[0] != z2.rows.shape[0]:
        raise ContractError(f"batch size mismatch: {z1.b} vs {z2.b}")
    gap = np.max(np.abs(relation(z1).data - relation(z2).data))
    return bool(gap <= GRAM_TOL)


# Warm-up batch: three samples of class 0 and one of class 2.
WARMUP_WEAK = np.array([
    [1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
])

WARMUP_WEAK_RELATION = np.array([
    [1.0, 0.0, 1.0, 1.0],
    [0.0, 1.0, 0.0, 0.0],
    [1.0, 0.0, 1.0, 1.0],
    [1.0, 0.0, 1.0, 1.0],
])

# Strong-view predictions that always confuse class 0 with class 1.
WARMUP_STRONG_SYSTEMATIC = np.array([
    [0.5, 0.5, 0.0],
    [0.0, 0.0, 1.0],
    [0.5, 0.5, 0.0],
    [0.5, 0.5, 0.0],
])

WARMUP_STRONG_SYSTEMATIC_RELATION = np.array([
    [0.5, 0.0, 0.5, 0.5],
    [0.0, 1.0, 0.0, 0.0],
    [0.5, 0.0, 0.5, 0.5],
    [0.5, 0.0, 0.5, 0.5],
])

# Strong-view predictions with scattered mistakes.
WARMUP_STRONG_SCATTERED = np.array([
    [0.5, 0.5, 0.0],
    [0.0, 0.0, 1.0],
    [0.5, 0.25, 0.25],
    [0.5, 0.0, 0.5],
])

WARMUP_STRONG_SCATTERED_RELATION = np.array([
    [0.5, 0.0, 0.375, 0.25],
    [0.0, 1.0, 0.25, 0.5],
    [0.375, 0.25, 0.375, 0.375],
    [0.25, 0.5, 0.375, 0.5],
])

GOLDENS = {
    "warmup_weak": (WARMUP_WEAK, WARMUP_WEAK_RELATION),
    "warmup_strong_systematic": (WARMUP_STRONG_SYSTEMATIC, WARMUP_STRONG_SYSTEMATIC_RELATION),
    "warmup_strong_scattered": (WARMUP_STRONG_SCATTERED, WARMUP_STRONG_SCATTERED_RELATION),
}
