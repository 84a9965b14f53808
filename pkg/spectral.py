"""
Dense symmetric linear algebra: eigendecomposition by Jacobi rotations,
matrix exponential, and the principal / Taylor / element-wise logarithms.
"""

from dataclasses import dataclass
from typing import Callable, Iterator, List, Tuple, Union

import numpy as np

from errors import ContractError, ConvergenceError, PositiveDefinitenessError

# Eigenvalues at or below this violate the principal-log precondition.
EPS_PD = 1e-12

JACOBI_MAX_SWEEPS = 100
JACOBI_TOL = 1e-12

# Eigenvalues closer than this (relative to the spectral scale) are ties.
TIE_TOL = 1e-12
SIGN_TOL = 1e-12

ArrayLike = Union[np.ndarray, List[List[float]], "SymMatrix"]


@dataclass(frozen=True)
class SymMatrix:
    """Real symmetric matrix. The constructor symmetrizes via (M + M^T) / 2."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data.data if isinstance(self.data, SymMatrix) else self.data, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ContractError(f"expected a non-empty square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ContractError("matrix has non-finite entries")
        arr = (arr + arr.T) / 2.0
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "SymMatrix":
        return cls(np.eye(dim))

    @classmethod
    def zeros(cls, dim: int) -> "SymMatrix":
        return cls(np.zeros((dim, dim)))

    @classmethod
    def diag(cls, values) -> "SymMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        return add(self, other)

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        return add(self, scale(other, -1.0))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order; column i of eigenvectors pairs with eigenvalue i."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> SymMatrix:
        return SymMatrix((self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T)


def trace(m: SymMatrix) -> float:
    return float(np.trace(m.data))


def frobenius(m: SymMatrix) -> float:
    return float(np.linalg.norm(m.data, "fro"))


def matmul(a: SymMatrix, b: SymMatrix) -> np.ndarray:
    """Plain product; the result is not symmetric in general, so it stays an array."""
    return a.data @ b.data


def add(a: SymMatrix, b: SymMatrix) -> SymMatrix:
    if a.dim != b.dim:
        raise ContractError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return SymMatrix(a.data + b.data)


def scale(m: SymMatrix, factor: float) -> SymMatrix:
    return SymMatrix(m.data * factor)


def _round_robin(n: int) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Yield n-1 (or n) rounds of disjoint (p, q) index pairs covering every pair once."""
    players = n + (n % 2)
    others = list(range(1, players))
    for _ in range(players - 1):
        order = [0] + others
        pairs = []
        for i in range(players // 2):
            p, q = sorted((order[i], order[players - 1 - i]))
            if q < n:
                pairs.append((p, q))
        ps, qs = zip(*pairs)
        yield np.array(ps), np.array(qs)
        others = others[-1:] + others[:-1]


def _off_diagonal_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _canonical_order(values: np.ndarray, vectors: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # first component above SIGN_TOL is made positive
    for j in range(vectors.shape[1]):
        column = vectors[:, j]
        nonzero = np.flatnonzero(np.abs(column) > SIGN_TOL)
        if nonzero.size and column[nonzero[0]] < 0:
            vectors[:, j] = -column

    order = np.argsort(-values, kind="stable")
    values, vectors = values[order], vectors[:, order]

    tol = TIE_TOL * max(1.0, float(np.max(np.abs(values))))
    start = 0
    while start < len(values):
        stop = start + 1
        while stop < len(values) and values[start] - values[stop] <= tol:
            stop += 1
        if stop - start > 1:
            group = list(range(start, stop))
            group.sort(key=lambda j: tuple(np.round(-vectors[:, j], 12)))
            vectors[:, start:stop] = vectors[:, group]
        start = stop
    return values, vectors


def eig_sym(m: SymMatrix) -> Spectrum:
    """Cyclic Jacobi eigendecomposition, rotations applied in round-robin order.

    Each round rotates a set of disjoint (p, q) planes at once, so a sweep is
    n - 1 dense products instead of n(n-1)/2 single rotations.
    """
    a = np.array(m.data)
    n = a.shape[0]
    v = np.eye(n)
    target = JACOBI_TOL * frobenius(m)

    for _ in range(JACOBI_MAX_SWEEPS):
        if _off_diagonal_norm(a) <= target:
            break
        for ps, qs in _round_robin(n):
            apq = a[ps, qs]
            active = apq != 0.0
            if not np.any(active):
                continue
            t = np.zeros_like(apq)
            theta = (a[qs, qs][active] - a[ps, ps][active]) / (2.0 * apq[active])
            sign = np.where(theta >= 0.0, 1.0, -1.0)
            t[active] = sign / (np.abs(theta) + np.hypot(theta, 1.0))
            c = 1.0 / np.hypot(t, 1.0)
            s = t * c

            rot = np.eye(n)
            rot[ps, ps] = c
            rot[qs, qs] = c
            rot[ps, qs] = s
            rot[qs, ps] = -s

            a = rot.T @ a @ rot
            a = (a + a.T) / 2.0
            a[ps, qs] = 0.0
            a[qs, ps] = 0.0
            v = v @ rot
    else:
        residual = _off_diagonal_norm(a)
        if residual > target:
            raise ConvergenceError(
                f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps", residual
            )

    values, vectors = _canonical_order(np.diag(a).copy(), v)
    values.setflags(write=False)
    vectors.setflags(write=False)
    return Spectrum(values, vectors)


def apply_spectral(m: SymMatrix, fn: Callable[[np.ndarray], np.ndarray]) -> SymMatrix:
    """U diag(fn(lambda)) U^T."""
    spectrum = eig_sym(m)
    u = spectrum.eigenvectors
    return SymMatrix((u * fn(spectrum.eigenvalues)) @ u.T)


def _require_positive(spectrum: Spectrum) -> None:
    smallest = float(spectrum.eigenvalues[-1])
    if smallest <= EPS_PD:
        raise PositiveDefinitenessError(smallest, EPS_PD)


def log_principal(m: SymMatrix) -> SymMatrix:
    spectrum = eig_sym(m)
    _require_positive(spectrum)
    u = spectrum.eigenvectors
    return SymMatrix((u * np.log(spectrum.eigenvalues)) @ u.T)


def exp_sym(m: SymMatrix) -> SymMatrix:
    return apply_spectral(m, np.exp)


def log_taylor(m: SymMatrix, order: int) -> SymMatrix:
    """Truncated series sum_{k=1..order} (-1)^(k+1) (m - I)^k / k.

    No radius check: outside ||m - I|| < 1 this is a surrogate, not a logarithm.
    """
    if int(order) != order or order < 1:
        raise ContractError(f"Taylor order must be a positive integer, got {order}")
    order = int(order)
    x = m.data - np.eye(m.dim)
    identity = np.eye(m.dim)
    acc = identity * ((-1.0) ** (order + 1) / order)
    for k in range(order - 1, 0, -1):
        acc = identity * ((-1.0) ** (k + 1) / k) + x @ acc
    return SymMatrix(x @ acc)


def log_elementwise(m: SymMatrix, eps: float) -> SymMatrix:
    if eps <= 0:
        raise ContractError(f"eps must be positive, got {eps}")
    return SymMatrix(np.log(np.maximum(m.data, eps)))


def logdet(m: SymMatrix) -> float:
    spectrum = eig_sym(m)
    _require_positive(spectrum)
    return float(np.sum(np.log(spectrum.eigenvalues)))


def taylor_radius(m: SymMatrix) -> float:
    """Spectral norm of m - I; the Taylor series converges when this is below 1."""
    spectrum = eig_sym(m)
    return float(np.max(np.abs(spectrum.eigenvalues - 1.0)))
