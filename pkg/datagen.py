"""
Synthetic classification data with ground truth for semi-supervised runs.
"""

import csv
import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from errors import SpecError

CENTER_STREAM = 1


class DataKind(enum.Enum):
    GAUSSIAN_BLOBS = "blobs"
    TWO_MOONS = "moons"
    CONCENTRIC_RINGS = "rings"


@dataclass(frozen=True)
class SyntheticSpec:
    kind: DataKind = DataKind.GAUSSIAN_BLOBS
    k: int = 3
    d: int = 16
    n_labeled: int = 12
    n_unlabeled: int = 2000
    n_test: int = 600
    class_separation: float = 6.0
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.kind, DataKind):
            try:
                object.__setattr__(self, "kind", DataKind(self.kind))
            except ValueError:
                raise SpecError(f"unknown dataset kind {self.kind!r}") from None
        if min(self.k, self.d, self.n_labeled, self.n_unlabeled, self.n_test) <= 0:
            raise SpecError("class count, dimension and all split sizes must be positive")
        if self.n_labeled < self.k:
            raise SpecError(f"need at least one labeled sample per class ({self.n_labeled} < {self.k})")
        if self.kind is DataKind.TWO_MOONS and self.k != 2:
            raise SpecError(f"two moons has exactly 2 classes, got k={self.k}")
        if self.kind is DataKind.GAUSSIAN_BLOBS and self.k > self.d:
            raise SpecError(f"blobs need k orthogonal centre directions, need k <= d ({self.k} > {self.d})")
        if self.kind is not DataKind.GAUSSIAN_BLOBS and self.d < 2:
            raise SpecError("moons and rings need d >= 2")
        if self.class_separation <= 0:
            raise SpecError("class_separation must be positive")


@dataclass(frozen=True)
class LabeledSplit:
    x: np.ndarray
    y: np.ndarray

    def __len__(self):
        return self.x.shape[0]


@dataclass(frozen=True)
class TrainingView:
    """What the training loop may see: labels for the labeled split only."""

    labeled: LabeledSplit
    unlabeled_x: np.ndarray
    test: LabeledSplit
    k: int


@dataclass(frozen=True)
class Dataset:
    labeled: LabeledSplit
    unlabeled: LabeledSplit
    test: LabeledSplit
    k: int
    centers: Optional[np.ndarray] = None

    def training_view(self) -> TrainingView:
        return TrainingView(self.labeled, self.unlabeled.x, self.test, self.k)

    @property
    def hidden_unlabeled_labels(self) -> np.ndarray:
        return self.unlabeled.y


def _balanced_labels(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    return rng.permutation(np.arange(n) % k)


def _blob_centers(spec: SyntheticSpec) -> np.ndarray:
    # orthonormal directions spread over all d axes; every pair is exactly class_separation apart
    rng = np.random.default_rng([spec.seed, CENTER_STREAM])
    basis, _ = np.linalg.qr(rng.standard_normal((spec.d, spec.k)))
    return basis.T * (spec.class_separation / np.sqrt(2.0))


def _sample(spec: SyntheticSpec, y: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = y.size
    if spec.kind is DataKind.GAUSSIAN_BLOBS:
        base = _blob_centers(spec)[y]
    else:
        t = rng.uniform(0.0, np.pi, size=n)
        if spec.kind is DataKind.TWO_MOONS:
            plane = np.where(
                (y == 0)[:, None],
                np.stack([np.cos(t), np.sin(t)], axis=1),
                np.stack([1.0 - np.cos(t), 0.5 - np.sin(t)], axis=1),
            )
        else:
            angle = 2.0 * t
            plane = (y + 1)[:, None] * np.stack([np.cos(angle), np.sin(angle)], axis=1)
        base = np.zeros((n, spec.d))
        base[:, :2] = plane * spec.class_separation
    return base + rng.standard_normal((n, spec.d))


def generate(spec: SyntheticSpec) -> Dataset:
    """Deterministic for a fixed spec; labeled split is class-balanced."""
    rng = np.random.default_rng(spec.seed)

    counts = np.full(spec.k, spec.n_labeled // spec.k)
    counts[: spec.n_labeled % spec.k] += 1
    labeled_y = np.repeat(np.arange(spec.k), counts)
    unlabeled_y = _balanced_labels(spec.n_unlabeled, spec.k, rng)
    test_y = _balanced_labels(spec.n_test, spec.k, rng)

    labeled = LabeledSplit(_sample(spec, labeled_y, rng), labeled_y)
    unlabeled = LabeledSplit(_sample(spec, unlabeled_y, rng), unlabeled_y)
    test = LabeledSplit(_sample(spec, test_y, rng), test_y)
    centers = _blob_centers(spec) if spec.kind is DataKind.GAUSSIAN_BLOBS else None
    return Dataset(labeled, unlabeled, test, spec.k, centers)


def nearest_centroid_accuracy(dataset: Dataset) -> float:
    """Test accuracy of assigning each point to the closest true blob centre."""
    if dataset.centers is None:
        raise SpecError("nearest-centroid oracle needs blob centres")
    dist = np.linalg.norm(dataset.test.x[:, None, :] - dataset.centers[None, :, :], axis=2)
    return float(np.mean(dist.argmin(axis=1) == dataset.test.y))


SPLITS = ("labeled", "unlabeled", "test")


def export_csv(dataset: Dataset, path: str) -> None:
    """One row per sample: split, label, whether the label is visible to training, features."""
    d = dataset.labeled.x.shape[1]
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["split", "label", "visible"] + [f"f{i}" for i in range(d)])
        for name in SPLITS:
            split = getattr(dataset, name)
            visible = 0 if name == "unlabeled" else 1
            for x, y in zip(split.x, split.y):
                writer.writerow([name, int(y), visible] + [repr(float(v)) for v in x])


def import_csv(path: str, k: Optional[int] = None) -> Dataset:
    rows = {name: ([], []) for name in SPLITS}
    with open(path, "r", newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        if header[:3] != ["split", "label", "visible"]:
            raise SpecError(f"{path} is not a dataset export")
        for record in reader:
            if record[0] not in rows:
                raise SpecError(f"unknown split {record[0]!r} in {path}")
            xs, ys = rows[record[0]]
            ys.append(int(record[1]))
            xs.append([float(v) for v in record[3:]])

    d = len(header) - 3
    splits = {
        name: LabeledSplit(np.array(xs, dtype=float).reshape(-1, d), np.array(ys, dtype=int))
        for name, (xs, ys) in rows.items()
    }
    if k is None:
        k = int(max(split.y.max() for split in splits.values() if len(split))) + 1
    return Dataset(splits["labeled"], splits["unlabeled"], splits["test"], k)
