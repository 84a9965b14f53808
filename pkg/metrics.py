"""
Training metrics: per-interval records, pseudo-label accuracy against the
hidden unlabeled labels, CSV and JSON summaries.
"""

import csv
import json
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

CSV_COLUMNS = ("step", "lr", "ce_sup", "ce_unsup", "mce", "pl_rate", "pl_acc", "test_acc")


@dataclass(frozen=True)
class MetricsRecord:
    step: int
    lr: float
    ce_sup: float
    ce_unsup: float
    mce: float
    pl_rate: float
    pl_acc: float
    test_acc: float


@dataclass
class MetricsLog:
    records: List[MetricsRecord] = field(default_factory=list)

    def append(self, record: MetricsRecord) -> None:
        self.records.append(record)

    @property
    def final_test_acc(self) -> float:
        return self.records[-1].test_acc if self.records else float("nan")

    @property
    def best(self) -> Optional[MetricsRecord]:
        if not self.records:
            return None
        return max(self.records, key=lambda r: (r.test_acc, -r.step))

    def write_csv(self, path: str) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(CSV_COLUMNS)
            for record in self.records:
                row = asdict(record)
                writer.writerow([row["step"]] + [repr(float(row[c])) for c in CSV_COLUMNS[1:]])

    def summary(self, seed: int, config: Dict[str, Any]) -> Dict[str, Any]:
        best = self.best
        return {
            "final_test_acc": self.final_test_acc,
            "best_test_acc": best.test_acc if best else None,
            "best_step": best.step if best else None,
            "seed": seed,
            "config": config,
        }

    def write_summary(self, path: str, seed: int, config: Dict[str, Any]) -> None:
        with open(path, "w") as f:
            json.dump(self.summary(seed, config), f, indent=4)


class PseudoLabelTracker:
    """Holds the hidden unlabeled labels; the loss path never sees them."""

    def __init__(self, hidden_labels: np.ndarray):
        self._hidden = np.asarray(hidden_labels, dtype=int)
        self.reset()

    def reset(self) -> None:
        self.seen = 0
        self.kept = 0
        self.correct = 0

    def update(self, indices: np.ndarray, mask: np.ndarray, predicted: np.ndarray) -> None:
        mask = np.asarray(mask, dtype=bool)
        self.seen += mask.size
        self.kept += int(mask.sum())
        self.correct += int(np.sum(predicted[mask] == self._hidden[np.asarray(indices)[mask]]))

    @property
    def rate(self) -> float:
        return self.kept / self.seen if self.seen else 0.0

    @property
    def accuracy(self) -> float:
        return self.correct / self.kept if self.kept else 0.0


class RunningMean:
    """Running means of named loss components over one eval interval."""

    def __init__(self):
        self.totals: Dict[str, float] = {}
        self.count = 0

    def add(self, **values: float) -> None:
        for name, value in values.items():
            self.totals[name] = self.totals.get(name, 0.0) + value
        self.count += 1

    def mean(self, name: str) -> float:
        return self.totals.get(name, 0.0) / self.count if self.count else 0.0
