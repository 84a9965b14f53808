"""
Brute-force oracles for the test suite. They use plain arithmetic paths of
their own and import nothing from the library they check.
"""

import itertools
import math
from collections import Counter
from typing import Callable, List, Sequence, Tuple

import numpy as np


def oracle_mce_commuting(p_eigs: Sequence[float], q_eigs: Sequence[float]) -> float:
    """sum_i (-p_i log q_i + q_i) for simultaneously diagonal P and Q."""
    if len(p_eigs) != len(q_eigs):
        raise ValueError("eigenvalue lists differ in length")
    total = 0.0
    for p, q in zip(p_eigs, q_eigs):
        if p != 0.0:
            if q <= 0.0:
                raise ValueError(f"log of non-positive eigenvalue {q}")
            total -= p * math.log(q)
        total += q
    return total


def oracle_fd_directional(f: Callable[[np.ndarray], float], x, direction, h: float) -> float:
    """Central difference (f(x + h d) - f(x - h d)) / 2h."""
    x = np.asarray(x, dtype=float)
    direction = np.asarray(direction, dtype=float)
    return (f(x + h * direction) - f(x - h * direction)) / (2.0 * h)


def oracle_enumerate_simplex(k: int, grid_step: float) -> List[Tuple[float, ...]]:
    """Every probability vector of length k whose entries are multiples of grid_step."""
    n = int(round(1.0 / grid_step))
    if abs(n * grid_step - 1.0) > 1e-9:
        raise ValueError(f"grid_step {grid_step} does not divide 1")
    points = []
    for bars in itertools.combinations(range(n + k - 1), k - 1):
        edges = (-1,) + bars + (n + k - 1,)
        points.append(tuple((edges[i + 1] - edges[i] - 1) / n for i in range(k)))
    return points


def oracle_onehot_svd(labels: Sequence[int], b: int, k: int) -> List[float]:
    """Nonzero singular values of the b x k one-hot matrix: sqrt of each class count, descending."""
    if len(labels) != b:
        raise ValueError(f"{len(labels)} labels for a batch of {b}")
    if any(not 0 <= label < k for label in labels):
        raise ValueError(f"labels must lie in [0, {k})")
    counts = Counter(labels)
    return sorted((math.sqrt(c) for c in counts.values()), reverse=True)
