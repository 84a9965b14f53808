"""
Goldens command - Recompute the warm-up relation matrices and compare them byte for byte.
"""

import numpy as np

from relation import GOLDENS, PredictionBatch, relation
from utils import EXIT_PROPERTY


def compare_goldens():
    """(name, matched) for every embedded fixture."""
    results = []
    for name, (batch, expected) in GOLDENS.items():
        computed = np.ascontiguousarray(relation(PredictionBatch(batch)).data)
        expected = np.ascontiguousarray(expected, dtype=float)
        results.append((name, computed.shape == expected.shape and computed.tobytes() == expected.tobytes()))
    return results


def setup(cli, utils):
    """Setup function to register the command with the runner."""

    @cli.command(name="goldens", description="Check the warm-up relation matrices against the fixtures.")
    def goldens():
        results = compare_goldens()
        for name, matched in results:
            print(f"{name:<28}  {'MATCH' if matched else 'MISMATCH'}")
        if not all(matched for _, matched in results):
            return EXIT_PROPERTY
