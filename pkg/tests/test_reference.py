import math

import numpy as np
import pytest

from divergence import LogBackend, MceConfig, mce
from reference import oracle_enumerate_simplex, oracle_fd_directional, oracle_mce_commuting, oracle_onehot_svd
from spectral import SymMatrix


class TestOracles:
    def test_commuting_matches_library_on_diagonals(self):
        p, q = [0.2, 0.0, 1.3], [0.5, 0.7, 2.0]
        cfg = MceConfig(log_backend=LogBackend.PRINCIPAL, ridge_lambda=0.0)
        assert abs(oracle_mce_commuting(p, q) - mce(SymMatrix.diag(p), SymMatrix.diag(q), cfg)) <= 1e-12

    def test_commuting_rejects_log_of_zero(self):
        with pytest.raises(ValueError):
            oracle_mce_commuting([1.0], [0.0])

    def test_finite_difference_of_square(self):
        value = oracle_fd_directional(lambda x: float(x[0] ** 2), [3.0], [1.0], 1e-5)
        assert value == pytest.approx(6.0, abs=1e-8)

    def test_simplex_grid(self):
        points = oracle_enumerate_simplex(3, 0.1)
        assert len(points) == 66
        assert all(abs(sum(p) - 1.0) <= 1e-12 for p in points)
        assert (1.0, 0.0, 0.0) in points
        assert len(set(points)) == 66

    def test_simplex_rejects_uneven_step(self):
        with pytest.raises(ValueError):
            oracle_enumerate_simplex(2, 0.3)

    def test_onehot_svd_warmup_batch(self):
        singular = oracle_onehot_svd([0, 2, 0, 0], 4, 3)
        assert singular == pytest.approx([math.sqrt(3), 1.0])

    def test_onehot_svd_matches_numpy(self, rng):
        labels = rng.integers(0, 4, size=11)
        one_hot = np.eye(4)[labels]
        expected = np.linalg.svd(one_hot, compute_uv=False)
        expected = expected[expected > 1e-12]
        np.testing.assert_allclose(oracle_onehot_svd(labels.tolist(), 11, 4), expected)
