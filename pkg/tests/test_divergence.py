import numpy as np
import pytest

from density import (
    DensityMatrix,
    ProbVector,
    diag_density,
    pure_density,
    random_density,
    random_orthogonal,
    von_neumann_entropy,
)
from divergence import (
    LogBackend,
    MceConfig,
    matrix_bregman,
    matrix_log,
    mce,
    mce_grad_q,
    mce_linear_part,
    mce_lower_bound,
    mce_normalized,
    mce_pca_form,
    mre,
    scalar_ce_bridge,
)
from errors import ConfigError, ContractError, DomainError, PositiveDefinitenessError
from reference import oracle_fd_directional, oracle_mce_commuting
from spectral import SymMatrix

EXACT = MceConfig(log_backend=LogBackend.PRINCIPAL, ridge_lambda=0.0)
BACKENDS = [
    MceConfig(log_backend=LogBackend.PRINCIPAL),
    MceConfig(log_backend=LogBackend.TAYLOR, taylor_order=3),
    MceConfig(log_backend=LogBackend.ELEMENTWISE),
]


def well_conditioned_density(dim, rng):
    """Eigenvalues and entries bounded away from zero, so every backend is smooth near q."""
    anchor = (np.eye(dim) + np.ones((dim, dim))) / (2 * dim)
    return DensityMatrix(SymMatrix(0.1 * random_density(dim, rng).data + 0.9 * anchor))


class TestMceConfig:
    def test_defaults(self):
        cfg = MceConfig()
        assert cfg.log_backend is LogBackend.TAYLOR
        assert cfg.taylor_order == 3
        assert cfg.spelling == "taylor3"

    @pytest.mark.parametrize(
        "spelling, backend, order",
        [("principal", LogBackend.PRINCIPAL, 3), ("taylor7", LogBackend.TAYLOR, 7), ("Elementwise", LogBackend.ELEMENTWISE, 3)],
    )
    def test_parse(self, spelling, backend, order):
        cfg = MceConfig.parse(spelling)
        assert cfg.log_backend is backend
        assert cfg.taylor_order == order

    def test_parse_rejects_unknown(self):
        with pytest.raises(ConfigError):
            MceConfig.parse("cholesky")

    def test_validation(self):
        with pytest.raises(ConfigError):
            MceConfig(taylor_order=0)
        with pytest.raises(ConfigError):
            MceConfig(ridge_lambda=-1.0)
        with pytest.raises(ConfigError):
            MceConfig(elementwise_eps=0.0)
        with pytest.raises(ConfigError):
            MceConfig(taylor_order=2.5)

    def test_integral_float_order_is_normalized(self, rng):
        cfg = MceConfig(taylor_order=3.0)
        assert type(cfg.taylor_order) is int
        assert cfg.spelling == "taylor3"
        assert cfg == MceConfig()
        p, q = random_density(4, rng), well_conditioned_density(4, rng)
        np.testing.assert_array_equal(mce_grad_q(p, q, cfg).data, mce_grad_q(p, q, MceConfig()).data)


class TestMce:
    @pytest.mark.parametrize("b", [1, 2, 5])
    def test_uniform(self, b):
        p = SymMatrix(np.eye(b) / b)
        assert mce(p, p, EXACT) == pytest.approx(np.log(b) + 1.0)

    def test_diagonal_pair(self):
        value = mce(SymMatrix.diag([1.0, 0.0]), SymMatrix.diag([0.9, 0.1]), EXACT)
        assert value == pytest.approx(1.10536, abs=1e-5)

    def test_commuting_matches_scalar_oracle(self, rng):
        p_eigs = rng.uniform(0, 2, size=6)
        q_eigs = rng.uniform(0.1, 2, size=6)
        u = random_orthogonal(6, rng)
        p = SymMatrix((u * p_eigs) @ u.T)
        q = SymMatrix((u * q_eigs) @ u.T)
        assert mce(p, q, EXACT) == pytest.approx(oracle_mce_commuting(p_eigs, q_eigs), abs=1e-11)

    def test_ridge_applies_to_log_only(self):
        cfg = MceConfig(log_backend=LogBackend.PRINCIPAL, ridge_lambda=0.5)
        value = mce(SymMatrix.diag([1.0, 0.0]), SymMatrix.diag([0.5, 0.5]), cfg)
        assert value == pytest.approx(-np.log(1.0) + 1.0)

    def test_principal_rejects_singular_q(self):
        with pytest.raises(PositiveDefinitenessError):
            mce(SymMatrix.diag([0.5, 0.5]), SymMatrix.diag([1.0, 0.0]), EXACT)

    def test_rank_deficient_q_with_ridge(self):
        cfg = MceConfig(log_backend=LogBackend.PRINCIPAL, ridge_lambda=1e-6)
        assert np.isfinite(mce(SymMatrix.diag([0.5, 0.5]), SymMatrix.diag([1.0, 0.0]), cfg))

    def test_matrix_log_dispatch(self):
        q = SymMatrix.diag([1.5, 0.5])
        taylor = matrix_log(q, MceConfig(log_backend=LogBackend.TAYLOR, taylor_order=1, ridge_lambda=0.0))
        np.testing.assert_allclose(taylor.data, np.diag([0.5, -0.5]))


class TestNormalized:
    def test_pure_state(self):
        d = pure_density(ProbVector([0.3, 0.7]), np.eye(2))
        cfg = MceConfig(log_backend=LogBackend.PRINCIPAL, ridge_lambda=1e-6)
        assert mce_normalized(d, d, cfg) == pytest.approx(1.0, abs=1e-3)

    def test_half_half(self):
        d = DensityMatrix(np.eye(2) / 2)
        assert mce_normalized(d, d, EXACT) == pytest.approx(np.log(2) + 1.0)

    def test_matches_mce_on_unit_trace(self, rng):
        for _ in range(5):
            p, q = random_density(4, rng), random_density(4, rng)
            for cfg in BACKENDS:
                assert abs(mce_normalized(p, q, cfg) - mce(p, q, cfg)) <= 1e-12


class TestRelativeEntropy:
    def test_self_is_zero(self, rng):
        p = random_density(5, rng)
        assert mre(p, p, EXACT) == pytest.approx(0.0, abs=1e-8)
        assert matrix_bregman(p, p, EXACT) == pytest.approx(0.0, abs=1e-8)

    def test_diagonal_is_kl(self):
        p, q = np.array([0.2, 0.3, 0.5]), np.array([0.4, 0.4, 0.2])
        expected = float(np.sum(p * np.log(p / q)))
        assert mre(diag_density(ProbVector(p)), diag_density(ProbVector(q)), EXACT) == pytest.approx(expected)

    def test_klein(self, rng):
        for _ in range(10):
            assert mre(random_density(4, rng), random_density(4, rng), EXACT) >= -1e-8

    def test_decomposition(self, rng):
        p, q = random_density(5, rng), random_density(5, rng)
        assert mce_normalized(p, q, EXACT) == pytest.approx(von_neumann_entropy(p) + mre(p, q, EXACT) + 1.0, abs=1e-8)

    def test_bregman_diagonal(self):
        p, q = np.array([0.5, 1.5]), np.array([1.0, 0.25])
        expected = float(np.sum(p * np.log(p / q) - p + q))
        assert matrix_bregman(SymMatrix.diag(p), SymMatrix.diag(q), EXACT) == pytest.approx(expected)

    def test_bregman_offset_independent_of_q(self, rng):
        p = SymMatrix(random_density(3, rng).data * 2.0)
        offsets = [mce(p, q, EXACT) - matrix_bregman(p, q, EXACT) for q in (random_density(3, rng) for _ in range(6))]
        np.testing.assert_allclose(offsets, offsets[0], atol=1e-10)


class TestBridge:
    def test_single_row(self):
        assert scalar_ce_bridge([[1, 0, 0]], [[0.5, 0.25, 0.25]]) == pytest.approx(np.log(2), abs=1e-12)

    def test_smoothed_one_hot(self):
        nu = np.array([[1 - 2e-12, 1e-12, 1e-12]])
        assert scalar_ce_bridge([[1, 0, 0]], nu) == pytest.approx(0.0, abs=1e-10)

    def test_mean_of_rows(self):
        mu = [[1, 0], [0, 1]]
        nu = [[0.8, 0.2], [0.4, 0.6]]
        expected = -(np.log(0.8) + np.log(0.6)) / 2
        assert abs(scalar_ce_bridge(mu, nu) - expected) <= 1e-12

    def test_zero_probability(self):
        with pytest.raises(DomainError):
            scalar_ce_bridge([[1, 0]], [[0.0, 1.0]])

    def test_rejects_soft_targets(self):
        with pytest.raises(ContractError):
            scalar_ce_bridge([[0.5, 0.5]], [[0.5, 0.5]])


class TestLowerBound:
    def test_uniform_saturates(self):
        d = DensityMatrix(np.eye(2) / 2)
        assert mce_lower_bound(d, d.inner) == pytest.approx(np.log(2) + 1.0)
        assert mce(d, d, EXACT) == pytest.approx(mce_lower_bound(d, d.inner))

    def test_holds_on_random_pairs(self, rng):
        for _ in range(20):
            p, q = random_density(4, rng), random_density(4, rng)
            assert mce(p, q, EXACT) >= mce_lower_bound(p, q) - 1e-8

    def test_orthogonal_pure_states_with_ridge(self):
        p = diag_density(ProbVector([1.0, 0.0]))
        q = SymMatrix.diag([1e-6, 1.0 + 1e-6])
        bound = mce_lower_bound(p, q)
        assert np.isfinite(bound)
        assert mce(p, q, EXACT) >= bound - 1e-8

    def test_zero_overlap(self):
        with pytest.raises(DomainError):
            mce_lower_bound(diag_density(ProbVector([1.0, 0.0])), SymMatrix.diag([0.0, 1.0]))


class TestPcaForm:
    def test_commuting(self):
        p, q = SymMatrix.diag([0.6, 0.4]), SymMatrix.diag([0.3, 0.9])
        expected = -(0.6 * np.log(0.3) + 0.4 * np.log(0.9)) + 1.2
        assert mce_pca_form(p, q) == pytest.approx(expected)

    def test_matches_primary_path(self, rng):
        p, q = random_density(6, rng), random_density(6, rng)
        assert mce_pca_form(p, q) == pytest.approx(mce(p, q, EXACT), abs=1e-8)

    def test_rank_deficient_p(self, rng):
        p, q = random_density(5, rng, rank=2), random_density(5, rng)
        assert np.isfinite(mce_pca_form(p, q))


class TestGradient:
    @pytest.mark.parametrize("cfg", BACKENDS, ids=lambda c: c.spelling)
    def test_directional_derivative(self, rng, cfg):
        for _ in range(3):
            p = random_density(4, rng)
            q = well_conditioned_density(4, rng)
            direction = SymMatrix(rng.standard_normal((4, 4))).data
            g = mce_grad_q(p, q, cfg).data
            numeric = oracle_fd_directional(lambda x: mce(p, SymMatrix(x), cfg), q.data, direction, 1e-5)
            analytic = float(np.sum(g * direction))
            assert abs(numeric - analytic) <= 1e-4 * max(abs(numeric), abs(analytic)) + 1e-9

    def test_stationary_at_p(self, rng):
        p = random_density(6, rng)
        g = mce_grad_q(p, p, EXACT).data
        tangent = g - np.trace(g) / 6 * np.eye(6)
        assert np.linalg.norm(tangent) <= 1e-6

    def test_full_gradient_vanishes_at_full_rank_p(self, rng):
        for dim in (3, 6):
            p = random_density(dim, rng)
            assert np.linalg.norm(mce_grad_q(p, p, EXACT).data) <= 1e-8

    @pytest.mark.parametrize("cfg", [EXACT, MceConfig(log_backend=LogBackend.ELEMENTWISE, ridge_lambda=0.0)])
    def test_diagonal(self, cfg):
        p, q = np.array([0.2, 0.8]), np.array([0.5, 0.25])
        g = mce_grad_q(SymMatrix.diag(p), SymMatrix.diag(q), cfg).data
        np.testing.assert_allclose(np.diag(g), -p / q + 1.0, atol=1e-12)

    def test_elementwise_clamped_entries_have_zero_gradient(self):
        cfg = MceConfig(log_backend=LogBackend.ELEMENTWISE, ridge_lambda=0.0, elementwise_eps=1e-8)
        g = mce_grad_q(SymMatrix(np.ones((2, 2))), SymMatrix.diag([0.5, 0.5]), cfg).data
        assert g[0, 1] == 0.0


class TestLinearity:
    def test_convex_weights(self, rng):
        parts = [random_density(4, rng) for _ in range(3)]
        weights = np.array([0.2, 0.5, 0.3])
        q = random_density(4, rng)
        mixed = SymMatrix(sum(w * d.data for w, d in zip(weights, parts)))
        combined = sum(w * mce(d, q, EXACT) for w, d in zip(weights, parts))
        assert abs(mce(mixed, q, EXACT) - combined) <= 1e-10

    def test_unrestricted_weights_hold_for_the_log_term_only(self, rng):
        parts = [random_density(4, rng) for _ in range(2)]
        weights = np.array([2.0, -0.5])
        q = random_density(4, rng)
        mixed = SymMatrix(sum(w * d.data for w, d in zip(weights, parts)))
        linear = sum(w * mce_linear_part(d, q, EXACT) for w, d in zip(weights, parts))
        assert abs(mce_linear_part(mixed, q, EXACT) - linear) <= 1e-10
        full = sum(w * mce(d, q, EXACT) for w, d in zip(weights, parts))
        assert abs(mce(mixed, q, EXACT) - full) == pytest.approx(abs(1.0 - weights.sum()) * np.trace(q.data))
