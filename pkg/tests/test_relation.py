import numpy as np
import pytest

from density import DensityMatrix
from errors import ContractError
from properties import gram_equality_counterexamples
from relation import (
    GOLDENS,
    WARMUP_STRONG_SCATTERED,
    WARMUP_STRONG_SCATTERED_RELATION,
    WARMUP_STRONG_SYSTEMATIC,
    WARMUP_STRONG_SYSTEMATIC_RELATION,
    WARMUP_WEAK,
    WARMUP_WEAK_RELATION,
    PredictionBatch,
    check_one_hot_equality,
    relation,
    relation_normalized,
)
from spectral import eig_sym


class TestPredictionBatch:
    def test_rejects_negative(self):
        with pytest.raises(ContractError):
            PredictionBatch([[1.2, -0.2]])

    def test_rejects_bad_row_sum(self):
        with pytest.raises(ContractError):
            PredictionBatch([[0.5, 0.4]])

    def test_rejects_empty(self):
        with pytest.raises(ContractError):
            PredictionBatch(np.zeros((0, 3)))

    def test_one_hot(self):
        batch = PredictionBatch.one_hot([2, 0], 3)
        np.testing.assert_array_equal(batch.rows, [[0, 0, 1], [1, 0, 0]])
        assert batch.is_one_hot()
        np.testing.assert_array_equal(batch.classes(), [2, 0])
        assert (batch.b, batch.k) == (2, 3)

    def test_subset(self):
        batch = PredictionBatch.one_hot([0, 1, 2], 3)
        np.testing.assert_array_equal(batch.subset([True, False, True]).classes(), [0, 2])


class TestGoldens:
    def test_weak_relation_exact(self):
        np.testing.assert_array_equal(relation(PredictionBatch(WARMUP_WEAK)).data, WARMUP_WEAK_RELATION)

    def test_systematic_strong_relation_exact(self):
        out = relation(PredictionBatch(WARMUP_STRONG_SYSTEMATIC)).data
        np.testing.assert_array_equal(out, WARMUP_STRONG_SYSTEMATIC_RELATION)

    def test_scattered_strong_relation_exact(self):
        out = relation(PredictionBatch(WARMUP_STRONG_SCATTERED)).data
        np.testing.assert_array_equal(out, WARMUP_STRONG_SCATTERED_RELATION)

    def test_fixture_table(self):
        assert set(GOLDENS) == {"warmup_weak", "warmup_strong_systematic", "warmup_strong_scattered"}


class TestRelation:
    def test_single_one_hot_row(self):
        np.testing.assert_array_equal(relation(PredictionBatch([[1.0, 0.0]])).data, [[1.0]])

    def test_uniform_rows(self):
        out = relation(PredictionBatch(np.full((2, 2), 0.5))).data
        np.testing.assert_array_equal(out, np.full((2, 2), 0.5))

    def test_psd(self, rng):
        for _ in range(10):
            batch = PredictionBatch(rng.dirichlet(np.ones(4), size=7))
            assert eig_sym(relation(batch)).eigenvalues[-1] >= -1e-10

    def test_one_hot_block_structure(self, rng):
        labels = rng.integers(0, 3, size=9)
        out = relation(PredictionBatch.one_hot(labels, 3)).data
        np.testing.assert_array_equal(out, (labels[:, None] == labels[None, :]).astype(float))

    def test_normalized_one_hot_is_density(self):
        out = relation_normalized(PredictionBatch(WARMUP_WEAK))
        np.testing.assert_array_equal(out.data, WARMUP_WEAK_RELATION / 4)
        DensityMatrix(out)


class TestOneHotEquality:
    def test_equal_to_itself(self):
        z = PredictionBatch(WARMUP_WEAK)
        assert check_one_hot_equality(z, z)

    def test_relabelled_batch_is_equal(self):
        z1 = PredictionBatch.one_hot([0, 0, 1], 3)
        z2 = PredictionBatch.one_hot([2, 2, 0], 3)
        assert check_one_hot_equality(z1, z2)

    def test_soft_batch_differs(self):
        z1 = PredictionBatch.one_hot([0, 1], 2)
        z2 = PredictionBatch([[0.9, 0.1], [0.1, 0.9]])
        assert not check_one_hot_equality(z1, z2)

    def test_requires_one_hot_first_argument(self):
        with pytest.raises(ContractError):
            check_one_hot_equality(PredictionBatch([[0.5, 0.5]]), PredictionBatch([[1.0, 0.0]]))

    def test_rejects_batch_mismatch(self):
        with pytest.raises(ContractError):
            check_one_hot_equality(PredictionBatch.one_hot([0], 2), PredictionBatch.one_hot([0, 1], 2))

    @pytest.mark.parametrize("b, k", [(2, 2), (2, 3), (3, 2), (3, 3)])
    def test_brute_force_on_grid(self, b, k):
        matches, counterexamples = gram_equality_counterexamples(b, k, 0.1)
        assert counterexamples == 0
        assert matches > 0
