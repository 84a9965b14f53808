import numpy as np
import pytest

from errors import ConfigError, ContractError
from model import (
    Augmentor,
    Gradients,
    Mlp,
    augment_strong,
    augment_weak,
    backward,
    forward,
    load_checkpoint,
    probs_to_logits_grad,
    save_checkpoint,
    softmax,
)


def weighted_prob_sum(model, x, c):
    _, cache = forward(model, x)
    return float(np.sum(cache.probs * c))


class TestSoftmax:
    def test_rows_sum_to_one(self, rng):
        probs = softmax(rng.standard_normal((5, 4)) * 10)
        np.testing.assert_allclose(probs.sum(axis=1), np.ones(5))

    def test_large_logits_are_stable(self):
        probs = softmax(np.array([[1000.0, 0.0]]))
        np.testing.assert_allclose(probs, [[1.0, 0.0]], atol=1e-300)

    def test_probs_to_logits_grad_matches_jacobian(self, rng):
        logits = rng.standard_normal((1, 3))
        p = softmax(logits)[0]
        jac = np.diag(p) - np.outer(p, p)
        d_probs = rng.standard_normal((1, 3))
        np.testing.assert_allclose(probs_to_logits_grad(p[None, :], d_probs)[0], jac @ d_probs[0], atol=1e-14)


class TestMlp:
    def test_dims_and_parameters(self, rng):
        model = Mlp.init([3, 5, 2], rng)
        assert model.dims == [3, 5, 2]
        assert [p.shape for p in model.parameters()] == [(3, 5), (5,), (5, 2), (2,)]

    def test_copy_is_independent(self, rng):
        model = Mlp.init([2, 2], rng)
        clone = model.copy()
        clone.weights[0][0, 0] += 1.0
        assert clone.weights[0][0, 0] != model.weights[0][0, 0]

    def test_forward_returns_prediction_batch(self, rng):
        model = Mlp.init([4, 8, 3], rng)
        batch, cache = forward(model, rng.standard_normal((6, 4)))
        assert (batch.b, batch.k) == (6, 3)
        np.testing.assert_array_equal(batch.rows, cache.probs)

    def test_zero_model_is_uniform(self):
        batch, _ = forward(Mlp.zeros([2, 4, 3]), np.ones((2, 2)))
        np.testing.assert_allclose(batch.rows, np.full((2, 3), 1 / 3))

    def test_hand_computed_forward(self):
        model = Mlp(
            [np.array([[1.0, -1.0], [2.0, 0.0]]), np.array([[1.0, -1.0], [0.0, 3.0]])],
            [np.array([0.0, 1.0]), np.array([0.5, -0.5])],
        )
        batch, cache = forward(model, np.array([[1.0, 2.0]]))
        # hidden pre-activation [5, 0], ReLU keeps [5, 0]
        np.testing.assert_array_equal(cache.pre_activations[0], [[5.0, 0.0]])
        np.testing.assert_array_equal(cache.logits, [[5.5, -5.5]])
        top = 1.0 / (1.0 + np.exp(-11.0))
        np.testing.assert_allclose(batch.rows, [[top, np.exp(-11.0) * top]], rtol=1e-12)

    def test_zero_upstream_gives_zero_gradients(self, rng):
        model = Mlp.init([3, 5, 4, 2], rng)
        _, cache = forward(model, rng.standard_normal((6, 3)))
        zero = np.zeros((6, 2))
        for grads in (backward(model, cache, d_logits=zero), backward(model, cache, d_probs=zero)):
            for g in grads.as_list():
                np.testing.assert_array_equal(g, 0.0)

    def test_backward_matches_finite_differences(self, rng):
        model = Mlp.init([3, 6, 4], rng)
        x = rng.standard_normal((5, 3))
        c = rng.standard_normal((5, 4))
        _, cache = forward(model, x)
        grads = backward(model, cache, d_probs=c)
        h = 1e-6
        for param, grad in zip(model.parameters(), grads.as_list()):
            for idx in np.ndindex(param.shape):
                saved = param[idx]
                param[idx] = saved + h
                up = weighted_prob_sum(model, x, c)
                param[idx] = saved - h
                down = weighted_prob_sum(model, x, c)
                param[idx] = saved
                assert grad[idx] == pytest.approx((up - down) / (2 * h), rel=1e-4, abs=1e-7)

    def test_backward_needs_exactly_one_upstream(self, rng):
        model = Mlp.init([2, 2], rng)
        _, cache = forward(model, np.ones((1, 2)))
        with pytest.raises(ContractError):
            backward(model, cache)
        with pytest.raises(ContractError):
            backward(model, cache, d_logits=np.zeros((1, 2)), d_probs=np.zeros((1, 2)))
        with pytest.raises(ContractError):
            backward(model, cache, d_logits=np.zeros((2, 2)))

    def test_gradients_add_and_finite(self, rng):
        model = Mlp.init([2, 3], rng)
        zero = Gradients.zeros_like(model)
        total = zero + zero
        assert total.is_finite()
        total.weights[0][0, 0] = np.nan
        assert not total.is_finite()


class TestAugmentor:
    def test_validation(self):
        with pytest.raises(ConfigError):
            Augmentor(weak_noise_sigma=0.6, strong_noise_sigma=0.5)
        with pytest.raises(ConfigError):
            Augmentor(strong_dropout_prob=1.0)

    def test_deterministic_per_index_and_step(self, rng):
        aug = Augmentor(seed=3)
        x = rng.standard_normal((4, 5))
        np.testing.assert_array_equal(augment_weak(aug, x, [0, 1, 2, 3], 7), augment_weak(aug, x, [0, 1, 2, 3], 7))
        np.testing.assert_array_equal(
            augment_strong(aug, x, [0, 1, 2, 3], 7), augment_strong(aug, x, [0, 1, 2, 3], 7)
        )
        assert not np.array_equal(augment_weak(aug, x, None, 7), augment_weak(aug, x, None, 8))

    def test_row_depends_only_on_its_index(self, rng):
        aug = Augmentor(seed=1)
        x = rng.standard_normal((3, 2))
        full = augment_strong(aug, x, [10, 11, 12], 4)
        single = augment_strong(aug, x[1:2], [11], 4)
        np.testing.assert_array_equal(full[1], single[0])

    def test_weak_and_strong_streams_differ(self, rng):
        aug = Augmentor(weak_noise_sigma=0.5, strong_noise_sigma=0.5, strong_dropout_prob=0.0)
        x = np.zeros((2, 3))
        assert not np.array_equal(augment_weak(aug, x), augment_strong(aug, x))

    def test_zero_noise_is_identity(self, rng):
        aug = Augmentor(weak_noise_sigma=0.0, strong_noise_sigma=0.0, strong_dropout_prob=0.0)
        x = rng.standard_normal((3, 2))
        np.testing.assert_array_equal(augment_weak(aug, x), x)
        np.testing.assert_array_equal(augment_strong(aug, x), x)

    def test_index_count_must_match(self):
        with pytest.raises(ContractError):
            augment_weak(Augmentor(), np.zeros((2, 2)), [0])

    def test_noise_standard_deviations(self):
        x = np.zeros((10000, 10))
        aug = Augmentor(weak_noise_sigma=0.1, strong_noise_sigma=0.5, strong_dropout_prob=0.0)
        weak = augment_weak(aug, x)
        strong = augment_strong(aug, x)
        assert np.std(weak) == pytest.approx(0.1, rel=0.02)
        assert np.std(strong) == pytest.approx(0.5, rel=0.02)
        assert abs(np.mean(weak)) < 0.005

    def test_dropout_rate(self):
        aug = Augmentor(weak_noise_sigma=0.0, strong_noise_sigma=0.0, strong_dropout_prob=0.2)
        out = augment_strong(aug, np.ones((10000, 10)))
        assert set(np.unique(out)) <= {0.0, 1.0}
        assert np.mean(out == 0.0) == pytest.approx(0.2, abs=0.01)


class TestCheckpoint:
    def test_round_trip_is_exact(self, rng, tmp_path):
        model = Mlp.init([3, 4, 2], rng)
        path = str(tmp_path / "model.ckpt")
        save_checkpoint(path, model, seed=5, step=100)
        loaded, header = load_checkpoint(path)
        assert header["seed"] == 5 and header["step"] == 100
        for a, b in zip(model.parameters(), loaded.parameters()):
            np.testing.assert_array_equal(a, b)

    def test_rejects_unknown_format(self, tmp_path):
        path = tmp_path / "bad.ckpt"
        path.write_text('{"format": "other"}\n')
        with pytest.raises(ContractError):
            load_checkpoint(str(path))
