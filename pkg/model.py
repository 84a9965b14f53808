"""
Minimal softmax MLP with hand-written forward/backward passes, the weak/strong
augmentation operators for feature vectors, and checkpoint IO.
"""

import json
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from errors import ConfigError, ContractError
from relation import PredictionBatch

CHECKPOINT_FORMAT = "relmatch-mlp-v1"

WEAK_STREAM = 0
STRONG_STREAM = 1


@dataclass
class Mlp:
    """ReLU hidden layers, linear output, softmax on top. Rows are samples."""

    weights: List[np.ndarray]
    biases: List[np.ndarray]

    @classmethod
    def init(cls, dims: Sequence[int], rng: np.random.Generator) -> "Mlp":
        """He-normal weights, zero biases."""
        weights, biases = [], []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        return cls(weights, biases)

    @classmethod
    def zeros(cls, dims: Sequence[int]) -> "Mlp":
        return cls(
            [np.zeros((a, b)) for a, b in zip(dims[:-1], dims[1:])],
            [np.zeros(b) for b in dims[1:]],
        )

    @property
    def dims(self) -> List[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    def parameters(self) -> List[np.ndarray]:
        """W1, b1, W2, b2, ... (the arrays themselves, not copies)."""
        params = []
        for w, b in zip(self.weights, self.biases):
            params.extend([w, b])
        return params

    def copy(self) -> "Mlp":
        return Mlp([w.copy() for w in self.weights], [b.copy() for b in self.biases])


@dataclass
class ForwardCache:
    inputs: List[np.ndarray]
    pre_activations: List[np.ndarray]
    logits: np.ndarray
    probs: np.ndarray


@dataclass
class Gradients:
    weights: List[np.ndarray]
    biases: List[np.ndarray]

    @classmethod
    def zeros_like(cls, model: Mlp) -> "Gradients":
        return cls([np.zeros_like(w) for w in model.weights], [np.zeros_like(b) for b in model.biases])

    def __add__(self, other: "Gradients") -> "Gradients":
        return Gradients(
            [a + b for a, b in zip(self.weights, other.weights)],
            [a + b for a, b in zip(self.biases, other.biases)],
        )

    def as_list(self) -> List[np.ndarray]:
        grads = []
        for w, b in zip(self.weights, self.biases):
            grads.extend([w, b])
        return grads

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(g)) for g in self.as_list())


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def probs_to_logits_grad(probs: np.ndarray, d_probs: np.ndarray) -> np.ndarray:
    """Chain a gradient w.r.t. softmax outputs back to the logits, row by row."""
    return probs * (d_probs - np.sum(d_probs * probs, axis=1, keepdims=True))


def forward(m: Mlp, x: np.ndarray) -> Tuple[PredictionBatch, ForwardCache]:
    h = np.atleast_2d(np.asarray(x, dtype=float))
    inputs, pre_activations = [], []
    last = len(m.weights) - 1
    for layer, (w, b) in enumerate(zip(m.weights, m.biases)):
        inputs.append(h)
        z = h @ w + b
        if layer == last:
            logits = z
        else:
            pre_activations.append(z)
            h = np.maximum(z, 0.0)
    probs = softmax(logits)
    return PredictionBatch(probs), ForwardCache(inputs, pre_activations, logits, probs)


def backward(
    m: Mlp,
    cache: ForwardCache,
    d_logits: Optional[np.ndarray] = None,
    d_probs: Optional[np.ndarray] = None,
) -> Gradients:
    """Parameter gradients from an upstream gradient on either the logits or the probabilities."""
    if (d_logits is None) == (d_probs is None):
        raise ContractError("pass exactly one of d_logits and d_probs")
    upstream = d_logits if d_logits is not None else d_probs
    upstream = np.asarray(upstream, dtype=float)
    if upstream.shape != cache.logits.shape:
        raise ContractError(f"upstream gradient shape {upstream.shape} != {cache.logits.shape}")
    dz = upstream if d_logits is not None else probs_to_logits_grad(cache.probs, upstream)

    n_layers = len(m.weights)
    d_weights: List[np.ndarray] = [None] * n_layers
    d_biases: List[np.ndarray] = [None] * n_layers
    for layer in range(n_layers - 1, -1, -1):
        d_weights[layer] = cache.inputs[layer].T @ dz
        d_biases[layer] = dz.sum(axis=0)
        if layer > 0:
            dh = dz @ m.weights[layer].T
            dz = dh * (cache.pre_activations[layer - 1] > 0)
    return Gradients(d_weights, d_biases)


@dataclass(frozen=True)
class Augmentor:
    """Weak view: Gaussian jitter. Strong view: coordinate dropout, then larger jitter."""

    weak_noise_sigma: float = 0.1
    strong_noise_sigma: float = 0.5
    strong_dropout_prob: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.weak_noise_sigma <= self.strong_noise_sigma:
            raise ConfigError("need 0 <= weak_noise_sigma <= strong_noise_sigma")
        if not 0 <= self.strong_dropout_prob < 1:
            raise ConfigError("strong_dropout_prob must be in [0, 1)")


def _row_rng(aug: Augmentor, stream: int, step: int, index: int) -> np.random.Generator:
    return np.random.default_rng([aug.seed, stream, step, int(index)])


def _indices(x: np.ndarray, indices) -> np.ndarray:
    if indices is None:
        return np.arange(x.shape[0])
    indices = np.asarray(indices, dtype=int).reshape(-1)
    if indices.size != x.shape[0]:
        raise ContractError(f"{indices.size} indices for {x.shape[0]} samples")
    return indices


def augment_weak(aug: Augmentor, x: np.ndarray, indices=None, step: int = 0) -> np.ndarray:
    """x + N(0, weak_sigma^2), a pure function of (seed, sample index, step)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if aug.weak_noise_sigma == 0:
        return x.copy()
    out = np.empty_like(x)
    for row, index in enumerate(_indices(x, indices)):
        rng = _row_rng(aug, WEAK_STREAM, step, index)
        out[row] = x[row] + rng.normal(0.0, aug.weak_noise_sigma, size=x.shape[1])
    return out


def augment_strong(aug: Augmentor, x: np.ndarray, indices=None, step: int = 0) -> np.ndarray:
    """Zero each coordinate with strong_dropout_prob, then add N(0, strong_sigma^2)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if aug.strong_noise_sigma == 0 and aug.strong_dropout_prob == 0:
        return x.copy()
    out = np.empty_like(x)
    for row, index in enumerate(_indices(x, indices)):
        rng = _row_rng(aug, STRONG_STREAM, step, index)
        keep = rng.random(x.shape[1]) >= aug.strong_dropout_prob
        out[row] = np.where(keep, x[row], 0.0) + rng.normal(0.0, aug.strong_noise_sigma, size=x.shape[1])
    return out


def save_checkpoint(path: str, model: Mlp, seed: int, step: int) -> None:
    """JSON header line, then one line of %.17g values per parameter array."""
    header = {"format": CHECKPOINT_FORMAT, "dims": model.dims, "seed": seed, "step": step}
    with open(path, "w") as f:
        f.write(json.dumps(header) + "\n")
        for param in model.parameters():
            f.write(" ".join("%.17g" % v for v in param.ravel()) + "\n")


def load_checkpoint(path: str) -> Tuple[Mlp, Dict[str, Any]]:
    with open(path, "r") as f:
        lines = f.read().splitlines()
    header = json.loads(lines[0])
    if header.get("format") != CHECKPOINT_FORMAT:
        raise ContractError(f"unsupported checkpoint format {header.get('format')!r}")
    model = Mlp.zeros(header["dims"])
    params = model.parameters()
    if len(lines) - 1 != len(params):
        raise ContractError(f"checkpoint has {len(lines) - 1} arrays, expected {len(params)}")
    for param, line in zip(params, lines[1:]):
        values = np.array(line.split(), dtype=float)
        if values.size != param.size:
            raise ContractError(f"array of {values.size} values where {param.size} expected")
        param[...] = values.reshape(param.shape)
    return model, header
