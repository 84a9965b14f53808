"""
RelationMatch training loop: supervised CE, pseudo-label CE on the strong view,
and the MCE term between weak pseudo-label and strong prediction relations.
A supervised-only mode adds MCE as an auxiliary loss on labeled batches.
"""

import enum
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from datagen import Dataset, LabeledSplit
from divergence import LogBackend, MceConfig, mce, mce_grad_q
from errors import ConfigError, ContractError, TrainingDivergedError
from metrics import MetricsLog, MetricsRecord, PseudoLabelTracker, RunningMean
from model import (
    Augmentor,
    Gradients,
    Mlp,
    augment_strong,
    augment_weak,
    backward,
    forward,
    probs_to_logits_grad,
)
from relation import PredictionBatch, relation_normalized
from spectral import SymMatrix, taylor_radius

logger = logging.getLogger("relmatch.trainer")

INIT_STREAM = 0
SAMPLER_STREAM = 1
EVAL_BATCH = 256

# Floor inside log() so a saturated softmax gives a large finite CE.
TINY = np.finfo(float).tiny


class TrainMode(enum.Enum):
    RELATIONMATCH = "relationmatch"
    SUPERVISED = "supervised"


class Schedule(enum.Enum):
    COSINE = "cosine"
    CONSTANT = "constant"


class CeReduction(enum.Enum):
    MEAN = "mean"
    SUM = "sum"


class CplMapping(enum.Enum):
    CONVEX = "convex"
    LINEAR = "linear"


@dataclass(frozen=True)
class TrainConfig:
    mode: TrainMode = TrainMode.RELATIONMATCH
    mu_u: float = 1.0
    gamma_u: float = 3e-3
    gamma_s: float = 0.0
    tau: float = 0.95
    labeled_batch: int = 8
    unlabeled_ratio: int = 7
    lr: float = 0.03
    momentum: float = 0.9
    weight_decay: float = 5e-4
    schedule: Schedule = Schedule.COSINE
    total_steps: int = 5000
    eval_interval: int = 250
    cpl_enabled: bool = False
    cpl_mapping: CplMapping = CplMapping.CONVEX
    cpl_warmup: bool = True
    ce_reduction: CeReduction = CeReduction.MEAN
    label_smoothing: float = 0.0
    hidden: Tuple[int, ...] = (64, 64)
    weak_noise_sigma: float = 0.1
    strong_noise_sigma: float = 0.5
    strong_dropout_prob: float = 0.2
    seed: int = 0
    mce: MceConfig = field(default_factory=MceConfig)

    def __post_init__(self):
        for name, kind in (
            ("mode", TrainMode),
            ("schedule", Schedule),
            ("ce_reduction", CeReduction),
            ("cpl_mapping", CplMapping),
        ):
            value = getattr(self, name)
            if not isinstance(value, kind):
                try:
                    object.__setattr__(self, name, kind(value))
                except ValueError:
                    raise ConfigError(f"{name}: unknown value {value!r}") from None
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))

        if min(self.mu_u, self.gamma_u, self.gamma_s, self.lr, self.momentum, self.weight_decay) < 0:
            raise ConfigError("loss weights and optimizer settings must be nonnegative")
        if not 0 < self.tau <= 1:
            raise ConfigError(f"tau must be in (0, 1], got {self.tau}")
        if not 0 <= self.label_smoothing < 1:
            raise ConfigError(f"label_smoothing must be in [0, 1), got {self.label_smoothing}")
        if self.unlabeled_ratio < 1:
            raise ConfigError(f"unlabeled_ratio must be >= 1, got {self.unlabeled_ratio}")
        if self.labeled_batch < 1 or self.total_steps < 1 or self.eval_interval < 1:
            raise ConfigError("labeled_batch, total_steps and eval_interval must be positive")
        if any(h < 1 for h in self.hidden):
            raise ConfigError(f"hidden layer widths must be positive, got {self.hidden}")

    @property
    def unlabeled_batch(self) -> int:
        return self.labeled_batch * self.unlabeled_ratio

    def augmentor(self) -> Augmentor:
        return Augmentor(self.weak_noise_sigma, self.strong_noise_sigma, self.strong_dropout_prob, self.seed)


@dataclass
class CplState:
    """Per-sample record of the class each unlabeled sample was last confidently assigned (-1: never)."""

    selected: np.ndarray
    k: int
    warmup: bool = True

    @classmethod
    def create(cls, n_unlabeled: int, k: int, warmup: bool = True) -> "CplState":
        return cls(np.full(n_unlabeled, -1, dtype=int), k, warmup)

    def learning_effect(self) -> np.ndarray:
        """beta_c = sigma_c / max_c sigma_c (warm-up: / max(max sigma, unused count))."""
        sigma = np.bincount(self.selected[self.selected >= 0], minlength=self.k).astype(float)
        denom = sigma.max()
        if self.warmup:
            denom = max(denom, float(np.sum(self.selected < 0)))
        if denom == 0:
            return np.zeros(self.k)
        return sigma / denom

    def update(self, indices: np.ndarray, probs: np.ndarray, tau: float) -> None:
        confident = probs.max(axis=1) >= tau
        self.selected[np.asarray(indices)[confident]] = probs.argmax(axis=1)[confident]


@dataclass
class TrainState:
    model: Mlp
    velocity: List[np.ndarray]
    step: int
    total_steps: int
    rng: np.random.Generator
    cpl: Optional[CplState] = None


@dataclass(frozen=True)
class LossBreakdown:
    total: float
    ce_sup: float
    ce_unsup: float
    mce: float
    n_kept: int = 0


@dataclass(frozen=True)
class LossGrads:
    d_sup_logits: np.ndarray
    d_strong_logits: np.ndarray


def class_thresholds(tau: float, k: int, cpl: Optional[CplState] = None,
                     mapping: CplMapping = CplMapping.CONVEX) -> np.ndarray:
    if cpl is None:
        return np.full(k, tau)
    beta = cpl.learning_effect()
    if mapping is CplMapping.CONVEX:
        beta = beta / (2.0 - beta)
    return tau * beta


def pseudo_label(probs_weak: PredictionBatch, tau: float, cpl: Optional[CplState] = None,
                 mapping: CplMapping = CplMapping.CONVEX) -> Tuple[np.ndarray, PredictionBatch]:
    """Keep rows whose max probability reaches the threshold of their argmax class."""
    classes = probs_weak.classes()
    thresholds = class_thresholds(tau, probs_weak.k, cpl, mapping)
    mask = probs_weak.rows.max(axis=1) >= thresholds[classes]
    return mask, PredictionBatch.one_hot(classes, probs_weak.k)


def _cross_entropy(targets: np.ndarray, probs: np.ndarray, weights: np.ndarray,
                   reduction: CeReduction) -> Tuple[float, np.ndarray]:
    """Weighted CE over rows and its gradient with respect to the logits."""
    per_row = -np.sum(targets * np.log(np.maximum(probs, TINY)), axis=1)
    denom = probs.shape[0] if reduction is CeReduction.MEAN else 1.0
    value = float(np.sum(weights * per_row) / denom)
    d_logits = weights[:, None] * (probs - targets) / denom
    return value, d_logits


def smooth_targets(y: np.ndarray, eps: float) -> np.ndarray:
    """(1 - eps) y + eps / k; eps = 0 returns y unchanged."""
    if eps == 0:
        return y
    return (1.0 - eps) * y + eps / y.shape[1]


def mce_term(targets: PredictionBatch, probs: PredictionBatch, cfg: MceConfig) -> Tuple[float, np.ndarray]:
    """MCE between the normalized relations of two aligned batches, and its gradient w.r.t. probs.

    Batches of one row or fewer carry no relation and give (0, 0).
    """
    if targets.b != probs.b:
        raise ContractError(f"batch size mismatch: {targets.b} vs {probs.b}")
    if targets.b <= 1:
        return 0.0, np.zeros_like(probs.rows)
    p = relation_normalized(targets)
    q = relation_normalized(probs)
    value = mce(p, q, cfg)
    g = mce_grad_q(p, q, cfg).data
    # Q = X X^T / b  =>  dL/dX = (2 / b) G X for symmetric G
    return value, (2.0 / probs.b) * (g @ probs.rows)


def relationmatch_loss(y_sup: PredictionBatch, sup_probs: PredictionBatch, pseudo_labels: PredictionBatch,
                       strong_probs: PredictionBatch, mask: np.ndarray,
                       cfg: TrainConfig) -> Tuple[LossBreakdown, LossGrads]:
    """CE_sup + mu_u * (CE_unsup + gamma_u * MCE) with MCE over the kept rows only."""
    if y_sup is None or sup_probs is None or y_sup.b == 0:
        raise ContractError("labeled batch is empty")
    if y_sup.rows.shape != sup_probs.rows.shape:
        raise ContractError(f"labeled shapes differ: {y_sup.rows.shape} vs {sup_probs.rows.shape}")
    if pseudo_labels.rows.shape != strong_probs.rows.shape:
        raise ContractError("pseudo labels and strong predictions are not aligned")
    mask = np.asarray(mask, dtype=bool)

    targets = smooth_targets(y_sup.rows, cfg.label_smoothing)
    ce_sup, d_sup = _cross_entropy(targets, sup_probs.rows, np.ones(y_sup.b), cfg.ce_reduction)
    ce_unsup, d_strong = _cross_entropy(
        pseudo_labels.rows, strong_probs.rows, mask.astype(float), cfg.ce_reduction
    )

    mce_value = 0.0
    d_strong_probs = np.zeros_like(strong_probs.rows)
    n_kept = int(mask.sum())
    if n_kept > 1:
        mce_value, d_kept = mce_term(pseudo_labels.subset(mask), strong_probs.subset(mask), cfg.mce)
        d_strong_probs[mask] = d_kept
    d_strong = d_strong + cfg.gamma_u * probs_to_logits_grad(strong_probs.rows, d_strong_probs)

    total = ce_sup + cfg.mu_u * (ce_unsup + cfg.gamma_u * mce_value)
    breakdown = LossBreakdown(total, ce_sup, ce_unsup, mce_value, n_kept)
    return breakdown, LossGrads(d_sup, cfg.mu_u * d_strong)


def supervised_loss_with_mce(y: PredictionBatch, probs: PredictionBatch, gamma_s: float, cfg: MceConfig,
                             reduction: CeReduction = CeReduction.MEAN,
                             label_smoothing: float = 0.0) -> Tuple[LossBreakdown, np.ndarray]:
    """Mean CE + gamma_s * MCE(R(y), R(probs)); returns the breakdown and d/d logits.

    Label smoothing applies to the CE targets only; the relation is built from y.
    """
    if not y.is_one_hot():
        raise ContractError("supervised targets must be one-hot")
    ce, d_logits = _cross_entropy(smooth_targets(y.rows, label_smoothing), probs.rows, np.ones(y.b), reduction)
    mce_value = 0.0
    if gamma_s > 0:
        mce_value, d_probs = mce_term(y, probs, cfg)
        d_logits = d_logits + gamma_s * probs_to_logits_grad(probs.rows, d_probs)
    return LossBreakdown(ce + gamma_s * mce_value, ce, 0.0, mce_value, y.b), d_logits


def lr_at(cfg: TrainConfig, step: int) -> float:
    if cfg.schedule is Schedule.CONSTANT:
        return cfg.lr
    return cfg.lr * float(np.cos(7.0 * np.pi * step / (16.0 * cfg.total_steps)))


def sgd_update(params: List[np.ndarray], velocity: List[np.ndarray], grads: List[np.ndarray],
               lr: float, momentum: float, weight_decay: float) -> None:
    """In place: v = momentum v + g + wd theta; theta -= lr v."""
    if len(params) != len(grads) or len(params) != len(velocity):
        raise ContractError("parameter, velocity and gradient lists differ in length")
    for param, vel, grad in zip(params, velocity, grads):
        if param.shape != grad.shape or param.shape != vel.shape:
            raise ContractError(f"shape mismatch {param.shape} / {vel.shape} / {grad.shape}")
        vel *= momentum
        vel += grad + weight_decay * param
        param -= lr * vel


def sgd_step(state: TrainState, grads: Gradients, cfg: TrainConfig) -> TrainState:
    if state.step >= state.total_steps:
        raise ContractError(f"step {state.step} is past total_steps {state.total_steps}")
    sgd_update(state.model.parameters(), state.velocity, grads.as_list(),
               lr_at(cfg, state.step), cfg.momentum, cfg.weight_decay)
    state.step += 1
    return state


def init_state(cfg: TrainConfig, d: int, k: int, n_unlabeled: int) -> TrainState:
    model = Mlp.init([d, *cfg.hidden, k], np.random.default_rng([cfg.seed, INIT_STREAM]))
    velocity = [np.zeros_like(p) for p in model.parameters()]
    cpl = CplState.create(n_unlabeled, k, cfg.cpl_warmup) if cfg.cpl_enabled else None
    return TrainState(model, velocity, 0, cfg.total_steps, np.random.default_rng([cfg.seed, SAMPLER_STREAM]), cpl)


def evaluate(model: Mlp, split: LabeledSplit) -> float:
    correct = 0
    for start in range(0, len(split), EVAL_BATCH):
        batch, _ = forward(model, split.x[start:start + EVAL_BATCH])
        correct += int(np.sum(batch.classes() == split.y[start:start + EVAL_BATCH]))
    return correct / len(split) if len(split) else 0.0


def _sample(rng: np.random.Generator, n: int, size: int) -> np.ndarray:
    return rng.choice(n, size=size, replace=n < size)


def _log_taylor_radius(pseudo: PredictionBatch, strong: PredictionBatch, mask: np.ndarray,
                       cfg: MceConfig, step: int) -> None:
    if cfg.log_backend is not LogBackend.TAYLOR or mask.sum() < 2:
        return
    q = relation_normalized(strong.subset(mask)).data
    radius = taylor_radius(SymMatrix(q + cfg.ridge_lambda * np.eye(q.shape[0])))
    logger.debug("[TRAIN] step %d: ||Q - I||_2 = %.4f (series radius 1)", step, radius)


def train(cfg: TrainConfig, dataset: Dataset, state: Optional[TrainState] = None) -> MetricsLog:
    """Run SGD up to cfg.total_steps.

    Pass a state from init_state() to keep hold of the trained model; it is updated in place.
    """
    view = dataset.training_view()
    tracker = PseudoLabelTracker(dataset.hidden_unlabeled_labels)
    n_lab, n_un = len(view.labeled), view.unlabeled_x.shape[0]
    d = view.labeled.x.shape[1]
    if len(np.unique(view.labeled.y)) < view.k:
        raise ContractError("labeled split needs at least one sample per class")

    state = state or init_state(cfg, d, view.k, n_un)
    aug = cfg.augmentor()
    log = MetricsLog()
    running = RunningMean()

    while state.step < cfg.total_steps:
        step = state.step
        model = state.model
        lab_idx = _sample(state.rng, n_lab, cfg.labeled_batch)
        x_sup = augment_weak(aug, view.labeled.x[lab_idx], lab_idx, step)
        sup_probs, sup_cache = forward(model, x_sup)
        y_sup = PredictionBatch.one_hot(view.labeled.y[lab_idx], view.k)

        if cfg.mode is TrainMode.SUPERVISED:
            breakdown, d_sup = supervised_loss_with_mce(
                y_sup, sup_probs, cfg.gamma_s, cfg.mce, cfg.ce_reduction, cfg.label_smoothing
            )
            grads = backward(model, sup_cache, d_logits=d_sup)
        else:
            un_idx = _sample(state.rng, n_un, cfg.unlabeled_batch)
            x_un = view.unlabeled_x[un_idx]
            # unlabeled samples are numbered after the labeled ones for the augmentation streams
            weak_probs, _ = forward(model, augment_weak(aug, x_un, un_idx + n_lab, step))
            strong_probs, strong_cache = forward(model, augment_strong(aug, x_un, un_idx + n_lab, step))

            mask, pseudo = pseudo_label(weak_probs, cfg.tau, state.cpl, cfg.cpl_mapping)
            if state.cpl is not None:
                state.cpl.update(un_idx, weak_probs.rows, cfg.tau)
            tracker.update(un_idx, mask, pseudo.classes())

            breakdown, loss_grads = relationmatch_loss(y_sup, sup_probs, pseudo, strong_probs, mask, cfg)
            grads = backward(model, sup_cache, d_logits=loss_grads.d_sup_logits) + backward(
                model, strong_cache, d_logits=loss_grads.d_strong_logits
            )
            if logger.isEnabledFor(logging.DEBUG) and (step + 1) % cfg.eval_interval == 0:
                _log_taylor_radius(pseudo, strong_probs, mask, cfg.mce, step + 1)

        if not np.isfinite(breakdown.total) or not grads.is_finite():
            logger.error("non-finite loss or gradient at step %d", step)
            raise TrainingDivergedError(step, f"loss={breakdown.total!r}")

        running.add(ce_sup=breakdown.ce_sup, ce_unsup=breakdown.ce_unsup, mce=breakdown.mce)
        lr = lr_at(cfg, step)
        sgd_step(state, grads, cfg)

        if state.step % cfg.eval_interval == 0 or state.step == cfg.total_steps:
            record = MetricsRecord(
                step=state.step,
                lr=lr,
                ce_sup=running.mean("ce_sup"),
                ce_unsup=running.mean("ce_unsup"),
                mce=running.mean("mce"),
                pl_rate=tracker.rate,
                pl_acc=tracker.accuracy,
                test_acc=evaluate(state.model, view.test),
            )
            log.append(record)
            logger.info(
                "[TRAIN] step %d/%d lr=%.5f ce_sup=%.4f ce_unsup=%.4f mce=%.4f pl_rate=%.3f pl_acc=%.3f test_acc=%.4f",
                record.step, cfg.total_steps, record.lr, record.ce_sup, record.ce_unsup,
                record.mce, record.pl_rate, record.pl_acc, record.test_acc,
            )
            running = RunningMean()
            tracker.reset()

    return log
