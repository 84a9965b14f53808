"""
Property suite: the numerical invariants of every module, as named checks
returning PropertyResult. `relmatch.py verify` runs it at full size, the
tests run it at QUICK size.
"""

import itertools
import logging
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from density import (
    DensityMatrix,
    ProbVector,
    diag_density,
    from_gram_rows,
    induced_prob,
    pure_density,
    random_density,
    random_orthogonal,
    unitary_conjugate,
    von_neumann_entropy,
)
from divergence import (
    LogBackend,
    MceConfig,
    mce,
    mce_grad_q,
    mce_lower_bound,
    mce_normalized,
    mce_pca_form,
    mre,
    scalar_ce_bridge,
)
from model import Mlp, backward, forward
from reference import oracle_enumerate_simplex, oracle_onehot_svd
from relation import (
    GOLDENS,
    GRAM_TOL,
    WARMUP_STRONG_SCATTERED,
    WARMUP_STRONG_SYSTEMATIC,
    WARMUP_WEAK,
    PredictionBatch,
    check_one_hot_equality,
    relation,
    relation_normalized,
)
from spectral import SymMatrix, eig_sym, exp_sym, log_principal, log_taylor
from trainer import TrainConfig, mce_term, pseudo_label, relationmatch_loss

logger = logging.getLogger("relmatch.properties")

EXACT = MceConfig(log_backend=LogBackend.PRINCIPAL, ridge_lambda=0.0)

# Principal-log certification needs a ridge well above the FD step: relation
# matrices of b > k predictions are rank-deficient.
CERTIFY_BACKENDS = (
    MceConfig(log_backend=LogBackend.PRINCIPAL, ridge_lambda=1e-2),
    MceConfig(log_backend=LogBackend.TAYLOR, taylor_order=3, ridge_lambda=1e-6),
    MceConfig(log_backend=LogBackend.ELEMENTWISE, ridge_lambda=1e-6),
)


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


@dataclass(frozen=True)
class SuiteSize:
    roundtrips: int = 500
    pairs: int = 1000
    perturbations: int = 200
    samples: int = 100
    max_dim: int = 32
    cond_max: float = 1e6


FULL = SuiteSize()
QUICK = SuiteSize(roundtrips=12, pairs=40, perturbations=20, samples=10, max_dim=8, cond_max=1e4)


def _rel_frobenius(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / max(1.0, np.linalg.norm(b)))


def _random_spd(dim: int, rng: np.random.Generator, cond_max: float) -> SymMatrix:
    half = np.log10(cond_max) / 2.0
    eigenvalues = 10.0 ** rng.uniform(-half, half, size=dim)
    u = random_orthogonal(dim, rng)
    return SymMatrix((u * eigenvalues) @ u.T)


def _random_symmetric(dim: int, rng: np.random.Generator) -> SymMatrix:
    return SymMatrix(rng.standard_normal((dim, dim)))


def _dims(rng: np.random.Generator, size: SuiteSize, low: int = 2) -> int:
    return int(rng.integers(low, size.max_dim + 1))


def _density_pair(rng: np.random.Generator, size: SuiteSize) -> Tuple[DensityMatrix, DensityMatrix]:
    dim = int(rng.integers(2, min(size.max_dim, 16) + 1))
    return random_density(dim, rng), random_density(dim, rng)


def _random_probs(b: int, k: int, rng: np.random.Generator) -> np.ndarray:
    return rng.dirichlet(np.ones(k), size=b)


# spectral


def check_eig_reconstruction(rng, size: SuiteSize) -> Tuple[bool, str]:
    worst_rec = worst_orth = 0.0
    for _ in range(size.samples):
        m = _random_symmetric(_dims(rng, size, low=1), rng)
        s = eig_sym(m)
        worst_rec = max(worst_rec, np.linalg.norm(s.reconstruct().data - m.data) / max(1.0, np.linalg.norm(m.data)))
        worst_orth = max(worst_orth, float(np.max(np.abs(s.eigenvectors.T @ s.eigenvectors - np.eye(m.dim)))))
    return worst_rec <= 1e-10 and worst_orth <= 1e-10, f"reconstruction {worst_rec:.2e}, orthogonality {worst_orth:.2e}"


def check_exp_log_roundtrip(rng, size: SuiteSize) -> Tuple[bool, str]:
    # log(exp S) is only well conditioned for a bounded spectrum of S
    worst_el = worst_le = 0.0
    for _ in range(size.roundtrips):
        dim = _dims(rng, size)
        m = _random_spd(dim, rng, size.cond_max)
        worst_el = max(worst_el, _rel_frobenius(exp_sym(log_principal(m)).data, m.data))
        u = random_orthogonal(dim, rng)
        s = SymMatrix((u * rng.uniform(-1.0, 1.0, size=dim)) @ u.T)
        worst_le = max(worst_le, _rel_frobenius(log_principal(exp_sym(s)).data, s.data))
    return max(worst_el, worst_le) <= 1e-8, f"exp(log) {worst_el:.2e}, log(exp) {worst_le:.2e}"


def check_taylor_convergence(rng, size: SuiteSize) -> Tuple[bool, str]:
    """Error falls monotonically over orders 1, 3, 10, 40 inside radius 0.9; order 40 within 1e-8 up to radius 0.6."""
    failures = 0
    worst_tight = 0.0
    for i in range(size.samples):
        dim = _dims(rng, size)
        radius = 0.9 if i % 2 == 0 else 0.6
        shift = rng.uniform(-radius, radius, size=dim)
        shift[0] = radius * np.sign(shift[0] or 1.0)
        u = random_orthogonal(dim, rng)
        m = SymMatrix(np.eye(dim) + (u * shift) @ u.T)
        exact = log_principal(m).data
        errors = [np.linalg.norm(log_taylor(m, k).data - exact) for k in (1, 3, 10, 40)]
        if any(later >= earlier for earlier, later in zip(errors, errors[1:])):
            failures += 1
        if radius <= 0.6:
            worst_tight = max(worst_tight, errors[-1] / max(1.0, np.linalg.norm(exact)))
    return failures == 0 and worst_tight <= 1e-8, f"non-monotone {failures}, order-40 error at radius 0.6 {worst_tight:.2e}"


def check_trace_log(rng, size: SuiteSize) -> Tuple[bool, str]:
    worst = 0.0
    for _ in range(size.samples):
        m = _random_spd(_dims(rng, size), rng, size.cond_max)
        sign, reference = np.linalg.slogdet(m.data)
        value = float(np.trace(log_principal(m).data))
        worst = max(worst, abs(value - reference) / max(1.0, abs(reference)))
    return worst <= 1e-8, f"max deviation {worst:.2e}"


# density


def check_density_invariants(rng, size: SuiteSize) -> Tuple[bool, str]:
    worst_entropy = 0.0
    bound_violations = 0
    for _ in range(size.samples):
        dim = _dims(rng, size)
        d = from_gram_rows(rng.standard_normal((dim, int(rng.integers(1, dim + 3)))))
        h = von_neumann_entropy(d)
        if not -1e-12 <= h <= np.log(dim) + 1e-8:
            bound_violations += 1
        rotated = unitary_conjugate(d, random_orthogonal(dim, rng))
        worst_entropy = max(worst_entropy, abs(von_neumann_entropy(rotated) - h))
    ok = worst_entropy <= 1e-8 and bound_violations == 0
    return ok, f"entropy drift {worst_entropy:.2e}, bound violations {bound_violations}"


def check_induced_prob_identity(rng, size: SuiteSize) -> Tuple[bool, str]:
    worst = 0.0
    for _ in range(size.samples):
        k = _dims(rng, size)
        p = ProbVector(rng.dirichlet(np.ones(k)))
        basis = np.eye(k)
        a = induced_prob(diag_density(p), basis).p
        b = induced_prob(pure_density(p, basis), basis).p
        worst = max(worst, float(np.max(np.abs(a - p.p))), float(np.max(np.abs(b - p.p))))
    return worst <= 1e-10, f"max deviation {worst:.2e}"


def check_one_hot_spectrum(rng, size: SuiteSize) -> Tuple[bool, str]:
    worst = 0.0
    for _ in range(size.samples):
        b, k = int(rng.integers(1, 17)), int(rng.integers(1, 6))
        labels = rng.integers(0, k, size=b)
        d = from_gram_rows(PredictionBatch.one_hot(labels, k).rows)
        expected = np.zeros(b)
        singular = oracle_onehot_svd(labels.tolist(), b, k)
        expected[: len(singular)] = np.square(singular) / b
        worst = max(worst, float(np.max(np.abs(d.spectrum.eigenvalues - expected))))
    return worst <= 1e-10, f"max eigenvalue deviation {worst:.2e}"


# divergence


def check_unitary_invariance(rng, size: SuiteSize) -> Tuple[bool, str]:
    worst = 0.0
    for _ in range(size.samples):
        p, q = _density_pair(rng, size)
        u = random_orthogonal(p.dim, rng)
        rotated = mce(unitary_conjugate(p, u), unitary_conjugate(q, u), EXACT)
        worst = max(worst, abs(rotated - mce(p, q, EXACT)))
    return worst <= 1e-8, f"max deviation {worst:.2e}"


def check_minimization(rng, size: SuiteSize) -> Tuple[bool, str]:
    violations = 0
    for _ in range(max(1, size.perturbations // 20)):
        p = random_density(int(rng.integers(2, 17)), rng)
        at_p = mce(p, p, EXACT)
        for _ in range(20):
            q = random_density(p.dim, rng)
            if np.linalg.norm(p.data - q.data) > 1e-6 and not at_p < mce(p, q, EXACT):
                violations += 1
    return violations == 0, f"violations {violations}"


def check_stationarity(rng, size: SuiteSize) -> Tuple[bool, str]:
    """Trace-free part of dMCE/dQ vanishes at Q = P; nearby densities score strictly higher."""
    worst_grad = 0.0
    violations = 0
    rounds = max(1, size.perturbations // 20)
    for _ in range(rounds):
        dim = int(rng.integers(2, 17))
        p = random_density(dim, rng)
        g = mce_grad_q(p, p, EXACT).data
        tangent = g - np.trace(g) / dim * np.eye(dim)
        worst_grad = max(worst_grad, float(np.linalg.norm(tangent)))
        at_p = mce(p, p, EXACT)
        for _ in range(20):
            t = rng.uniform(0.01, 0.5)
            q = DensityMatrix(SymMatrix((1 - t) * p.data + t * random_density(dim, rng).data))
            if not at_p < mce(p, q, EXACT):
                violations += 1
    return worst_grad <= 1e-6 and violations == 0, f"tangent gradient {worst_grad:.2e}, violations {violations}"


def check_convexity(rng, size: SuiteSize) -> Tuple[bool, str]:
    violations = 0
    for _ in range(size.samples):
        p, q1 = _density_pair(rng, size)
        q2 = random_density(p.dim, rng)
        p2 = random_density(p.dim, rng)
        for t in np.arange(1, 10) / 10.0:
            mixed_q = SymMatrix(t * q1.data + (1 - t) * q2.data)
            rhs = t * mce(p, q1, EXACT) + (1 - t) * mce(p, q2, EXACT)
            if mce(p, mixed_q, EXACT) > rhs + 1e-10 * max(1.0, abs(rhs)):
                violations += 1
            mixed_p = DensityMatrix(SymMatrix(t * p.data + (1 - t) * p2.data))
            mixed_q_density = DensityMatrix(mixed_q)
            rhs = t * mre(p, q1, EXACT) + (1 - t) * mre(p2, q2, EXACT)
            if mre(mixed_p, mixed_q_density, EXACT) > rhs + 1e-10 * max(1.0, abs(rhs)):
                violations += 1
    return violations == 0, f"violations {violations}"


def check_linearity(rng, size: SuiteSize) -> Tuple[bool, str]:
    worst = 0.0
    for _ in range(size.samples):
        dim = int(rng.integers(2, 17))
        parts = [random_density(dim, rng) for _ in range(int(rng.integers(2, 5)))]
        weights = rng.dirichlet(np.ones(len(parts)))
        q = random_density(dim, rng)
        mixed = SymMatrix(sum(w * part.data for w, part in zip(weights, parts)))
        combined = sum(w * mce(part, q, EXACT) for w, part in zip(weights, parts))
        worst = max(worst, abs(mce(mixed, q, EXACT) - combined))
    return worst <= 1e-10, f"max deviation {worst:.2e}"


def check_lower_bound(rng, size: SuiteSize) -> Tuple[bool, str]:
    violations = 0
    for _ in range(size.pairs):
        p, q = _density_pair(rng, size)
        scaled = SymMatrix(q.data * rng.uniform(0.5, 2.0))
        if mce(p, scaled, EXACT) < mce_lower_bound(p, scaled) - 1e-10:
            violations += 1
    return violations == 0, f"violations {violations} of {size.pairs}"


def check_decomposition(rng, size: SuiteSize) -> Tuple[bool, str]:
    worst = 0.0
    for _ in range(size.samples):
        p, q = _density_pair(rng, size)
        lhs = mce_normalized(p, q, EXACT)
        rhs = von_neumann_entropy(p) + mre(p, q, EXACT) + 1.0
        worst = max(worst, abs(lhs - rhs))
    return worst <= 1e-8, f"max deviation {worst:.2e}"


def check_scalar_bridge(rng, size: SuiteSize) -> Tuple[bool, str]:
    worst = 0.0
    for _ in range(size.samples):
        b, k = int(rng.integers(1, 17)), int(rng.integers(2, 6))
        labels = rng.integers(0, k, size=b)
        mu = PredictionBatch.one_hot(labels, k).rows
        nu = _random_probs(b, k, rng)
        direct = -float(np.mean(np.log(nu[np.arange(b), labels])))
        worst = max(worst, abs(scalar_ce_bridge(mu, nu) - direct))
    return worst <= 1e-12, f"max deviation {worst:.2e}"


def check_pca_form(rng, size: SuiteSize) -> Tuple[bool, str]:
    worst = 0.0
    for _ in range(size.samples):
        p, q = _density_pair(rng, size)
        worst = max(worst, abs(mce_pca_form(p, q) - mce(p, q, EXACT)))
    return worst <= 1e-8, f"max deviation {worst:.2e}"


# relation


def check_relation_structure(rng, size: SuiteSize) -> Tuple[bool, str]:
    problems = 0
    for _ in range(size.samples):
        b, k = int(rng.integers(1, 17)), int(rng.integers(1, 6))
        soft = PredictionBatch(_random_probs(b, k, rng))
        if eig_sym(relation(soft)).eigenvalues[-1] < -1e-10:
            problems += 1
        labels = rng.integers(0, k, size=b)
        hard = PredictionBatch.one_hot(labels, k)
        expected = (labels[:, None] == labels[None, :]).astype(float)
        if not np.array_equal(relation(hard).data, expected):
            problems += 1
        DensityMatrix(relation_normalized(hard))
    return problems == 0, f"problems {problems}"


def check_goldens(rng=None, size: Optional[SuiteSize] = None) -> Tuple[bool, str]:
    mismatched = [
        name for name, (batch, expected) in GOLDENS.items()
        if not np.array_equal(relation(PredictionBatch(batch)).data, expected)
    ]
    return not mismatched, "all match" if not mismatched else f"mismatch: {', '.join(mismatched)}"


def gram_equality_counterexamples(b: int, k: int, grid_step: float) -> Tuple[int, int]:
    """(matches, counterexamples) over every one-hot Z1 and every grid Z2 with Z1 Z1^T == Z2 Z2^T."""
    grid = np.array(oracle_enumerate_simplex(k, grid_step))
    n = len(grid)
    inner = grid @ grid.T
    norms = np.diag(inner)
    one_hot_row = np.abs(grid.max(axis=1) - 1.0) <= GRAM_TOL

    all_one_hot = np.ones((n,) * b, dtype=bool)
    for i in range(b):
        shape = [1] * b
        shape[i] = n
        all_one_hot = all_one_hot & one_hot_row.reshape(shape)

    matches = counterexamples = 0
    for labels in itertools.product(range(k), repeat=b):
        target = (np.array(labels)[:, None] == np.array(labels)[None, :]).astype(float)
        equal = np.ones((n,) * b, dtype=bool)
        for i in range(b):
            shape = [1] * b
            shape[i] = n
            equal = equal & (np.abs(norms - target[i, i]) <= GRAM_TOL).reshape(shape)
            for j in range(i + 1, b):
                shape = [1] * b
                shape[i] = shape[j] = n
                equal = equal & (np.abs(inner - target[i, j]) <= GRAM_TOL).reshape(shape)
        matches += int(equal.sum())
        counterexamples += int(np.sum(equal & ~all_one_hot))

        hit = np.argwhere(equal)
        if hit.size:
            z1 = PredictionBatch.one_hot(labels, k)
            z2 = PredictionBatch(grid[hit[0]])
            if not check_one_hot_equality(z1, z2):
                counterexamples += 1
    return matches, counterexamples


def check_gram_equality_brute_force(rng=None, size: Optional[SuiteSize] = None) -> Tuple[bool, str]:
    total_matches = total_bad = 0
    for b in (1, 2, 3):
        for k in (1, 2, 3):
            matches, bad = gram_equality_counterexamples(b, k, 0.1)
            total_matches += matches
            total_bad += bad
    return total_bad == 0 and total_matches > 0, f"{total_matches} equal pairs, {total_bad} counterexamples"


# model and trainer


def certification_batch(seed: int = 0, d: int = 5, b: int = 8, k: int = 3):
    """Fixed inputs for the end-to-end gradient check: 3-layer MLP, labeled and unlabeled batches."""
    rng = np.random.default_rng(seed)
    model = Mlp.init([d, 7, 6, k], rng)
    x_sup = rng.standard_normal((4, d))
    y_sup = PredictionBatch.one_hot([0, 1, 2, 0], k)
    x_strong = rng.standard_normal((b, d))
    pseudo = PredictionBatch.one_hot(rng.integers(0, k, size=b), k)
    mask = np.array([True, True, False, True, True, True, False, True])[:b]
    return model, x_sup, y_sup, x_strong, pseudo, mask


def relationmatch_objective(model: Mlp, x_sup, y_sup, x_strong, pseudo, mask, cfg: TrainConfig):
    sup_probs, sup_cache = forward(model, x_sup)
    strong_probs, strong_cache = forward(model, x_strong)
    breakdown, grads = relationmatch_loss(y_sup, sup_probs, pseudo, strong_probs, mask, cfg)
    parameter_grads = backward(model, sup_cache, d_logits=grads.d_sup_logits) + backward(
        model, strong_cache, d_logits=grads.d_strong_logits
    )
    return breakdown.total, parameter_grads


def certify_gradients(mce_cfg: MceConfig, h: float = 1e-4, rtol: float = 1e-3, atol: float = 1e-7) -> Tuple[int, int]:
    """(failures, checked) comparing every parameter's analytic gradient with a central difference."""
    model, x_sup, y_sup, x_strong, pseudo, mask = certification_batch()
    cfg = TrainConfig(mu_u=1.0, gamma_u=1.0, mce=mce_cfg)
    _, grads = relationmatch_objective(model, x_sup, y_sup, x_strong, pseudo, mask, cfg)

    failures = checked = 0
    for param, grad in zip(model.parameters(), grads.as_list()):
        for index in np.ndindex(param.shape):
            original = param[index]
            param[index] = original + h
            plus, _ = relationmatch_objective(model, x_sup, y_sup, x_strong, pseudo, mask, cfg)
            param[index] = original - h
            minus, _ = relationmatch_objective(model, x_sup, y_sup, x_strong, pseudo, mask, cfg)
            param[index] = original
            numeric = (plus - minus) / (2.0 * h)
            analytic = grad[index]
            checked += 1
            if abs(numeric - analytic) > rtol * max(abs(numeric), abs(analytic)) + atol:
                failures += 1
    return failures, checked


def check_gradient_certification(rng=None, size: Optional[SuiteSize] = None) -> Tuple[bool, str]:
    details = []
    ok = True
    for mce_cfg in CERTIFY_BACKENDS:
        failures, checked = certify_gradients(mce_cfg)
        ok = ok and failures == 0
        details.append(f"{mce_cfg.spelling} {checked - failures}/{checked}")
    return ok, ", ".join(details)


def check_loss_decomposition(rng, size: SuiteSize) -> Tuple[bool, str]:
    worst = 0.0
    masked_leak = 0.0
    for _ in range(size.samples):
        b, k = int(rng.integers(2, 12)), 3
        cfg = TrainConfig(mu_u=rng.uniform(0, 2), gamma_u=rng.uniform(0, 1))
        y_sup = PredictionBatch.one_hot(rng.integers(0, k, size=4), k)
        sup = PredictionBatch(_random_probs(4, k, rng))
        weak = PredictionBatch(_random_probs(b, k, rng))
        strong = PredictionBatch(_random_probs(b, k, rng))
        mask, pseudo = pseudo_label(weak, 0.5)
        breakdown, grads = relationmatch_loss(y_sup, sup, pseudo, strong, mask, cfg)
        expected = breakdown.ce_sup + cfg.mu_u * (breakdown.ce_unsup + cfg.gamma_u * breakdown.mce)
        worst = max(worst, abs(breakdown.total - expected))
        if np.any(~mask):
            masked_leak = max(masked_leak, float(np.max(np.abs(grads.d_strong_logits[~mask]))))
    return worst <= 1e-10 and masked_leak == 0.0, f"identity {worst:.2e}, masked-row gradient {masked_leak:.2e}"


def check_no_gap_stationarity(rng, size: SuiteSize) -> Tuple[bool, str]:
    """Saturated predictions that equal their pseudo-labels get no MCE gradient."""
    cfg = MceConfig(log_backend=LogBackend.PRINCIPAL, ridge_lambda=1e-9)
    worst = 0.0
    for _ in range(size.samples):
        b, k = int(rng.integers(2, 12)), int(rng.integers(2, 5))
        labels = PredictionBatch.one_hot(rng.integers(0, k, size=b), k)
        _, d_probs = mce_term(labels, labels, cfg)
        worst = max(worst, float(np.linalg.norm(d_probs)))
    return worst <= 1e-6, f"max gradient norm {worst:.2e}"


def warmup_row_gradients(cfg: Optional[MceConfig] = None) -> Tuple[float, float]:
    """MCE gradient norm on the second strong row: systematic-confusion case, scattered case."""
    cfg = cfg or MceConfig(log_backend=LogBackend.PRINCIPAL, ridge_lambda=1e-9)
    weak = PredictionBatch(WARMUP_WEAK)
    norms = []
    for strong in (WARMUP_STRONG_SYSTEMATIC, WARMUP_STRONG_SCATTERED):
        _, d_probs = mce_term(weak, PredictionBatch(strong), cfg)
        norms.append(float(np.linalg.norm(d_probs[1])))
    return norms[0], norms[1]


def check_warmup_contrast(rng=None, size: Optional[SuiteSize] = None) -> Tuple[bool, str]:
    systematic, scattered = warmup_row_gradients()
    return systematic <= 1e-6 and scattered > 1e-3, f"row-2 gradient {systematic:.2e} vs {scattered:.2e}"


def check_cpl_disabled(rng, size: SuiteSize) -> Tuple[bool, str]:
    mismatches = 0
    for _ in range(size.samples):
        batch = PredictionBatch(_random_probs(int(rng.integers(1, 30)), int(rng.integers(2, 6)), rng))
        tau = float(rng.uniform(0.3, 1.0))
        mask, labels = pseudo_label(batch, tau)
        if not np.array_equal(mask, batch.rows.max(axis=1) >= tau) or not np.array_equal(labels.classes(), batch.classes()):
            mismatches += 1
    return mismatches == 0, f"mismatches {mismatches}"


CHECKS: Sequence[Tuple[str, Callable]] = (
    ("goldens", check_goldens),
    ("eig_reconstruction", check_eig_reconstruction),
    ("exp_log_roundtrip", check_exp_log_roundtrip),
    ("taylor_convergence", check_taylor_convergence),
    ("trace_log", check_trace_log),
    ("density_invariants", check_density_invariants),
    ("induced_prob_identity", check_induced_prob_identity),
    ("one_hot_spectrum", check_one_hot_spectrum),
    ("unitary_invariance", check_unitary_invariance),
    ("minimization", check_minimization),
    ("stationarity", check_stationarity),
    ("convexity", check_convexity),
    ("linearity", check_linearity),
    ("lower_bound", check_lower_bound),
    ("decomposition", check_decomposition),
    ("scalar_bridge", check_scalar_bridge),
    ("pca_form", check_pca_form),
    ("relation_structure", check_relation_structure),
    ("gram_equality_brute_force", check_gram_equality_brute_force),
    ("gradient_certification", check_gradient_certification),
    ("loss_decomposition", check_loss_decomposition),
    ("no_gap_stationarity", check_no_gap_stationarity),
    ("warmup_contrast", check_warmup_contrast),
    ("cpl_disabled", check_cpl_disabled),
)


def run_suite(size: SuiteSize = FULL, seed: int = 0, only: Optional[Sequence[str]] = None) -> List[PropertyResult]:
    """Run every check (or the named ones); an exception counts as a failure."""
    results = []
    for position, (name, check) in enumerate(CHECKS):
        if only and name not in only:
            continue
        rng = np.random.default_rng([seed, position])
        started = time.perf_counter()
        try:
            passed, detail = check(rng, size)
        except Exception as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        elapsed = time.perf_counter() - started
        logger.debug("%s: %s (%.2fs)", name, detail, elapsed)
        results.append(PropertyResult(name, passed, detail, elapsed))
    return results
