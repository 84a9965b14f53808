"""
Matrix cross-entropy and its relatives: matrix relative entropy, the matrix
Bregman divergence, the scalar cross-entropy bridge, the trace lower bound,
the eigen-expansion form, and gradients of MCE in its second argument.
"""

import enum
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from density import DensityMatrix
from errors import ConfigError, ContractError, DomainError, PositiveDefinitenessError
from spectral import (
    EPS_PD,
    SymMatrix,
    eig_sym,
    log_elementwise,
    log_principal,
    log_taylor,
)

Matrix = Union[SymMatrix, DensityMatrix]

BRIDGE_TOL = 1e-12


class LogBackend(enum.Enum):
    PRINCIPAL = "principal"
    TAYLOR = "taylor"
    ELEMENTWISE = "elementwise"


@dataclass(frozen=True)
class MceConfig:
    log_backend: LogBackend = LogBackend.TAYLOR
    taylor_order: int = 3
    elementwise_eps: float = 1e-8
    ridge_lambda: float = 1e-6

    def __post_init__(self):
        if not isinstance(self.log_backend, LogBackend):
            try:
                object.__setattr__(self, "log_backend", LogBackend(self.log_backend))
            except ValueError:
                raise ConfigError(f"unknown log backend {self.log_backend!r}") from None
        if int(self.taylor_order) != self.taylor_order or self.taylor_order < 1:
            raise ConfigError(f"taylor_order must be >= 1, got {self.taylor_order}")
        object.__setattr__(self, "taylor_order", int(self.taylor_order))
        if self.ridge_lambda < 0:
            raise ConfigError(f"ridge_lambda must be >= 0, got {self.ridge_lambda}")
        if self.elementwise_eps <= 0:
            raise ConfigError(f"elementwise_eps must be > 0, got {self.elementwise_eps}")

    @classmethod
    def parse(cls, spelling: str, **overrides) -> "MceConfig":
        """Build from the CLI spelling: principal, taylor3, taylorK or elementwise."""
        spelling = spelling.strip().lower()
        if spelling == "principal":
            return cls(log_backend=LogBackend.PRINCIPAL, **overrides)
        if spelling == "elementwise":
            return cls(log_backend=LogBackend.ELEMENTWISE, **overrides)
        match = re.fullmatch(r"taylor(\d+)", spelling)
        if match:
            return cls(log_backend=LogBackend.TAYLOR, taylor_order=int(match.group(1)), **overrides)
        raise ConfigError(f"unknown log backend {spelling!r}")

    @property
    def spelling(self) -> str:
        if self.log_backend is LogBackend.TAYLOR:
            return f"taylor{self.taylor_order}"
        return self.log_backend.value


def _sym(m: Matrix) -> SymMatrix:
    if isinstance(m, DensityMatrix):
        return m.inner
    if isinstance(m, SymMatrix):
        return m
    return SymMatrix(m)


def _ridged(m: SymMatrix, ridge: float) -> SymMatrix:
    if ridge == 0:
        return m
    return SymMatrix(m.data + ridge * np.eye(m.dim))


def matrix_log(q: Matrix, cfg: MceConfig) -> SymMatrix:
    """Backend logarithm of q + lambda I."""
    q = _ridged(_sym(q), cfg.ridge_lambda)
    if cfg.log_backend is LogBackend.PRINCIPAL:
        return log_principal(q)
    if cfg.log_backend is LogBackend.TAYLOR:
        return log_taylor(q, cfg.taylor_order)
    return log_elementwise(q, cfg.elementwise_eps)


def _inner(a: SymMatrix, b: SymMatrix) -> float:
    """tr(a b) for symmetric a, b."""
    if a.dim != b.dim:
        raise ContractError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return float(np.sum(a.data * b.data))


def mce_linear_part(p: Matrix, q: Matrix, cfg: MceConfig) -> float:
    """tr(-p log(q + lambda I))."""
    return -_inner(_sym(p), matrix_log(q, cfg))


def mce(p: Matrix, q: Matrix, cfg: MceConfig) -> float:
    """tr(-p log(q + lambda I) + q)."""
    q = _sym(q)
    return mce_linear_part(p, q, cfg) + float(np.trace(q.data))


def mce_normalized(p: DensityMatrix, q: DensityMatrix, cfg: MceConfig) -> float:
    """Unit-trace form tr(-p log(q + lambda I)) + 1."""
    return mce_linear_part(p, q, cfg) + 1.0


def mre(p: DensityMatrix, q: DensityMatrix, cfg: MceConfig) -> float:
    """tr(p log p - p log q), ridge on both logarithms."""
    p = _sym(p)
    return _inner(p, matrix_log(p, cfg)) - _inner(p, matrix_log(q, cfg))


def matrix_bregman(p: Matrix, q: Matrix, cfg: MceConfig) -> float:
    """tr(p log p - p log q - p + q)."""
    p, q = _sym(p), _sym(q)
    return (
        _inner(p, matrix_log(p, cfg))
        - _inner(p, matrix_log(q, cfg))
        - float(np.trace(p.data))
        + float(np.trace(q.data))
    )


def scalar_ce_bridge(mu, nu) -> float:
    """Mean scalar cross-entropy written as tr(-P log Q), P = I/b, Q = I o (M N^T)."""
    mu = np.atleast_2d(np.asarray(mu, dtype=float))
    nu = np.atleast_2d(np.asarray(nu, dtype=float))
    if mu.shape != nu.shape:
        raise ContractError(f"shape mismatch: {mu.shape} vs {nu.shape}")
    one_hot = np.all((mu == 0) | (mu == 1), axis=1) & (mu.sum(axis=1) == 1)
    if not np.all(one_hot):
        raise ContractError("mu rows must be one-hot")

    b = mu.shape[0]
    diagonal = np.diag(mu @ nu.T)
    if np.any(diagonal <= 0):
        raise DomainError(f"diagonal of M N^T has non-positive entry {diagonal.min():.3e}")

    p = SymMatrix(np.eye(b) / b)
    q = SymMatrix(np.diag(diagonal))
    try:
        value = -_inner(p, log_principal(q))
    except PositiveDefinitenessError as exc:
        raise DomainError(str(exc)) from exc

    direct = -float(np.mean(np.log(nu[np.arange(b), mu.argmax(axis=1)])))
    if abs(value - direct) > BRIDGE_TOL * max(1.0, abs(direct)):
        raise ContractError(f"matrix path {value!r} disagrees with scalar path {direct!r}")
    return value


def mce_lower_bound(p: DensityMatrix, q: Matrix) -> float:
    """-log tr(p q) + tr(q)."""
    q = _sym(q)
    overlap = _inner(_sym(p), q)
    if overlap <= 0:
        raise DomainError(f"tr(PQ) = {overlap:.3e} must be positive")
    return -float(np.log(overlap)) + float(np.trace(q.data))


def mce_pca_form(p: Matrix, q: Matrix) -> float:
    """-sum_ij (v_i . u_j)^2 lambda_i log theta_j + sum_j theta_j."""
    sp = eig_sym(_sym(p))
    sq = eig_sym(_sym(q))
    theta = sq.eigenvalues
    if theta[-1] <= EPS_PD:
        raise PositiveDefinitenessError(float(theta[-1]), EPS_PD)
    overlap = (sp.eigenvectors.T @ sq.eigenvectors) ** 2
    return float(-(sp.eigenvalues @ overlap @ np.log(theta)) + np.sum(theta))


def _log_divided_differences(theta: np.ndarray) -> np.ndarray:
    """Gamma_ij = (log theta_i - log theta_j) / (theta_i - theta_j), Gamma_ii = 1 / theta_i."""
    ti, tj = theta[:, None], theta[None, :]
    diff = ti - tj
    same = diff == 0
    safe = np.where(same, 1.0, diff)
    gamma = np.log1p(diff / tj) / safe
    return np.where(same, 1.0 / tj, gamma)


def mce_grad_q(p: Matrix, q: Matrix, cfg: MceConfig) -> SymMatrix:
    """Gradient of mce(p, q, cfg) with respect to q; the ridge is treated as a constant."""
    p, q = _sym(p), _sym(q)
    n = q.dim
    ridged = _ridged(q, cfg.ridge_lambda)

    if cfg.log_backend is LogBackend.PRINCIPAL:
        spectrum = eig_sym(ridged)
        theta = spectrum.eigenvalues
        if theta[-1] <= EPS_PD:
            raise PositiveDefinitenessError(float(theta[-1]), EPS_PD)
        u = spectrum.eigenvectors
        inner = (u.T @ p.data @ u) * _log_divided_differences(theta)
        return SymMatrix(-(u @ inner @ u.T) + np.eye(n))

    if cfg.log_backend is LogBackend.TAYLOR:
        # d tr(P M^k) = sum_j M^j P M^(k-1-j) for symmetric M, P
        m = ridged.data - np.eye(n)
        powers = [np.eye(n)]
        for _ in range(cfg.taylor_order - 1):
            powers.append(powers[-1] @ m)
        grad = np.zeros((n, n))
        for k in range(1, cfg.taylor_order + 1):
            coef = (-1.0) ** (k + 1) / k
            for j in range(k):
                grad += coef * (powers[j] @ p.data @ powers[k - 1 - j])
        return SymMatrix(-grad + np.eye(n))

    eps = cfg.elementwise_eps
    inside = ridged.data > eps
    grad = np.where(inside, -p.data / np.where(inside, ridged.data, 1.0), 0.0)
    return SymMatrix(grad + np.eye(n))
