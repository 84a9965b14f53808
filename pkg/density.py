"""
Density matrices: constructions from probability vectors and Gram matrices,
induced distributions, von Neumann entropy and purity.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from errors import BasisError, DegenerateInputError, DensityError
from spectral import Spectrum, SymMatrix, eig_sym, trace

PSD_SLACK = 1e-10
TRACE_TOL = 1e-10
BASIS_TOL = 1e-10


@dataclass(frozen=True)
class DensityMatrix:
    """Symmetric PSD matrix with unit trace. Validated once, at construction."""

    inner: SymMatrix
    spectrum: Spectrum = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.inner, SymMatrix):
            object.__setattr__(self, "inner", SymMatrix(self.inner))
        tr = trace(self.inner)
        if abs(tr - 1.0) > TRACE_TOL:
            raise DensityError(f"trace {tr!r} is not 1")
        spectrum = eig_sym(self.inner)
        if spectrum.eigenvalues[-1] < -PSD_SLACK:
            raise DensityError(f"negative eigenvalue {spectrum.eigenvalues[-1]:.3e}")
        object.__setattr__(self, "spectrum", spectrum)

    @property
    def dim(self) -> int:
        return self.inner.dim

    @property
    def data(self) -> np.ndarray:
        return self.inner.data


@dataclass(frozen=True)
class ProbVector:
    p: np.ndarray

    def __post_init__(self):
        arr = np.array(self.p, dtype=float).reshape(-1)
        if arr.size == 0:
            raise DensityError("empty probability vector")
        if np.any(arr < 0):
            raise DensityError(f"negative probability {arr.min():.3e}")
        if abs(arr.sum() - 1.0) > TRACE_TOL:
            raise DensityError(f"probabilities sum to {arr.sum()!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "p", arr)

    @property
    def k(self) -> int:
        return self.p.size


def _gram_density(gram: np.ndarray) -> DensityMatrix:
    tr = float(np.trace(gram))
    if tr == 0.0:
        raise DegenerateInputError("Gram matrix of an all-zero input has zero trace")
    return DensityMatrix(SymMatrix(gram / tr))


def from_gram_rows(a) -> DensityMatrix:
    """A A^T / tr(A A^T)."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    return _gram_density(a @ a.T)


def from_gram_cols(a) -> DensityMatrix:
    """A^T A / tr(A^T A)."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    return _gram_density(a.T @ a)


def _check_orthonormal(basis: np.ndarray, square: bool = True) -> np.ndarray:
    basis = np.asarray(basis, dtype=float)
    if basis.ndim != 2 or (square and basis.shape[0] != basis.shape[1]):
        raise BasisError(f"expected a square basis matrix, got shape {basis.shape}")
    deviation = np.max(np.abs(basis.T @ basis - np.eye(basis.shape[1])))
    if deviation > BASIS_TOL:
        raise BasisError(f"columns are not orthonormal (max deviation {deviation:.3e})")
    return basis


def diag_density(p: ProbVector) -> DensityMatrix:
    return DensityMatrix(SymMatrix.diag(p.p))


def pure_density(p: ProbVector, basis) -> DensityMatrix:
    """psi psi^T with psi = sum_i sqrt(p_i) x_i."""
    basis = _check_orthonormal(basis)
    if basis.shape[0] != p.k:
        raise BasisError(f"basis has dimension {basis.shape[0]}, distribution has {p.k}")
    psi = basis @ np.sqrt(p.p)
    return DensityMatrix(SymMatrix(np.outer(psi, psi)))


def induced_prob(d: DensityMatrix, basis) -> ProbVector:
    """p_i = x_i^T d x_i over the columns of an orthonormal basis."""
    basis = _check_orthonormal(basis)
    p = np.einsum("ji,jk,ki->i", basis, d.data, basis)
    p = np.where((p < 0) & (p > -PSD_SLACK), 0.0, p)
    return ProbVector(p)


def _clamped_eigenvalues(d: DensityMatrix) -> np.ndarray:
    lam = np.array(d.spectrum.eigenvalues)
    lam[(lam <= 0) & (lam > -PSD_SLACK)] = 0.0
    return lam


def von_neumann_entropy(d: DensityMatrix) -> float:
    """-sum lambda log lambda in nats, with 0 log 0 = 0."""
    lam = _clamped_eigenvalues(d)
    positive = lam[lam > 0]
    return float(-np.sum(positive * np.log(positive)))


def is_pure(d: DensityMatrix, tol: float = 1e-8) -> bool:
    lam = d.spectrum.eigenvalues
    return bool(abs(lam[0] - 1.0) <= tol and np.all(np.abs(lam[1:]) <= tol))


def rank(d: DensityMatrix, tol: float = 1e-10) -> int:
    return int(np.sum(d.spectrum.eigenvalues > tol))


def unitary_conjugate(d: DensityMatrix, u) -> DensityMatrix:
    u = _check_orthonormal(u)
    if u.shape[0] != d.dim:
        raise BasisError(f"transform has dimension {u.shape[0]}, matrix has {d.dim}")
    return DensityMatrix(SymMatrix(u @ d.data @ u.T))


def random_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix from the QR of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.where(np.diag(r) < 0, -1.0, 1.0)


def random_density(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> DensityMatrix:
    """Random density matrix of the given rank (full rank by default)."""
    width = dim + 2 if rank is None else rank
    return from_gram_rows(rng.standard_normal((dim, width)))
