"""Dense Hermitian linear algebra: validation, eigendecomposition, spectral
matrix functions, tensor products, partial traces and seeded random ensembles.

Every matrix function goes through :class:`SpectralDecomposition`, so a
:class:`PsdMatrix` computes its eigenbasis once and reuses it.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import ConvergenceError, DomainError

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-9
SUPPORT_TOL = 1e-12
DEGENERACY_TOL = 1e-8
TINY_FLOOR = 1e-300

__all__ = [
    "SpectralDecomposition", "PsdMatrix", "DensityMatrix", "TripartiteState",
    "RandomEnsembleConfig", "as_matrix", "as_hermitian", "as_psd", "as_density",
    "hermitian_eig", "matrix_function", "matrix_power", "matrix_log",
    "matrix_exp", "matrix_sqrt", "kron", "hs_inner", "partial_trace",
    "partial_trace_array", "random_sample", "derive_rng", "random_pd",
]


def _hash(a: np.ndarray) -> str:
    return hashlib.sha1(np.ascontiguousarray(a).tobytes()).hexdigest()[:12]


def as_matrix(x) -> np.ndarray:
    """Return ``x`` as a square, finite complex array (a copy)."""
    if isinstance(x, PsdMatrix):
        return x.matrix
    a = np.array(x, dtype=complex, ndmin=2)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    return a


def as_hermitian(x, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate Hermiticity and return the symmetrized form (H + H†)/2."""
    a = as_matrix(x)
    dev = np.max(np.abs(a - a.conj().T), initial=0.0)
    if dev > tol * max(1.0, np.max(np.abs(a), initial=0.0)):
        raise DomainError(f"matrix is not Hermitian (max |H - H^dag| = {dev:.3g})")
    return (a + a.conj().T) / 2


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def apply(self, values) -> np.ndarray:
        """U diag(values) U† for per-eigenvalue ``values``."""
        U = self.eigenvectors
        return (U * values) @ U.conj().T

    def reconstruct(self) -> np.ndarray:
        return self.apply(self.eigenvalues)

    def to_basis(self, X: np.ndarray) -> np.ndarray:
        U = self.eigenvectors
        return U.conj().T @ X @ U

    def degeneracy_groups(self, tol: float = DEGENERACY_TOL) -> list[list[int]]:
        """Index groups of consecutive eigenvalues closer than ``tol`` (relative)."""
        lam = self.eigenvalues
        groups: list[list[int]] = []
        for i, v in enumerate(lam):
            if groups:
                prev = lam[groups[-1][-1]]
                if abs(v - prev) <= tol * max(abs(v), abs(prev), TINY_FLOOR):
                    groups[-1].append(i)
                    continue
            groups.append([i])
        return groups


def hermitian_eig(H) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    a = as_hermitian(H)
    try:
        w, U = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(
            f"eigensolver failed for {a.shape[0]}x{a.shape[0]} matrix "
            f"(sha1 {_hash(a)}): {exc}") from exc
    return SpectralDecomposition(w, U)


@dataclass(frozen=True, eq=False)
class PsdMatrix:
    """A validated positive semi-definite matrix with its eigendecomposition.

    Construct through :func:`as_psd`; eigenvalues slightly below zero
    (``>= -psd_tol * lambda_max``) are clamped to 0.
    """

    matrix: np.ndarray
    spectrum: SpectralDecomposition = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.spectrum.eigenvectors

    @cached_property
    def trace(self) -> float:
        return float(np.sum(self.eigenvalues))

    def support_mask(self, tol: float = SUPPORT_TOL) -> np.ndarray:
        lam = self.eigenvalues
        return lam > tol * max(lam[-1], TINY_FLOOR)

    def support_projector(self, tol: float = SUPPORT_TOL) -> np.ndarray:
        return self.spectrum.apply(self.support_mask(tol).astype(float))

    def is_definite(self, tol: float = SUPPORT_TOL) -> bool:
        return bool(np.all(self.support_mask(tol)))

    def scaled(self, mu: float) -> "PsdMatrix":
        if mu < 0:
            raise DomainError("PSD matrices can only be scaled by mu >= 0")
        spec = SpectralDecomposition(mu * self.eigenvalues, self.eigenvectors)
        return type(self)(mu * self.matrix, spec)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


class DensityMatrix(PsdMatrix):
    """A PSD matrix with unit trace."""


def as_psd(x, tol: float = PSD_TOL) -> PsdMatrix:
    if isinstance(x, PsdMatrix):
        return x
    a = as_hermitian(x)
    spec = hermitian_eig(a)
    lam = spec.eigenvalues
    top = max(lam[-1], 0.0)
    if lam[0] < -tol * (top if top > 0 else 1.0):
        raise DomainError(f"matrix is not PSD (min eigenvalue {lam[0]:.3g}, max {top:.3g})")
    if lam[0] < 0:
        lam = np.clip(lam, 0.0, None)
        spec = SpectralDecomposition(lam, spec.eigenvectors)
        a = spec.reconstruct()
    return PsdMatrix(a, spec)


def as_density(x, tol: float = TRACE_TOL) -> DensityMatrix:
    p = as_psd(x)
    if abs(p.trace - 1.0) > tol:
        raise DomainError(f"density matrix must have unit trace (got {p.trace:.12g})")
    if isinstance(p, DensityMatrix):
        return p
    return DensityMatrix(p.matrix, p.spectrum)


# --- spectral calculus -------------------------------------------------------

def matrix_power(A, z: complex, *, zero_power: str = "error") -> np.ndarray:
    """A**z via the principal branch on positive eigenvalues.

    Eigenvalues at or below ``SUPPORT_TOL * lambda_max`` count as zero and
    map to 0 when Re z > 0. For Re z <= 0 they are
    rejected unless ``zero_power="support"`` (0**z := 0, so A**0 is the
    support projector) or ``"identity"`` (0**0 := 1, only for z == 0).
    """
    A = as_psd(A)
    lam = A.eigenvalues
    pos = A.support_mask()
    vals = np.zeros(len(lam), dtype=complex if np.iscomplexobj(z) else float)
    vals[pos] = np.exp(z * np.log(lam[pos]))
    if not np.all(pos) and np.real(z) <= 0:
        if zero_power == "support":
            pass
        elif zero_power == "identity" and z == 0:
            vals[~pos] = 1.0
        else:
            raise DomainError(f"power {z} of a singular matrix is undefined")
    return A.spectrum.apply(vals)


def matrix_sqrt(A) -> np.ndarray:
    A = as_psd(A)
    return A.spectrum.apply(np.sqrt(A.eigenvalues))


def matrix_log(A, *, restrict: bool = False, tol: float = SUPPORT_TOL) -> np.ndarray:
    """Matrix logarithm of a PSD matrix.

    With ``restrict=True`` the log is taken on the support and the kernel
    block is left at zero; otherwise a singular input is a DomainError.
    """
    A = as_psd(A)
    mask = A.support_mask(tol)
    if not np.all(mask) and not restrict:
        raise DomainError("log of a singular matrix (pass restrict=True to act on the support)")
    vals = np.zeros(A.dim)
    vals[mask] = np.log(A.eigenvalues[mask])
    return A.spectrum.apply(vals)


def matrix_exp(H) -> np.ndarray:
    spec = H.spectrum if isinstance(H, PsdMatrix) else hermitian_eig(H)
    return spec.apply(np.exp(spec.eigenvalues))


def matrix_function(A, tag: str, *, exponent: complex | None = None,
                    restrict: bool = False) -> np.ndarray:
    """Dispatch on ``tag`` in {"power", "log", "exp", "sqrt"}."""
    if tag == "power":
        if exponent is None:
            raise DomainError("power needs an exponent")
        return matrix_power(A, exponent)
    if tag == "log":
        return matrix_log(A, restrict=restrict)
    if tag == "exp":
        return matrix_exp(A)
    if tag == "sqrt":
        return matrix_sqrt(A)
    raise DomainError(f"unknown matrix function {tag!r}")


# --- products and traces ------------------------------------------------------

def kron(A, B) -> np.ndarray:
    return np.kron(as_matrix(A), as_matrix(B))


def hs_inner(X, Y) -> complex:
    """Hilbert-Schmidt inner product Tr X†Y."""
    X, Y = np.asarray(X), np.asarray(Y)
    if X.shape != Y.shape:
        raise DomainError(f"shape mismatch {X.shape} vs {Y.shape}")
    return complex(np.vdot(X, Y))


def partial_trace_array(rho: np.ndarray, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every tensor factor not listed in ``keep`` (1-based)."""
    dims = tuple(int(d) for d in dims)
    rho = np.asarray(rho)
    n = int(np.prod(dims))
    if rho.shape != (n, n):
        raise DomainError(f"dims {dims} inconsistent with matrix shape {rho.shape}")
    keep = sorted(set(keep))
    if not keep or keep[0] < 1 or keep[-1] > len(dims):
        raise DomainError(f"keep must be a non-empty subset of 1..{len(dims)}")
    k = len(dims)
    t = rho.reshape(dims + dims)
    row = list(range(k))
    col = [k + i if (i + 1) in keep else i for i in range(k)]
    out = [i - 1 for i in keep] + [k + i - 1 for i in keep]
    res = np.einsum(t, row + col, out)
    m = int(np.prod([dims[i - 1] for i in keep]))
    return res.reshape(m, m)


@dataclass(frozen=True, eq=False)
class TripartiteState:
    rho: DensityMatrix
    dims: tuple[int, int, int]

    def __post_init__(self):
        if len(self.dims) != 3 or min(self.dims) < 1:
            raise DomainError(f"need three positive factor dimensions, got {self.dims}")
        if int(np.prod(self.dims)) != self.rho.dim:
            raise DomainError(f"dims {self.dims} do not match matrix dimension {self.rho.dim}")

    @classmethod
    def from_array(cls, rho, dims) -> "TripartiteState":
        return cls(as_density(rho), tuple(int(d) for d in dims))


def partial_trace(s: TripartiteState, keep) -> DensityMatrix:
    return as_density(partial_trace_array(s.rho.matrix, s.dims, keep))


# --- random ensembles -----------------------------------------------------------

KINDS = ("hermitian-gaussian", "psd-wishart", "density-pure", "density-mixed",
         "general-gaussian", "block-diagonal")


@dataclass(frozen=True)
class RandomEnsembleConfig:
    dim: int
    kind: str
    seed: int = 0
    rank: int | None = None
    index: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown ensemble kind {self.kind!r}")
        if self.dim < 1:
            raise DomainError("dim must be positive")
        if self.rank is not None and not 1 <= self.rank <= self.dim:
            raise DomainError("wishart rank must satisfy 1 <= r <= dim")
        if self.kind == "block-diagonal" and self.dim % 2:
            raise DomainError("block-diagonal ensemble needs an even dimension")


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Generator for object ``keys`` under ``seed``; independent of call order."""
    ss = np.random.SeedSequence(int(seed) % 2**64, spawn_key=tuple(int(k) for k in keys))
    return np.random.default_rng(ss)


def ginibre(rng: np.random.Generator, n: int, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    return (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2)


def random_hermitian(rng, n) -> np.ndarray:
    g = ginibre(rng, n)
    return (g + g.conj().T) / 2


def random_wishart(rng, n, rank=None) -> np.ndarray:
    g = ginibre(rng, n, n if rank is None else rank)
    return g @ g.conj().T / n


def random_unitary(rng, n) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(rng, n))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_pd(rng, n, max_cond: float = 1e6) -> PsdMatrix:
    """Full-rank Wishart sample with eigenvalues clipped to condition <= max_cond."""
    spec = hermitian_eig(random_wishart(rng, n))
    lam = np.maximum(spec.eigenvalues, spec.eigenvalues[-1] / max_cond)
    spec = SpectralDecomposition(lam, spec.eigenvectors)
    return PsdMatrix(spec.reconstruct(), spec)


def random_density(rng, n, rank=None) -> DensityMatrix:
    w = random_wishart(rng, n, rank)
    return as_density(w / np.trace(w).real)


def random_sample(cfg: RandomEnsembleConfig):
    """Draw one matrix of ``cfg.kind``; a pure function of the config."""
    rng = derive_rng(cfg.seed, KINDS.index(cfg.kind), cfg.dim, cfg.index)
    n = cfg.dim
    if cfg.kind == "hermitian-gaussian":
        return random_hermitian(rng, n)
    if cfg.kind == "general-gaussian":
        return ginibre(rng, n)
    if cfg.kind == "psd-wishart":
        return as_psd(random_wishart(rng, n, cfg.rank))
    if cfg.kind == "density-mixed":
        return random_density(rng, n, cfg.rank)
    if cfg.kind == "density-pure":
        v = ginibre(rng, n, 1)[:, 0]
        v /= np.linalg.norm(v)
        return as_density(np.outer(v, v.conj()))
    # block-diagonal: two Wishart blocks, total trace one
    h = n // 2
    out = np.zeros((n, n), dtype=complex)
    out[:h, :h] = random_wishart(rng, h)
    out[h:, h:] = random_wishart(rng, h)
    return as_density(out / np.trace(out).real)
