"""Non-commutative multiplication and division superoperators.

Every operator here is diagonal in the product eigenbasis of its base
matrices: for A = U diag(a) U† and B = V diag(b) V† it acts as

    K  ->  U (Phi * (U† K V)) V†,    Phi[i, j] = phi(a_i, b_j).

The integral representations that define these operators are kept as
``*_quad`` functions, evaluated by adaptive quadrature with explicit
resolvents, and serve as independent oracles for the kernel route.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from .errors import DomainError, QuadratureError
from .linalg import (
    DEGENERACY_TOL,
    TINY_FLOOR,
    SpectralDecomposition,
    as_hermitian,
    as_matrix,
    as_psd,
    hermitian_eig,
)

KERNELS = ("omega", "omega_inv", "left_mult", "right_mult",
           "resolvent_pair", "sum_inv", "recip_sum")
_NEEDS_POSITIVE = {"omega_inv", "resolvent_pair", "sum_inv", "recip_sum"}

# relative spread below which the three-point log kernel switches to its
# Taylor series about the mean
_SERIES_SPREAD = 1e-3
_SERIES_TERMS = 10


# --- scalar kernels -------------------------------------------------------------

def _close(a, b, tol=DEGENERACY_TOL):
    return np.abs(a - b) <= tol * np.maximum(np.maximum(a, b), TINY_FLOOR)


def log_divdiff(a, b):
    """(ln a - ln b) / (a - b) elementwise, with confluent value 1/a."""
    a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
    d = a - b
    close = _close(a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        far = np.log1p(d / b) / d
    return np.where(close, 2.0 / (a + b), far)


def logmean(a, b):
    """Logarithmic mean (a - b) / (ln a - ln b), with L(a, a) = a and L(0, b) = 0."""
    a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
    zero = (a <= 0) | (b <= 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 1.0 / log_divdiff(np.where(zero, 1.0, a), np.where(zero, 1.0, b))
    return np.where(zero, 0.0, out)


def exp_divdiff(x, y):
    """(e^x - e^y) / (x - y) elementwise, with confluent value e^x."""
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    d = x - y
    close = np.abs(d) <= DEGENERACY_TOL * np.maximum(1.0, np.maximum(abs(x), abs(y)))
    with np.errstate(divide="ignore", invalid="ignore"):
        far = np.exp(y) * np.expm1(d) / d
    return np.where(close, np.exp((x + y) / 2), far)


def log_divdiff2_neg(a, b, c):
    """Integral of du / ((a+u)(b+u)(c+u)) over [0, inf), i.e. -[a, b, c] ln.

    Widely spread arguments use the recursive divided difference over the
    outermost pair; nearly coincident ones use the Taylor series about the
    mean, which covers the confluent limits 1/(2a^2) exactly.
    """
    a, b, c = np.broadcast_arrays(*(np.asarray(v, float) for v in (a, b, c)))
    s = np.sort(np.stack([a, b, c]), axis=0)
    lo, mid, hi = s
    m = (a + b + c) / 3
    series = (hi - lo) <= _SERIES_SPREAD * m

    with np.errstate(divide="ignore", invalid="ignore"):
        far = (log_divdiff(lo, mid) - log_divdiff(mid, hi)) / (hi - lo)

    # complete homogeneous polynomials h_k of the relative offsets
    d = s / np.where(m > 0, m, 1.0) - 1.0
    e1 = d.sum(axis=0)
    e2 = d[0] * d[1] + d[0] * d[2] + d[1] * d[2]
    e3 = d[0] * d[1] * d[2]
    h = [np.ones_like(m), e1, e1 * e1 - e2]
    total = h[0] / 2 - h[1] / 3 + h[2] / 4
    for k in range(3, _SERIES_TERMS):
        h.append(e1 * h[-1] - e2 * h[-2] + e3 * h[-3])
        total = total + (-1) ** k * h[-1] / (k + 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        near = total / (m * m)
    return np.where(series, near, far)


# --- kernel operators -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class KernelOperator:
    """Superoperator with entrywise kernel ``phi(a_i, b_j)`` in the eigenbases.

    ``right`` defaults to ``left`` (single-matrix kernels). With
    ``restrict=True`` singular spectra are allowed: the operator acts on the
    supports only, and inputs must vanish off them.
    """

    kind: str
    left: SpectralDecomposition
    right: SpectralDecomposition | None = None
    t: float = 0.0
    restrict: bool = False
    support_tol: float = 1e-12

    def __post_init__(self):
        if self.kind not in KERNELS:
            raise DomainError(f"unknown kernel {self.kind!r}")
        if self.t < 0:
            raise DomainError("resolvent parameter t must be >= 0")

    @property
    def _right(self) -> SpectralDecomposition:
        return self.left if self.right is None else self.right

    def _masks(self):
        a, b = self.left.eigenvalues, self._right.eigenvalues
        top = max(a[-1], b[-1], TINY_FLOOR)
        return a > self.support_tol * top, b > self.support_tol * top

    def kernel(self) -> np.ndarray:
        a = self.left.eigenvalues[:, None]
        b = self._right.eigenvalues[None, :]
        ma, mb = self._masks()
        if self.kind in _NEEDS_POSITIVE and not (ma.all() and mb.all()):
            if not self.restrict:
                raise DomainError(f"{self.kind} kernel needs a positive definite base "
                                  "(or restrict=True to act on the support)")
            a = np.where(ma[:, None], a, 1.0)
            b = np.where(mb[None, :], b, 1.0)
        with np.errstate(divide="ignore"):
            if self.kind == "omega":
                phi = logmean(a, b)
            elif self.kind == "omega_inv":
                phi = log_divdiff(a, b)
            elif self.kind == "left_mult":
                phi = np.broadcast_to(a, (len(ma), len(mb)))
            elif self.kind == "right_mult":
                phi = np.broadcast_to(b, (len(ma), len(mb)))
            elif self.kind == "resolvent_pair":
                phi = 1.0 / (a + self.t * b)
            elif self.kind == "sum_inv":
                phi = 1.0 / (a + b)
            else:
                phi = 1.0 / a + 1.0 / b
        if self.restrict:
            phi = phi * (ma[:, None] & mb[None, :])
        return np.array(phi, dtype=float)

    def _check_support(self, K: np.ndarray):
        ma, mb = self._masks()
        if ma.all() and mb.all():
            return
        U, V = self.left.eigenvectors, self._right.eigenvectors
        Ka, Kb = U.conj().T @ K, K @ V
        Ka_r, Kb_r = K @ U, V.conj().T @ K
        # both one-sided conditions against both bases
        off = max(np.linalg.norm(Ka[~ma]), np.linalg.norm(Kb[:, ~mb]),
                  np.linalg.norm(Ka_r[:, ~ma]), np.linalg.norm(Kb_r[~mb]))
        if off > 1e-9 * max(1.0, np.linalg.norm(K)):
            raise DomainError(f"input is not supported on the base support (off-support norm {off:.3g})")

    def __call__(self, K) -> np.ndarray:
        K = as_matrix(K)
        U, V = self.left.eigenvectors, self._right.eigenvectors
        if K.shape != (U.shape[0], V.shape[0]):
            raise DomainError(f"operand shape {K.shape} does not match base dimension")
        phi = self.kernel()
        if self.restrict:
            self._check_support(K)
        return U @ (phi * (U.conj().T @ K @ V)) @ V.conj().T


def _spectrum(A) -> SpectralDecomposition:
    if isinstance(A, SpectralDecomposition):
        return A
    return as_psd(A).spectrum


def kernel_operator(kind: str, A, B=None, *, t: float = 0.0,
                    restrict: bool = False) -> KernelOperator:
    return KernelOperator(kind, _spectrum(A), None if B is None else _spectrum(B),
                          t=t, restrict=restrict)


def apply_kernel(op: KernelOperator, K) -> np.ndarray:
    return op(K)


def omega(A, K, *, restrict: bool = False) -> np.ndarray:
    """Integral of A^p K A^(1-p) over p in [0, 1]."""
    return kernel_operator("omega", A, restrict=restrict)(K)


def omega_inv(A, K, *, restrict: bool = False) -> np.ndarray:
    """Integral of (A+u)^-1 K (A+u)^-1 over u >= 0; the inverse of :func:`omega`."""
    return kernel_operator("omega_inv", A, restrict=restrict)(K)


def resolvent_pair(A, K, t: float, B=None, *, restrict: bool = False) -> np.ndarray:
    """(L_A + t R_B)^-1 applied to K, i.e. the X solving A X + t X B = K."""
    return kernel_operator("resolvent_pair", A, B, t=t, restrict=restrict)(K)


def upsilon(A, K) -> np.ndarray:
    """Integral of R K† R K R over u >= 0 with R = (A + u)^-1, in O(n^3)."""
    A = as_psd(A)
    if not A.is_definite():
        raise DomainError("upsilon needs a positive definite base")
    K = as_matrix(K)
    lam = A.eigenvalues
    Kt = A.spectrum.to_basis(K)
    T = log_divdiff2_neg(lam[:, None, None], lam[None, :, None], lam[None, None, :])
    out = np.einsum("ik,kj,ikj->ij", Kt.conj().T, Kt, T, optimize=True)
    U = A.eigenvectors
    return U @ out @ U.conj().T


def exp_frechet(F, G) -> np.ndarray:
    """Derivative of exp(F + xG) at x = 0, as omega over exp(F) applied to G."""
    spec = hermitian_eig(F)
    expF = SpectralDecomposition(np.exp(spec.eigenvalues), spec.eigenvectors)
    return KernelOperator("omega", expF)(as_hermitian(G))


def exp_frechet_divdiff(F, G) -> np.ndarray:
    """Same derivative through the exponential divided-difference kernel."""
    spec = hermitian_eig(F)
    f = spec.eigenvalues
    U = spec.eigenvectors
    Gt = spec.to_basis(as_hermitian(G))
    return U @ (exp_divdiff(f[:, None], f[None, :]) * Gt) @ U.conj().T


def superoperator_matrix(op: KernelOperator) -> np.ndarray:
    """n^2 x n^2 matrix of ``op`` in the matrix-unit basis (row-major vec)."""
    n = op.left.dim
    m = op._right.dim
    cols = []
    for k in range(n):
        for l in range(m):
            E = np.zeros((n, m), dtype=complex)
            E[k, l] = 1.0
            cols.append(op(E).ravel())
    return np.array(cols).T


def sandwich_margins(A) -> tuple[float, float]:
    """Smallest pairwise gaps of recip_sum >= omega_inv >= sum_inv on spec(A)."""
    A = as_psd(A)
    if not A.is_definite():
        raise DomainError("sandwich kernels need a positive definite matrix")
    a = A.eigenvalues
    ai, aj = a[:, None], a[None, :]
    upper = 1 / ai + 1 / aj
    mid = log_divdiff(ai, aj)
    lower = 1 / (ai + aj)
    return float(np.min(upper - mid)), float(np.min(mid - lower))


# --- quadrature oracles -----------------------------------------------------

@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_subdivisions: int = 2000
    transform: str = "half-line"

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise DomainError("quadrature tolerances must be positive")
        if self.transform not in ("half-line", "unit-interval-direct"):
            raise DomainError(f"unknown transform {self.transform!r}")


def integrate(fn, q: QuadratureConfig, *, half_line: bool):
    """Adaptive Gauss-Kronrod integral of ``fn`` over [0, inf) or [0, 1].

    The half line is mapped to (0, 1) by u = s/(1-s), du = ds/(1-s)^2.
    """
    if half_line and q.transform == "half-line":
        def g(s):
            return fn(s / (1 - s)) / (1 - s) ** 2
        lo, hi = 0.0, 1.0
    elif half_line:
        g, lo, hi = fn, 0.0, np.inf
    else:
        g, lo, hi = fn, 0.0, 1.0
    res, err, info = quad_vec(g, lo, hi, epsabs=q.abs_tol, epsrel=q.rel_tol,
                              limit=q.max_subdivisions, full_output=True)
    if not info.success:
        raise QuadratureError(
            f"quadrature did not converge ({info.message}; error estimate {err:.3g})",
            estimate=res, error=err)
    return res


def omega_quad(A, K, q: QuadratureConfig = QuadratureConfig()) -> np.ndarray:
    A = as_psd(A)
    K = as_matrix(K)
    spec = A.spectrum
    lam = np.clip(A.eigenvalues, 0.0, None)

    def fn(p):
        return spec.apply(lam ** p) @ K @ spec.apply(lam ** (1 - p))
    return integrate(fn, q, half_line=False)


def _resolvent(A: np.ndarray, u: float) -> np.ndarray:
    return np.linalg.inv(A + u * np.eye(A.shape[0]))


def omega_inv_quad(A, K, q: QuadratureConfig = QuadratureConfig()) -> np.ndarray:
    A = as_psd(A)
    if not A.is_definite():
        raise DomainError("omega_inv_quad needs a positive definite matrix")
    M, K = A.matrix, as_matrix(K)

    def fn(u):
        R = _resolvent(M, u)
        return R @ K @ R
    return integrate(fn, q, half_line=True)


def upsilon_quad(A, K, q: QuadratureConfig = QuadratureConfig()) -> np.ndarray:
    A = as_psd(A)
    if not A.is_definite():
        raise DomainError("upsilon_quad needs a positive definite matrix")
    M, K = A.matrix, as_matrix(K)
    Kd = K.conj().T

    def fn(u):
        R = _resolvent(M, u)
        return R @ Kd @ R @ K @ R
    return integrate(fn, q, half_line=True)


WEIGHTS = {
    "1/(1+t)": lambda t: 1.0 / (1.0 + t),
    "1/(1+t)^2": lambda t: 1.0 / (1.0 + t) ** 2,
    "t/(1+t)^2": lambda t: t / (1.0 + t) ** 2,
}


def trace_rep_t_integral(A, K, weight: str,
                         q: QuadratureConfig = QuadratureConfig()) -> float:
    """Integral over t >= 0 of Tr K† (L_A + t R_A)^-1(K) times ``weight(t)``."""
    if weight not in WEIGHTS:
        raise DomainError(f"unknown weight {weight!r}; choose from {sorted(WEIGHTS)}")
    A = as_psd(A)
    if not A.is_definite():
        raise DomainError("trace representation needs a positive definite matrix")
    K = as_matrix(K)
    w = WEIGHTS[weight]
    spec = A.spectrum

    def fn(t):
        X = KernelOperator("resolvent_pair", spec, t=t)(K)
        return np.array([np.vdot(K, X) * w(t)])
    val = integrate(fn, q, half_line=True)[0]
    return float(val.real)
