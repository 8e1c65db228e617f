"""Trace functionals, entropies and the analytic-strip objects.

Functions return plain floats. Anything that should be real is checked:
an imaginary residue above ``1e-10 * (1 + |Re|)`` raises
:class:`NumericalConsistencyError` instead of being dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, NumericalConsistencyError
from .linalg import (
    SUPPORT_TOL,
    PsdMatrix,
    TripartiteState,
    as_density,
    as_hermitian,
    as_matrix,
    as_psd,
    hermitian_eig,
    matrix_log,
    matrix_power,
    matrix_sqrt,
    partial_trace_array,
)
from .superops import KernelOperator, omega_inv, upsilon

REL_ENTROPY_SUPPORT_TOL = 1e-9


def real_part(value, what: str = "value") -> float:
    value = complex(value)
    if abs(value.imag) > 1e-10 * (1 + abs(value.real)):
        raise NumericalConsistencyError(
            f"{what} has imaginary part {value.imag:.3g} (real part {value.real:.6g})")
    return value.real


def _same_dim(*mats):
    dims = {m.shape[0] for m in mats}
    if len(dims) != 1:
        raise DomainError(f"dimension mismatch: {sorted(dims)}")


# --- the three concavity/convexity functionals --------------------------------

def lieb_f1(A, B, K, p: float, *, endpoint: str = "support") -> float:
    """Tr A^p K† B^(1-p) K on PSD pairs.

    Zero eigenvalues follow 0^q = 0. At p = 0 or 1 the zeroth power is the
    support projector by default (``endpoint="support"``), or the identity
    with ``endpoint="identity"``.
    """
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    A, B = as_psd(A), as_psd(B)
    K = as_matrix(K)
    _same_dim(A.matrix, B.matrix, K)
    Ap = matrix_power(A, p, zero_power=endpoint)
    Bq = matrix_power(B, 1 - p, zero_power=endpoint)
    return real_part(np.vdot(K, Bq @ K @ Ap), "lieb_f1")


def lieb_f2(A, B, K, *, restrict: bool = False) -> float:
    """Integral over u >= 0 of Tr K† (A+u)^-1 K (B+u)^-1, in closed form.

    Equals the sum over i, j of |(U† K V)_ij|^2 (ln a_i - ln b_j)/(a_i - b_j).
    """
    A, B = as_psd(A), as_psd(B)
    K = as_matrix(K)
    _same_dim(A.matrix, B.matrix, K)
    op = KernelOperator("omega_inv", A.spectrum, B.spectrum, restrict=restrict)
    if restrict:
        return real_part(np.vdot(K, op(K)), "lieb_f2")
    Kt = A.eigenvectors.conj().T @ K @ B.eigenvectors
    return float(np.sum(np.abs(Kt) ** 2 * op.kernel()))


def lieb_f2_quad(A, B, K, q=None) -> float:
    """lieb_f2 by direct u-quadrature with explicit resolvents."""
    from .superops import QuadratureConfig, integrate
    A, B = as_psd(A), as_psd(B)
    K = as_matrix(K)
    I = np.eye(K.shape[0])
    Kd = K.conj().T

    def fn(u):
        return np.array([np.trace(Kd @ np.linalg.inv(A.matrix + u * I) @ K
                                  @ np.linalg.inv(B.matrix + u * I))])
    return real_part(integrate(fn, q or QuadratureConfig(), half_line=True)[0], "lieb_f2")


def lieb_f3(A, K) -> float:
    """Tr exp(K + log A) for positive definite A and Hermitian K."""
    A = as_psd(A)
    if not A.is_definite():
        raise DomainError("lieb_f3 needs a positive definite A")
    K = as_hermitian(K)
    _same_dim(A.matrix, K)
    H = K + matrix_log(A)
    return float(np.sum(np.exp(hermitian_eig(H).eigenvalues)))


# --- entropies ------------------------------------------------------------------

def _xlogx(lam: np.ndarray) -> float:
    lam = lam[lam > 0]
    return float(np.sum(lam * np.log(lam)))


def vn_entropy(P) -> float:
    """-Tr P log P with 0 log 0 = 0."""
    return -_xlogx(as_psd(P).eigenvalues)


def rel_entropy(P, Q, *, support_tol: float = REL_ENTROPY_SUPPORT_TOL) -> float:
    """Tr P (log P - log Q); +inf when P has weight on ker Q."""
    P, Q = as_psd(P), as_psd(Q)
    _same_dim(P.matrix, Q.matrix)
    qmask = Q.support_mask(SUPPORT_TOL)
    if not qmask.all():
        # weight of P on the kernel of Q
        Vk = Q.eigenvectors[:, ~qmask]
        leak = np.trace(Vk.conj().T @ P.matrix @ Vk).real
        if leak > support_tol * max(P.trace, 1e-300):
            return float("inf")
    logQ = matrix_log(Q, restrict=True)
    cross = real_part(np.vdot(P.matrix, logQ), "Tr P log Q")
    return _xlogx(P.eigenvalues) - cross


def sym_rel_entropy(P, Q, *, check: bool = True) -> float:
    """H(P, Q) + H(Q, P), cross-checked against lieb_f2(Q, P, P - Q)."""
    P, Q = as_psd(P), as_psd(Q)
    direct = rel_entropy(P, Q) + rel_entropy(Q, P)
    if not np.isfinite(direct) or not check:
        return direct
    if not (P.is_definite() and Q.is_definite()):
        return direct
    via_f2 = lieb_f2(Q, P, P.matrix - Q.matrix)
    if abs(direct - via_f2) > 1e-9 * max(1.0, abs(direct)):
        raise NumericalConsistencyError(
            f"symmetrized relative entropy routes disagree: {direct!r} vs {via_f2!r}")
    return direct


def limit_identity(A, B, ps: Sequence[float]) -> list[tuple[float, float, float]]:
    """Rows (p, (Tr A^(1-p) B^p - Tr A)/p, -Tr A (log A - log B))."""
    A, B = as_psd(A), as_psd(B)
    if not (A.is_definite() and B.is_definite()):
        raise DomainError("limit_identity needs positive definite A and B")
    target = -(_xlogx(A.eigenvalues) - real_part(np.vdot(A.matrix, matrix_log(B))))
    trA = A.trace
    rows = []
    for p in ps:
        val = real_part(np.trace(matrix_power(A, 1 - p) @ matrix_power(B, p)))
        rows.append((float(p), (val - trA) / p, target))
    return rows


def delta_quadratic(A, K) -> float:
    """Tr K Omega_A^-1(K) - Tr A Upsilon_A(K).

    This is minus one half of the second derivative of S(A + xK) at x = 0.
    """
    A = as_psd(A)
    K = as_hermitian(K)
    first = real_part(np.vdot(K, omega_inv(A, K)))
    second = real_part(np.vdot(A.matrix, upsilon(A, K)))
    return first - second


def cond_entropy_blockdiag(blocks: Sequence) -> float:
    """S(diag(A_1, ..., A_m)) - S(A_1 + ... + A_m) as sum_j S(A_j) - S(sum_j A_j)."""
    blocks = [as_psd(b) for b in blocks]
    if not blocks:
        raise DomainError("need at least one block")
    _same_dim(*(b.matrix for b in blocks))
    total = sum(b.matrix for b in blocks)
    return sum(vn_entropy(b) for b in blocks) - vn_entropy(total)


def blockdiag_state(blocks: Sequence) -> np.ndarray:
    """Block-diagonal matrix with the blocks indexed by the first tensor factor."""
    mats = [as_matrix(b) for b in blocks]
    n = mats[0].shape[0]
    out = np.zeros((len(mats) * n, len(mats) * n), dtype=complex)
    for j, m in enumerate(mats):
        out[j * n:(j + 1) * n, j * n:(j + 1) * n] = m
    return out


def ssa_deficit(s: TripartiteState) -> float:
    """[S(rho_12) - S(rho_2)] - [S(rho_123) - S(rho_23)]; non-negative by SSA."""
    rho, dims = s.rho.matrix, s.dims

    def S(keep):
        return vn_entropy(partial_trace_array(rho, dims, keep))
    return (S({1, 2}) - S({2})) - (vn_entropy(s.rho) - S({2, 3}))


def fidelity_root(P, Q) -> float:
    """Tr (sqrt(P) Q sqrt(P))^(1/2)."""
    sP = matrix_sqrt(as_psd(P))
    inner = as_psd(sP @ as_psd(Q).matrix @ sP)
    return float(np.sum(np.sqrt(inner.eigenvalues)))


def bures_distance(P, Q) -> float:
    """D with D^2 = 2 (1 - Tr (sqrt(P) Q sqrt(P))^(1/2)), clipped at 0."""
    P, Q = as_density(P), as_density(Q)
    f = min(fidelity_root(P, Q), 1.0)
    return float(np.sqrt(max(2.0 * (1.0 - f), 0.0)))


# --- block embedding --------------------------------------------------------------

def block_embed(A, B, K, p: float) -> float:
    """lieb_f1(A, B, K, p) evaluated as a one-matrix functional in dimension 2n.

    With D = diag(A, B), X = [[0, K†], [0, 0]] and Y = [[0, 0], [K, 0]] the
    value is Tr D^p X D^(1-p) Y.
    """
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    A, B = as_psd(A), as_psd(B)
    K = as_matrix(K)
    n = K.shape[0]
    D = as_psd(blockdiag_state([A.matrix, B.matrix]))
    Z = np.zeros((n, n), dtype=complex)
    X = np.block([[Z, K.conj().T], [Z, Z]])
    Y = np.block([[Z, Z], [K, Z]])
    Dp = matrix_power(D, p, zero_power="support")
    Dq = matrix_power(D, 1 - p, zero_power="support")
    return real_part(np.trace(Dp @ X @ Dq @ Y), "block_embed")


# --- analytic strip ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class StripInstance:
    """Mixture data for the strip argument, compressed to the support of C.

    C = lam1 A1 + lam2 A2 and M = C^((1-p)/2) K C^(p/2).
    """

    A1: np.ndarray
    A2: np.ndarray
    lam1: float
    K: np.ndarray
    p: float
    C: PsdMatrix = field(repr=False)
    M: np.ndarray = field(repr=False)
    support: np.ndarray = field(repr=False)

    @property
    def lam2(self) -> float:
        return 1.0 - self.lam1

    @classmethod
    def build(cls, A1, A2, lam1: float, K, p: float, *,
              supp_tol: float = SUPPORT_TOL) -> "StripInstance":
        if not 0 < lam1 < 1:
            raise DomainError("lam1 must lie in (0, 1)")
        if not 0 < p < 1:
            raise DomainError("p must lie in (0, 1)")
        A1, A2 = as_psd(A1).matrix, as_psd(A2).matrix
        K = as_matrix(K)
        _same_dim(A1, A2, K)
        C = as_psd(lam1 * A1 + (1 - lam1) * A2)
        V = C.eigenvectors[:, C.support_mask(supp_tol)]
        if V.shape[1] == 0:
            raise DomainError("C vanishes identically")

        def compress(X):
            return V.conj().T @ X @ V
        A1c, A2c, Kc = compress(A1), compress(A2), compress(K)
        Cc = as_psd(compress(C.matrix))
        M = matrix_power(Cc, (1 - p) / 2) @ Kc @ matrix_power(Cc, p / 2)
        return cls(as_psd(A1c).matrix, as_psd(A2c).matrix, lam1, Kc, p, Cc, M, V)

    @property
    def bound(self) -> float:
        """Tr M†M, which equals Tr C^p K† C^(1-p) K."""
        return float(np.vdot(self.M, self.M).real)

    def G(self, k: int, z: complex) -> np.ndarray:
        """C^(-z/2) A_k^z C^(-z/2)."""
        Ak = self.A1 if k == 1 else self.A2
        Cm = matrix_power(self.C, -z / 2)
        return Cm @ matrix_power(as_psd(Ak), z, zero_power="support") @ Cm


def strip_f(inst: StripInstance, k: int, z: complex) -> complex:
    """f_k(z) = Tr M† G_k(1 - z) M G_k(z) on the closed strip 0 <= Re z <= 1."""
    if k not in (1, 2):
        raise DomainError("k must be 1 or 2")
    z = complex(z)
    if not 0 <= z.real <= 1:
        raise DomainError(f"Re z must lie in [0, 1], got {z.real}")
    M = inst.M
    return complex(np.trace(M.conj().T @ inst.G(k, 1 - z) @ M @ inst.G(k, z)))


def strip_mixture(inst: StripInstance, z: complex) -> complex:
    """lam1 f_1(z) + lam2 f_2(z)."""
    return inst.lam1 * strip_f(inst, 1, z) + inst.lam2 * strip_f(inst, 2, z)
