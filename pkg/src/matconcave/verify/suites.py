"""Registry of named property suites.

Each entry pairs a trial function ``trial(rng, dim) -> list[Margin]`` with
the statement it checks. Trial functions draw everything they need from
``rng``, which the engine derives from (seed, suite name, trial index).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .. import functionals as fn
from ..linalg import (
    PsdMatrix,
    SpectralDecomposition,
    TripartiteState,
    as_psd,
    ginibre,
    kron,
    matrix_log,
    matrix_sqrt,
    partial_trace_array,
    random_density,
    random_hermitian,
    random_pd,
    random_unitary,
    random_wishart,
)
from ..superops import (
    KERNELS,
    QuadratureConfig,
    exp_frechet,
    exp_frechet_divdiff,
    kernel_operator,
    omega,
    omega_inv,
    omega_inv_quad,
    omega_quad,
    sandwich_margins,
    superoperator_matrix,
    trace_rep_t_integral,
    upsilon,
    upsilon_quad,
)
from . import checks
from .engine import Margin, PropertySuite, Tolerance, equality

RESOLVENT_TS = (0.0, 0.1, 1.0, 10.0, 1000.0)
QUAD_TOL = Tolerance(1e-7, 1e-7)


@dataclass(frozen=True)
class SuiteEntry:
    name: str
    trial: Callable
    check_kind: str
    description: str
    statement: str

    def build(self, dim: int = 4, trials: int = 500, seed: int = 0,
              tolerance: Tolerance = Tolerance()) -> PropertySuite:
        return PropertySuite(self.name, self.trial, self.check_kind, dim, trials, seed,
                             tolerance, self.description, self.statement)


# --- sampling helpers ------------------------------------------------------------

def _lam(rng) -> float:
    return float(rng.uniform(0.05, 0.95))


def _psd_or_pd(rng, n) -> np.ndarray:
    """Mostly full-rank PD draws; one in four is rank deficient."""
    if n > 1 and rng.random() < 0.25:
        return random_wishart(rng, n, int(rng.integers(1, n)))
    return random_pd(rng, n).matrix


def _pd(rng, n, max_cond=1e6) -> np.ndarray:
    return random_pd(rng, n, max_cond).matrix


def _fro(X) -> float:
    return float(np.linalg.norm(X))


def _spectral_pd(rng, n, lo=1e-2, hi=1e1, near_degenerate=True) -> PsdMatrix:
    """Haar eigenbasis with log-uniform spectrum; optionally one nearly equal pair."""
    lam = np.exp(rng.uniform(np.log(lo), np.log(hi), n))
    if near_degenerate and n > 1:
        i, j = rng.choice(n, 2, replace=False)
        lam[j] = lam[i] * (1 + 10.0 ** -rng.uniform(6, 12))
    lam.sort()
    U = random_unitary(rng, n)
    spec = SpectralDecomposition(lam, U)
    return PsdMatrix(spec.reconstruct(), spec)


# --- trial functions -------------------------------------------------------------

def f1_concavity(rng, n):
    A1, A2, B1, B2 = (_psd_or_pd(rng, n) for _ in range(4))
    K = ginibre(rng, n)
    p = float(rng.uniform(0.02, 0.98))
    return [checks.check_concavity(checks.F1(K, p), (A1, B1), (A2, B2), _lam(rng))]


def f2_joint_convexity(rng, n):
    X1 = (_pd(rng, n), _pd(rng, n), ginibre(rng, n))
    X2 = (_pd(rng, n), _pd(rng, n), ginibre(rng, n))
    return [checks.check_concavity(checks.F2(), X1, X2, _lam(rng))]


def f3_concavity(rng, n):
    K = random_hermitian(rng, n)
    out = [checks.check_concavity(checks.F3(K), (_pd(rng, n),), (_pd(rng, n),), _lam(rng))]
    A = random_pd(rng, n)
    B = random_hermitian(rng, n)
    B *= 0.5 * A.eigenvalues[0] / np.linalg.norm(B, 2)
    out += checks.check_f3_second_derivative(A, B, random_hermitian(rng, n))
    return out


def resolvent_superadditivity(rng, n):
    out = []
    for t in RESOLVENT_TS:
        samples = [(_pd(rng, n), ginibre(rng, n)) for _ in range(2)]
        lam = _lam(rng)
        out += checks.check_resolvent_superadditivity(t, samples, (lam, 1 - lam))
    return out


def omega_inverse_pair(rng, n):
    A = _spectral_pd(rng, n)
    K = ginibre(rng, n)
    scale = _fro(K)
    tol = Tolerance(1e-300, 1e-10)
    out = [
        Margin("omega(omega_inv(K)) = K", -_fro(omega(A, omega_inv(A, K)) - K), scale, tol),
        Margin("omega_inv(omega(K)) = K", -_fro(omega_inv(A, omega(A, K)) - K), scale, tol),
    ]
    for kind in KERNELS:
        v = np.vdot(K, kernel_operator(kind, A, t=1.0)(K))
        ht = Tolerance(1e-300, 1e-12)
        out.append(Margin(f"{kind} HS-positive", v.real, scale ** 2 * max(1.0, abs(v)), ht))
        out.append(equality(f"{kind} HS-real", v.imag, 0.0, ht, scale ** 2 * max(1.0, abs(v))))
    return out


def quadrature_crosscheck(rng, n):
    A = as_psd(_pd(rng, n, max_cond=1e3))
    K = ginibre(rng, n)
    H = random_hermitian(rng, n)
    q = QuadratureConfig()

    def close(name, quad, closed):
        return Margin(name, -float(np.max(np.abs(quad - closed))),
                      float(np.max(np.abs(closed))), QUAD_TOL)
    out = [
        close("omega quadrature", omega_quad(A, K, q), omega(A, K)),
        close("omega_inv quadrature", omega_inv_quad(A, K, q), omega_inv(A, K)),
        close("upsilon quadrature", upsilon_quad(A, K, q), upsilon(A, K)),
    ]
    ref = np.vdot(K, omega_inv(A, K)).real
    out.append(equality("t-integral 1/(1+t)", trace_rep_t_integral(A, K, "1/(1+t)", q), ref, QUAD_TOL))
    ref = np.vdot(A.matrix, upsilon(A, K)).real
    out.append(equality("t-integral 1/(1+t)^2", trace_rep_t_integral(A, K, "1/(1+t)^2", q), ref, QUAD_TOL))
    ref = fn.delta_quadratic(A, H)
    out.append(equality("t-integral t/(1+t)^2", trace_rep_t_integral(A, H, "t/(1+t)^2", q), ref, QUAD_TOL))
    return out


LOG_SERIES_XS = (1e-2, 5e-3, 2.5e-3, 1.25e-3)


def log_series_residuals(A: PsdMatrix, K: np.ndarray, xs=LOG_SERIES_XS) -> list[float]:
    L0 = matrix_log(A)
    first, second = omega_inv(A, K), upsilon(A, K)
    return [_fro(matrix_log(A.matrix + x * K) - L0 - x * first + x * x * second) for x in xs]


def _moderate_pd_with_direction(rng, n):
    """O(1) spectrum and a Hermitian direction with ||K|| = lambda_min / 2."""
    A = _spectral_pd(rng, n, 0.5, 2.0, near_degenerate=False)
    K = random_hermitian(rng, n)
    K *= 0.5 * A.eigenvalues[0] / np.linalg.norm(K, 2)
    return A, K


def log_series(rng, n):
    A, K = _moderate_pd_with_direction(rng, n)
    r = log_series_residuals(A, K)
    tol = Tolerance(1e-300, 1e-300)
    return [Margin(f"log residual ratio x={x:g}", r[i] / r[i + 1] - 7.0, 8.0, tol)
            for i, x in enumerate(LOG_SERIES_XS[:-1])]


def exp_frechet_suite(rng, n):
    F, G = random_hermitian(rng, n), random_hermitian(rng, n)
    h = 1e-5
    fd = (scipy.linalg.expm(F + h * G) - scipy.linalg.expm(F - h * G)) / (2 * h)
    D = exp_frechet(F, G)
    scale = np.linalg.norm(scipy.linalg.expm(F), 2) * np.linalg.norm(G, 2)
    return [
        Margin("exp derivative vs finite difference", -float(np.max(np.abs(D - fd))), scale,
               Tolerance(1e-300, 1e-8)),
        Margin("logmean kernel vs exp divided difference",
               -float(np.max(np.abs(D - exp_frechet_divdiff(F, G)))), scale,
               Tolerance(1e-300, 1e-12)),
    ]


def strip_bounds(rng, n):
    inst = fn.StripInstance.build(_psd_or_pd(rng, n), _psd_or_pd(rng, n), _lam(rng),
                                  ginibre(rng, n), float(rng.uniform(0.05, 0.95)))
    return checks.check_strip_bounds(inst)


def sandwich(rng, n):
    lam = np.exp(rng.uniform(np.log(1e-6), np.log(1e1), n))
    if n > 1 and rng.random() < 0.5:
        lam[1] = lam[0] * (1 + 10.0 ** -rng.uniform(4, 14))
    A = as_psd(np.diag(lam))
    upper, lower = sandwich_margins(A)
    tol = Tolerance(1e-12, 1e-300)
    out = [Margin("recip_sum - omega_inv", upper, 0.0, tol),
           Margin("omega_inv - sum_inv", lower, 0.0, tol)]
    # the same ordering as operators on the 9-dimensional Hilbert-Schmidt space
    B = random_pd(rng, 3, 1e3)
    mats = {k: superoperator_matrix(kernel_operator(k, B)) for k in ("recip_sum", "omega_inv", "sum_inv")}
    scale = max(np.linalg.norm(m, 2) for m in mats.values())
    et = Tolerance(1e-300, 1e-12)
    for hi, lo in (("recip_sum", "omega_inv"), ("omega_inv", "sum_inv")):
        D = mats[hi] - mats[lo]
        out.append(equality(f"{hi} - {lo} self-adjoint", float(np.max(np.abs(D - D.conj().T))), 0.0,
                            et, scale))
        out.append(Margin(f"{hi} - {lo} eigenvalues", float(np.linalg.eigvalsh((D + D.conj().T) / 2)[0]),
                          scale, et))
    return out


def delta_convexity_and_fd(rng, n):
    X1 = (_pd(rng, n), random_hermitian(rng, n))
    X2 = (_pd(rng, n), random_hermitian(rng, n))
    out = [checks.check_concavity(checks.delta(), X1, X2, _lam(rng))]
    # block-diagonal conditional entropy: second derivative -D(A,K) - D(B,L) + D(A+B,K+L) <= 0
    D = checks.delta()
    g2 = -D(*X1) - D(*X2) + D(X1[0] + X2[0], X1[1] + X2[1])
    out.append(Margin("block-diagonal second derivative <= 0", -g2,
                      abs(D(*X1)) + abs(D(*X2)) + abs(D(X1[0] + X2[0], X1[1] + X2[1]))))
    A, K = _moderate_pd_with_direction(rng, n)
    d = fn.delta_quadratic(A, K)
    h = 1e-3
    S = fn.vn_entropy
    fd = (S(A.matrix + h * K) - 2 * S(A) + S(A.matrix - h * K)) / h ** 2
    out.append(Margin("delta >= 0", d, abs(d)))
    out.append(equality("d2S/dx2 = -2 delta", fd, -2 * d, Tolerance(1e-300, 1e-5)))
    return out


def _s(rho, dims, keep):
    return fn.vn_entropy(partial_trace_array(rho, dims, keep))


def ssa(rng, n):
    dims = (2, 2, 2)
    kind = rng.integers(3)
    rank = (8, int(rng.integers(2, 8)), 1)[kind]
    rho = random_density(rng, 8, rank)
    out = [Margin("ssa deficit >= 0", fn.ssa_deficit(TripartiteState(rho, dims)), 0.0,
                  Tolerance(1e-10, 1e-300))]
    # block-diagonal construction over an auxiliary factor 3
    t = _lam(rng)
    r1, r2 = random_density(rng, 4), random_density(rng, 4)
    e0, e1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    state = TripartiteState.from_array(t * kron(r1.matrix, e0) + (1 - t) * kron(r2.matrix, e1), dims)
    deficit = fn.ssa_deficit(state)

    def cond(r):
        return _s(r, (2, 2), {1, 2}) - _s(r, (2, 2), {2})
    mix = t * r1.matrix + (1 - t) * r2.matrix
    gap = cond(mix) - t * cond(r1.matrix) - (1 - t) * cond(r2.matrix)
    out.append(Margin("ssa deficit >= 0 (block)", deficit, 0.0, Tolerance(1e-10, 1e-300)))
    out.append(equality("ssa deficit = concavity gap", deficit, gap, Tolerance(1e-9, 1e-300)))
    # classical-quantum blocks: S(gamma_12) - S(gamma_2) against the assembled state
    m = 2
    w = rng.dirichlet(np.ones(m))
    blocks = [w[j] * random_density(rng, 2).matrix for j in range(m)]
    via_blocks = fn.cond_entropy_blockdiag(blocks)
    gamma = fn.blockdiag_state(blocks)
    assembled = fn.vn_entropy(gamma) - _s(gamma, (m, 2), {2})
    out.append(equality("block conditional entropy vs assembled state", via_blocks, assembled,
                        Tolerance(1e-12, 1e-300)))
    out.append(Margin("block conditional entropy >= 0", via_blocks, 0.0, Tolerance(1e-12, 1e-300)))
    out.append(Margin("block conditional entropy <= ln m", np.log(m) - via_blocks, 0.0,
                      Tolerance(1e-12, 1e-300)))
    other = [w2 * random_density(rng, 2).matrix for w2 in rng.dirichlet(np.ones(m))]
    out.append(checks.check_concavity(checks.cond_entropy_blockdiag(), blocks, other, _lam(rng)))
    return out


def rel_entropy_convexity(rng, n):
    P1, P2, Q1, Q2 = (random_density(rng, n).matrix for _ in range(4))
    lam = _lam(rng)
    H = fn.rel_entropy(P1, Q1)
    return [
        checks.check_concavity(checks.rel_entropy(), (P1, Q1), (P2, Q2), lam),
        Margin("relative entropy >= 0", H, abs(H)),
    ]


def sym_rel_entropy_suite(rng, n):
    P1, P2, Q1, Q2 = (random_density(rng, n).matrix for _ in range(4))
    direct = fn.rel_entropy(P1, Q1) + fn.rel_entropy(Q1, P1)
    via_f2 = fn.lieb_f2(Q1, P1, P1 - Q1)
    return [
        checks.check_concavity(checks.sym_rel_entropy(), (P1, Q1), (P2, Q2), _lam(rng)),
        equality("symmetrized entropy direct vs integral", direct, via_f2, Tolerance(1e-9, 1e-9)),
    ]


LIMIT_PS = (1e-2, 5e-3, 2.5e-3)


def limit_identity(rng, n):
    A, B = _pd(rng, n), _pd(rng, n)
    rows = fn.limit_identity(A, B, LIMIT_PS)
    errs = [abs(v - t) for _, v, t in rows]
    tol = Tolerance(1e-300, 1e-300)
    out = []
    for i in range(len(errs) - 1):
        r = errs[i] / errs[i + 1]
        out.append(Margin(f"limit error ratio p={LIMIT_PS[i]:g}", min(r - 1.6, 2.4 - r), 2.0, tol))
    return out


def homogeneity(rng, n):
    K = ginibre(rng, n)
    p = float(rng.uniform(0.05, 0.95))
    KH = random_hermitian(rng, n)
    out = []
    F1 = checks.F1(K, p)
    pairs = [(_pd(rng, n), _pd(rng, n)) for _ in range(2)]
    out += checks.check_homogeneity_superadditivity(F1, pairs[0], pairs[1])
    F2 = checks.F2()
    triples = [(_pd(rng, n), _pd(rng, n), ginibre(rng, n)) for _ in range(2)]
    out += checks.check_homogeneity_superadditivity(F2, triples[0], triples[1])
    F3 = checks.F3(KH)
    singles = [(_pd(rng, n),) for _ in range(2)]
    out += checks.check_homogeneity_superadditivity(F3, singles[0], singles[1])
    out += checks.check_derivative_inequality(F3, singles[0], singles[1])
    out += checks.check_derivative_inequality(F1, pairs[0], pairs[1])
    out += checks.check_derivative_inequality(F2, triples[0], triples[1])
    return out


def block_embed(rng, n):
    A, B = _psd_or_pd(rng, n), _psd_or_pd(rng, n)
    K = ginibre(rng, n)
    p = float(rng.uniform(0.0, 1.0))
    direct = fn.lieb_f1(A, B, K, p)
    return [equality("block embedding vs direct", fn.block_embed(A, B, K, p), direct,
                     Tolerance(1e-300, 1e-10))]


def bures(rng, n):
    P, Q, R = (random_density(rng, n) for _ in range(3))
    d_pq, d_qp = fn.bures_distance(P, Q), fn.bures_distance(Q, P)
    # fidelity root as a nuclear norm: an independent route
    nuc = np.linalg.svd(matrix_sqrt(P) @ matrix_sqrt(Q), compute_uv=False).sum()
    out = [
        equality("bures symmetric", d_pq, d_qp, Tolerance(1e-10, 1e-300)),
        equality("D^2 vs nuclear-norm fidelity", d_pq ** 2, 2 * (1 - nuc), Tolerance(1e-12, 1e-300)),
        Margin("bures triangle", d_pq + fn.bures_distance(Q, R) - fn.bures_distance(P, R), 2.0),
        Margin("D^2 <= 2", 2 - d_pq ** 2, 2.0),
        equality("D(P, P)^2 = 0", fn.bures_distance(P, P) ** 2, 0.0, Tolerance(1e-12, 1e-300)),
    ]
    p, q = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
    hell = 2 * (1 - np.sum(np.sqrt(p * q)))
    out.append(equality("commuting case is Hellinger", fn.bures_distance(np.diag(p), np.diag(q)) ** 2,
                        hell, Tolerance(1e-12, 1e-300)))
    return out


REGISTRY: dict[str, SuiteEntry] = {e.name: e for e in [
    SuiteEntry("f1-concavity", f1_concavity, "concave-joint",
               "joint concavity of Tr A^p K† B^(1-p) K",
               "(A, B) -> Tr A^p K† B^(1-p) K is jointly concave for 0 < p < 1"),
    SuiteEntry("f2-joint-convexity", f2_joint_convexity, "convex-joint",
               "joint convexity of the resolvent integral in (A, B, K)",
               "(A, B, K) -> Tr int K† (A+u)^-1 K (B+u)^-1 du is jointly convex"),
    SuiteEntry("f3-concavity", f3_concavity, "concave-single",
               "concavity of Tr exp(K + log A) plus closed-form second derivative",
               "A -> Tr exp(K + log A) is concave; f''(0) closed form matches finite differences"),
    SuiteEntry("lemma41", resolvent_superadditivity, "superadditive",
               "fixed-t convexity of Tr K† (L_A + t R_A)^-1 (K)",
               "for each t >= 0, (A, K) -> Tr K† (L_A + t R_A)^-1 (K) is jointly convex"),
    SuiteEntry("omega-inverse-pair", omega_inverse_pair, "equality",
               "Omega_A and its inverse compose to the identity; kernels are HS-positive",
               "int A^p K A^(1-p) dp and int (A+u)^-1 K (A+u)^-1 du are mutually inverse"),
    SuiteEntry("quadrature-crosscheck", quadrature_crosscheck, "equality",
               "closed-form kernels against adaptive quadrature of their integrals",
               "kernel formulas equal the defining integrals, incl. the t-integral forms"),
    SuiteEntry("log-series", log_series, "derivative-identity",
               "second-order expansion of log(A + xK) has an O(x^3) remainder",
               "log(A + xK) = log A + x Omega_A^-1(K) - x^2 Upsilon_A(K) + O(x^3)"),
    SuiteEntry("exp-frechet", exp_frechet_suite, "derivative-identity",
               "derivative of exp(F + xG) as Omega over exp(F)",
               "d/dx exp(F + xG) at 0 equals Omega_{exp F}(G)"),
    SuiteEntry("strip-bounds", strip_bounds, "bound",
               "analytic-strip mixture bounded by Tr M†M",
               "|lam1 f_1(z) + lam2 f_2(z)| <= Tr M†M on 0 <= Re z <= 1"),
    SuiteEntry("sandwich", sandwich, "bound",
               "L^-1 + R^-1 >= Omega^-1 >= (L + R)^-1 as kernels and as operators",
               "R_A^-1 + L_A^-1 >= Omega_A^-1 >= (R_A + L_A)^-1"),
    SuiteEntry("delta-convexity-and-fd", delta_convexity_and_fd, "convex-joint",
               "joint convexity of Delta(A, K) and its relation to d2S/dx2",
               "Delta(A, K) = Tr K Omega_A^-1(K) - Tr A Upsilon_A(K) is jointly convex"),
    SuiteEntry("ssa", ssa, "bound",
               "strong subadditivity, block-diagonal equivalence, cq conditional entropy",
               "S(rho_123) - S(rho_23) <= S(rho_12) - S(rho_2)"),
    SuiteEntry("rel-entropy-convexity", rel_entropy_convexity, "convex-joint",
               "joint convexity of relative entropy",
               "(P, Q) -> Tr P (log P - log Q) is jointly convex"),
    SuiteEntry("sym-rel-entropy", sym_rel_entropy_suite, "convex-joint",
               "symmetrized relative entropy: convexity and integral form",
               "H(P,Q) + H(Q,P) = Tr int (P-Q)(Q+u)^-1 (P-Q)(P+u)^-1 du, jointly convex"),
    SuiteEntry("limit-identity", limit_identity, "derivative-identity",
               "first-order convergence of (Tr A^(1-p) B^p - Tr A)/p",
               "lim_{p->0} (Tr A^(1-p) B^p - Tr A)/p = -Tr A (log A - log B)"),
    SuiteEntry("homogeneity", homogeneity, "homogeneous-degree-1",
               "degree-one homogeneity, super/subadditivity, difference quotients",
               "for degree-one g, concavity <=> superadditivity"),
    SuiteEntry("block-embed", block_embed, "equality",
               "two-matrix functional as a one-matrix functional in dimension 2n",
               "Tr A^p K† B^(1-p) K = Tr D^p X D^(1-p) Y with D = diag(A, B)"),
    SuiteEntry("bures", bures, "bound",
               "Bures distance: symmetry, metric axioms, fidelity routes",
               "D^2 = 2 [1 - Tr (sqrt(P) Q sqrt(P))^(1/2)]"),
]}


def get_suite(name: str, **kwargs) -> PropertySuite:
    return REGISTRY[name].build(**kwargs)
