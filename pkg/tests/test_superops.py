import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from matconcave.errors import DomainError, QuadratureError
from matconcave.linalg import ginibre, random_hermitian, random_pd, random_unitary
from matconcave.superops import (
    KERNELS,
    QuadratureConfig,
    apply_kernel,
    exp_divdiff,
    exp_frechet,
    exp_frechet_divdiff,
    integrate,
    kernel_operator,
    log_divdiff,
    log_divdiff2_neg,
    logmean,
    omega,
    omega_inv,
    omega_inv_quad,
    omega_quad,
    resolvent_pair,
    sandwich_margins,
    superoperator_matrix,
    trace_rep_t_integral,
    upsilon,
    upsilon_quad,
)

from conftest import pd_matrices, pd_with_direction, seeds

E = np.e
# mpmath, 30 digits: quad of du/((1+u)(e+u)) over [0, inf) and of e^(1-p) over [0, 1]
OMEGA_INV_1_E = 0.581976706869326424385002005109
OMEGA_1_E = 1.71828182845904523536028747135
# mpmath quad of du/((a+u)(b+u)(c+u)) over [0, inf)
T_ORACLE = [((1.0, 1.0, 1.0), 0.5),
            ((1.0, 2.0, 3.0), 0.143841036225890463719609502997),
            ((0.5, 0.5, 4.0), 0.401678241495523597693739072296)]


def _unit(i, j, n=2):
    E_ = np.zeros((n, n), dtype=complex)
    E_[i, j] = 1.0
    return E_


# --- scalar kernels -------------------------------------------------------------------

def test_log_divdiff_oracle():
    assert log_divdiff(1.0, E) == pytest.approx(OMEGA_INV_1_E, rel=1e-15)
    assert logmean(1.0, E) == pytest.approx(OMEGA_1_E, rel=1e-15)


@pytest.mark.parametrize("abc,expected", T_ORACLE)
def test_second_divided_difference_oracle(abc, expected):
    for perm in [abc, abc[::-1], (abc[1], abc[2], abc[0])]:
        assert log_divdiff2_neg(*perm) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("k", range(4, 15))
def test_degeneracy_continuity_first(k):
    a = 1.7
    b = a * (1 + 10.0 ** -k)
    exact = 1 / np.sqrt(a * b) * (1 - (b - a) ** 2 / (24 * a * b))  # series of the log kernel
    assert log_divdiff(a, b) == pytest.approx(exact, rel=1e-12)


@pytest.mark.parametrize("k", range(4, 15))
def test_degeneracy_continuity_second(k):
    # reference: scipy quadrature of the defining integral
    from scipy.integrate import quad
    a = 0.9
    b = a * (1 + 10.0 ** -k)
    for c in (b, 2.5 * a, a * (1 - 10.0 ** -k)):
        ref = quad(lambda u: 1 / ((a + u) * (b + u) * (c + u)), 0, np.inf, epsabs=0, epsrel=1e-13)[0]
        assert log_divdiff2_neg(a, b, c) == pytest.approx(ref, rel=1e-11)


@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_logmean_between_geometric_and_arithmetic(a, b):
    L = logmean(a, b)
    assert np.sqrt(a * b) * (1 - 1e-12) <= L <= (a + b) / 2 * (1 + 1e-12)


@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_second_divdiff_symmetric_positive(a, b, c):
    vals = [log_divdiff2_neg(*p) for p in [(a, b, c), (c, a, b), (b, c, a), (b, a, c)]]
    assert min(vals) > 0
    assert max(vals) == pytest.approx(min(vals), rel=1e-12)


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_exp_divdiff_mean_value(x, y):
    v = exp_divdiff(x, y)
    assert np.exp(min(x, y)) * (1 - 1e-12) <= v <= np.exp(max(x, y)) * (1 + 1e-12)


def test_logmean_zero_argument():
    assert logmean(0.0, 3.0) == 0.0


# --- kernel operators ----------------------------------------------------------------

def test_identity_base():
    K = ginibre(np.random.default_rng(0), 3)
    np.testing.assert_allclose(omega(np.eye(3), K), K, atol=1e-15)
    np.testing.assert_allclose(omega_inv(np.eye(3), K), K, atol=1e-15)


def test_omega_inv_entry():
    A = np.diag([1.0, E])
    assert omega_inv(A, _unit(0, 1))[0, 1] == pytest.approx(OMEGA_INV_1_E, rel=1e-14)
    assert omega(A, _unit(0, 1))[0, 1] == pytest.approx(OMEGA_1_E, rel=1e-14)


def test_resolvent_t0_is_left_inverse():
    rng = np.random.default_rng(4)
    A = random_pd(rng, 4).matrix
    K = ginibre(rng, 4)
    np.testing.assert_allclose(resolvent_pair(A, K, 0.0), np.linalg.solve(A, K), atol=1e-10)


@given(pd_with_direction(), st.floats(0, 100))
def test_resolvent_matches_sylvester(AK, t):
    A, K = AK
    rng = np.random.default_rng(abs(hash(t)) % 2**32)
    B = random_pd(rng, A.shape[0], 1e3).matrix
    X = resolvent_pair(A, K, t, B)
    ref = scipy.linalg.solve_sylvester(A, t * B, K)
    np.testing.assert_allclose(X, ref, atol=1e-7 * np.linalg.norm(ref) + 1e-12)
    np.testing.assert_allclose(A @ X + t * X @ B, K, atol=1e-8 * np.linalg.norm(K))


@given(pd_with_direction())
def test_omega_pair_inverse(AK):
    A, K = AK
    assert np.linalg.norm(omega(A, omega_inv(A, K)) - K) <= 1e-10 * np.linalg.norm(K)
    assert np.linalg.norm(omega_inv(A, omega(A, K)) - K) <= 1e-10 * np.linalg.norm(K)


@given(seeds, st.integers(6, 12))
def test_omega_pair_near_degenerate(seed, k):
    rng = np.random.default_rng(seed)
    lam = np.array([0.3, 0.3 * (1 + 10.0 ** -k), 2.0, 7.0])
    U = random_unitary(rng, 4)
    A = (U * lam) @ U.conj().T
    K = ginibre(rng, 4)
    assert np.linalg.norm(omega(A, omega_inv(A, K)) - K) <= 1e-10 * np.linalg.norm(K)


@given(pd_with_direction())
def test_kernels_hs_positive(AK):
    A, K = AK
    for kind in KERNELS:
        v = np.vdot(K, kernel_operator(kind, A, t=0.7)(K))
        assert v.real >= -1e-12 * np.linalg.norm(K) ** 2
        assert abs(v.imag) <= 1e-10 * max(1.0, abs(v))


@given(pd_with_direction())
def test_omega_integral_definition_hermitian(AK):
    """Omega and its inverse preserve Hermiticity."""
    A, K = AK
    H = K + K.conj().T
    for X in (omega(A, H), omega_inv(A, H)):
        np.testing.assert_allclose(X, X.conj().T, atol=1e-10 * max(1.0, np.abs(X).max()))


def test_unknown_kernel():
    with pytest.raises(DomainError):
        kernel_operator("nope", np.eye(2))


def test_omega_inv_needs_definite_base():
    with pytest.raises(DomainError):
        omega_inv(np.diag([1.0, 0.0]), np.eye(2))


def test_restricted_mode():
    A = np.diag([2.0, 0.0])
    X = omega_inv(A, _unit(0, 0), restrict=True)
    np.testing.assert_allclose(X, _unit(0, 0) / 2)
    with pytest.raises(DomainError):
        omega_inv(A, _unit(0, 1), restrict=True)


def test_apply_kernel_alias():
    K = ginibre(np.random.default_rng(1), 2)
    op = kernel_operator("sum_inv", np.diag([1.0, 3.0]))
    np.testing.assert_allclose(apply_kernel(op, K), op(K))


def test_superoperator_matrix_matches_action():
    rng = np.random.default_rng(8)
    A = random_pd(rng, 3).matrix
    op = kernel_operator("omega_inv", A)
    S = superoperator_matrix(op)
    K = ginibre(rng, 3)
    np.testing.assert_allclose(S @ K.ravel(), op(K).ravel(), atol=1e-12)


# --- upsilon ---------------------------------------------------------------------------

def test_upsilon_identity_base():
    K = random_hermitian(np.random.default_rng(2), 3)
    np.testing.assert_allclose(upsilon(np.eye(3), K), K.conj().T @ K / 2, atol=1e-14)


@pytest.mark.parametrize("a,k", [(0.5, 1.0), (2.0, 3.0), (1e-3, 1e-2)])
def test_upsilon_scalar(a, k):
    assert upsilon(np.array([[a]]), np.array([[k]]))[0, 0].real == pytest.approx(k * k / (2 * a * a))


def test_upsilon_commuting():
    np.testing.assert_allclose(upsilon(np.diag([1.0, 2.0]), np.eye(2)), np.diag([0.5, 0.125]))


@given(pd_with_direction())
def test_upsilon_hs_positive(AK):
    A, K = AK
    assert np.vdot(A, upsilon(A, K)).real >= 0


# --- quadrature oracles -------------------------------------------------------------

def test_quadrature_config_validation():
    with pytest.raises(DomainError):
        QuadratureConfig(abs_tol=0)
    with pytest.raises(DomainError):
        QuadratureConfig(transform="nope")


def test_quadrature_nonconvergence_raises():
    q = QuadratureConfig(abs_tol=1e-300, rel_tol=1e-300, max_subdivisions=2)
    with pytest.raises(QuadratureError):
        integrate(lambda u: np.array([np.sin(50 * u) / (1 + u)]), q, half_line=True)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_quadratures_match_kernels(seed):
    rng = np.random.default_rng(seed)
    A = random_pd(rng, 4, 1e3).matrix
    K = ginibre(rng, 4)
    tol = 1e-8 * np.linalg.norm(K) * max(1.0, np.linalg.norm(A))
    assert np.linalg.norm(omega_quad(A, K) - omega(A, K)) <= tol
    assert np.linalg.norm(omega_inv_quad(A, K) - omega_inv(A, K)) <= 1e-7 * np.linalg.norm(omega_inv(A, K))
    assert np.linalg.norm(upsilon_quad(A, K) - upsilon(A, K)) <= 1e-7 * np.linalg.norm(upsilon(A, K))


def test_omega_inv_quad_simple():
    K = ginibre(np.random.default_rng(3), 2)
    np.testing.assert_allclose(omega_inv_quad(np.eye(2), K), K, atol=1e-9)
    np.testing.assert_allclose(omega_inv_quad(2 * np.eye(2), K), K / 2, atol=1e-9)


def test_omega_inv_quad_round_trip():
    rng = np.random.default_rng(6)
    A = random_pd(rng, 4, 1e3).matrix
    K = ginibre(rng, 4)
    assert np.max(np.abs(omega(A, omega_inv_quad(A, K)) - K)) <= 1e-7


def test_t_integrals_identity_base():
    K = ginibre(np.random.default_rng(5), 3)
    n2 = np.vdot(K, K).real
    assert trace_rep_t_integral(np.eye(3), K, "1/(1+t)") == pytest.approx(n2, rel=1e-8)
    assert trace_rep_t_integral(np.eye(3), K, "t/(1+t)^2") == pytest.approx(n2 / 2, rel=1e-8)


def test_t_integral_unknown_weight():
    with pytest.raises(DomainError):
        trace_rep_t_integral(np.eye(2), np.eye(2), "1/t")


@pytest.mark.parametrize("seed", [0, 1])
def test_t_integral_reproduces_kernel_forms(seed):
    rng = np.random.default_rng(seed)
    A = random_pd(rng, 3, 1e3).matrix
    K = ginibre(rng, 3)
    assert trace_rep_t_integral(A, K, "1/(1+t)") == pytest.approx(
        np.vdot(K, omega_inv(A, K)).real, rel=1e-7)
    assert trace_rep_t_integral(A, K, "1/(1+t)^2") == pytest.approx(
        np.vdot(A, upsilon(A, K)).real, rel=1e-7)


# --- exponential derivative -------------------------------------------------------

def test_exp_frechet_at_zero():
    G = random_hermitian(np.random.default_rng(0), 3)
    np.testing.assert_allclose(exp_frechet(np.zeros((3, 3)), G), G, atol=1e-14)


def test_exp_frechet_commuting():
    F, G = np.diag([0.3, -1.0, 2.0]), np.diag([1.0, 2.0, -0.5])
    np.testing.assert_allclose(exp_frechet(F, G), scipy.linalg.expm(F) @ G, atol=1e-13)


def test_exp_frechet_vs_scipy_frechet():
    rng = np.random.default_rng(9)
    F, G = random_hermitian(rng, 5), random_hermitian(rng, 5)
    _, ref = scipy.linalg.expm_frechet(F, G)
    np.testing.assert_allclose(exp_frechet(F, G), ref, atol=1e-10 * np.abs(ref).max())


@given(seeds)
def test_exp_frechet_finite_difference(seed):
    rng = np.random.default_rng(seed)
    F, G = random_hermitian(rng, 5), random_hermitian(rng, 5)
    h = 1e-5
    fd = (scipy.linalg.expm(F + h * G) - scipy.linalg.expm(F - h * G)) / (2 * h)
    scale = np.linalg.norm(scipy.linalg.expm(F), 2) * np.linalg.norm(G, 2)
    assert np.max(np.abs(exp_frechet(F, G) - fd)) <= 1e-8 * scale
    assert np.max(np.abs(exp_frechet(F, G) - exp_frechet_divdiff(F, G))) <= 1e-12 * scale


# --- sandwich ---------------------------------------------------------------------

def test_sandwich_identity():
    assert sandwich_margins(np.eye(3)) == pytest.approx((1.0, 0.5))


def test_sandwich_scalar_pair():
    assert 1 + 1 / E > log_divdiff(1.0, E) > 1 / (1 + E)
    assert 1.36787944117144232 > OMEGA_INV_1_E > 0.268941421369995121
    up, lo = sandwich_margins(np.diag([1.0, E]))
    # smallest gaps over all pairs come from the confluent pair (e, e): 1/e and 1/(2e)
    assert up == pytest.approx(1 / E, rel=1e-14)
    assert lo == pytest.approx(1 / (2 * E), rel=1e-14)


@given(pd_matrices(max_cond=1e6))
def test_sandwich_margins_nonnegative(A):
    up, lo = sandwich_margins(A)
    assert up >= -1e-12 and lo >= -1e-12


def test_sandwich_singular_rejected():
    with pytest.raises(DomainError):
        sandwich_margins(np.diag([1.0, 0.0]))
