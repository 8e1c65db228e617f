import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from matconcave.errors import DomainError
from matconcave.linalg import ginibre, random_hermitian, random_pd
from matconcave.verify import (
    REGISTRY,
    Margin,
    PropertySuite,
    SkipTrial,
    Tolerance,
    equality,
    run_suite,
    trial_seed_sequence,
)
from matconcave.verify import checks
from matconcave.verify.engine import run_trial

from conftest import seeds, weights

SUITE_NAMES = ["f1-concavity", "f2-joint-convexity", "f3-concavity", "lemma41", "omega-inverse-pair",
               "quadrature-crosscheck", "log-series", "exp-frechet", "strip-bounds", "sandwich",
               "delta-convexity-and-fd", "ssa", "rel-entropy-convexity", "sym-rel-entropy",
               "limit-identity", "homogeneity", "block-embed", "bures"]


def _constant_trial(margin, scale=1.0):
    def trial(rng, n):
        return [Margin("const", margin, scale)]
    return trial


# --- tolerance model and engine ------------------------------------------------------

def test_tolerance_model():
    t = Tolerance(1e-10, 1e-9)
    assert t.allows(-1e-10, 0.0)
    assert not t.allows(-2e-10, 0.0)
    assert t.allows(-1e-6, 1e3)


def test_equality_margin():
    m = equality("x", 1.0 + 1e-12, 1.0)
    assert m.margin == pytest.approx(-1e-12) and m.scale == 1.0


@pytest.mark.parametrize("kwargs", [dict(trials=0), dict(dim=0), dict(check_kind="nope"),
                                    dict(tolerance=Tolerance(0.0, 1e-9))])
def test_suite_validation(kwargs):
    with pytest.raises(DomainError):
        PropertySuite("x", _constant_trial(1.0), **kwargs)


def test_failures_recorded_with_seed():
    suite = PropertySuite("bad", _constant_trial(-1.0), trials=3)
    report = run_suite(suite)
    assert not report.passed
    assert [f.trial_index for f in report.failures] == [0, 1, 2]
    assert report.failures[0].derived_seed != report.failures[1].derived_seed
    assert "const" in report.failures[0].reason


def test_exceptions_become_failures():
    def trial(rng, n):
        raise ArithmeticError("boom")
    report = run_suite(PropertySuite("err", trial, trials=2))
    assert len(report.failures) == 2 and report.worst_margin == -np.inf


def test_skip_cap():
    def trial(rng, n):
        if rng.random() < 0.5:
            raise SkipTrial("out of domain")
        return [Margin("ok", 1.0)]
    report = run_suite(PropertySuite("skippy", trial, trials=40))
    assert report.skipped > 4 and not report.failures
    assert not report.passed


def test_per_margin_tolerance_overrides_suite():
    def trial(rng, n):
        return [Margin("pinned", -1e-6, 1.0, Tolerance(1e-5, 1e-300))]
    assert run_suite(PropertySuite("pinned", trial, trials=1)).passed


def test_trial_seed_depends_on_suite_and_index():
    a = trial_seed_sequence(0, "s", 1).generate_state(1)
    assert np.array_equal(a, trial_seed_sequence(0, "s", 1).generate_state(1))
    assert not np.array_equal(a, trial_seed_sequence(0, "s", 2).generate_state(1))
    assert not np.array_equal(a, trial_seed_sequence(0, "t", 1).generate_state(1))
    assert not np.array_equal(a, trial_seed_sequence(1, "s", 1).generate_state(1))


def test_run_trial_is_order_independent():
    suite = REGISTRY["f1-concavity"].build(trials=5)
    late = run_trial(suite, 4)
    for i in range(4):
        run_trial(suite, i)
    assert run_trial(suite, 4) == late


@pytest.mark.parametrize("name", ["f1-concavity", "ssa", "bures"])
def test_serial_and_parallel_reports_identical(name):
    suite = REGISTRY[name].build(dim=3, trials=12, seed=3)
    a, b = run_suite(suite).to_dict(), run_suite(suite, workers=4).to_dict()
    a.pop("wall_ms"), b.pop("wall_ms")
    assert a == b


def test_report_schema():
    d = run_suite(REGISTRY["block-embed"].build(dim=2, trials=3)).to_dict()
    for key in ("suite", "dim", "trials", "seed", "tol_abs", "tol_rel", "failures", "worst_margin",
                "skipped", "wall_ms"):
        assert key in d


# --- registry --------------------------------------------------------------------------

def test_registry_names():
    assert list(REGISTRY) == SUITE_NAMES


@pytest.mark.parametrize("name", SUITE_NAMES)
@pytest.mark.parametrize("dim", [1, 3])
def test_every_suite_passes_small(name, dim):
    report = run_suite(REGISTRY[name].build(dim=dim, trials=4, seed=11))
    assert report.passed, [f.reason for f in report.failures]
    assert report.checks > 0


def test_injected_bug_is_caught():
    """A deliberately wrong functional must produce failures."""
    wrong = checks.FunctionalTag("convex-claimed-concave", lambda A: np.trace(A @ A).real, True)

    def trial(rng, n):
        return [checks.check_concavity(wrong, (random_pd(rng, n).matrix,), (random_pd(rng, n).matrix,), 0.5)]
    assert not run_suite(PropertySuite("bug", trial, "concave-single", dim=3, trials=10)).passed


# --- individual checks ------------------------------------------------------------------

def test_concavity_degenerate_mixture_zero_margin():
    rng = np.random.default_rng(0)
    A, B, K = random_pd(rng, 3).matrix, random_pd(rng, 3).matrix, ginibre(rng, 3)
    m = checks.check_concavity(checks.F1(K, 0.4), (A, B), (A, B), 0.3)
    assert abs(m.margin) <= 1e-12 * m.scale


def test_concavity_rejects_bad_weight():
    with pytest.raises(DomainError):
        checks.check_concavity(checks.vn_entropy(), (np.eye(2),), (np.eye(2),), 1.0)


@given(seeds, weights)
def test_concavity_margins_nonnegative(seed, lam):
    rng = np.random.default_rng(seed)
    K = random_hermitian(rng, 3)
    X1, X2 = (random_pd(rng, 3).matrix,), (random_pd(rng, 3).matrix,)
    for F in (checks.F3(K), checks.vn_entropy(), checks.F1_diagonal(ginibre(rng, 3), 0.3)):
        m = checks.check_concavity(F, X1, X2, lam)
        assert Tolerance().allows(m.margin, m.scale)


def test_homogeneity_linear_case_exact():
    rng = np.random.default_rng(1)
    F = checks.F3(np.zeros((3, 3)))
    X1, X2 = (random_pd(rng, 3).matrix,), (random_pd(rng, 3).matrix,)
    margins = checks.check_homogeneity_superadditivity(F, X1, X2)
    assert all(abs(m.margin) <= 1e-12 * max(1.0, m.scale) for m in margins)


@given(seeds)
def test_homogeneity_random(seed):
    rng = np.random.default_rng(seed)
    F = checks.F2()
    X = [(random_pd(rng, 3).matrix, random_pd(rng, 3).matrix, ginibre(rng, 3)) for _ in range(2)]
    for m in checks.check_homogeneity_superadditivity(F, *X):
        assert (m.tol or Tolerance()).allows(m.margin, m.scale)


def test_derivative_quotient_linear_case():
    rng = np.random.default_rng(2)
    F = checks.F3(np.zeros((3, 3)))
    A, B = (random_pd(rng, 3).matrix,), (random_pd(rng, 3).matrix,)
    for m in checks.check_derivative_inequality(F, A, B):
        assert abs(m.margin) <= 1e-12 * max(1.0, m.scale)


@given(seeds)
def test_derivative_inequality_f3_and_f1_diagonal(seed):
    rng = np.random.default_rng(seed)
    A, B = (random_pd(rng, 3).matrix,), (random_pd(rng, 3).matrix,)
    for F in (checks.F3(random_hermitian(rng, 3)), checks.F1_diagonal(ginibre(rng, 3), 0.6)):
        for m in checks.check_derivative_inequality(F, A, B, xs=(0.5, 0.1, 0.02, 1e-3)):
            assert Tolerance().allows(m.margin, m.scale), m


def test_derivative_grid_validation():
    with pytest.raises(DomainError):
        checks.check_derivative_inequality(checks.vn_entropy(), (np.eye(2),), (np.eye(2),), xs=(0.1, 0.2))


def test_f3_second_derivative_linear_and_commuting():
    A = np.diag([1.0, 2.0, 3.0])
    assert checks.f3_second_derivative_closed(A, np.diag([0.5, -1.0, 2.0]), np.zeros((3, 3))) == \
        pytest.approx(0.0, abs=1e-12)
    assert checks.f3_second_derivative_closed(A, np.diag([0.5, -1.0, 2.0]), np.diag([0.3, 0.1, -0.2])) == \
        pytest.approx(0.0, abs=1e-12)


@given(seeds)
def test_f3_second_derivative_matches_fd(seed):
    rng = np.random.default_rng(seed)
    A = random_pd(rng, 4, 1e2)
    B = random_hermitian(rng, 4)
    B *= 0.5 * A.eigenvalues[0] / np.linalg.norm(B, 2)
    for m in checks.check_f3_second_derivative(A, B, random_hermitian(rng, 4)):
        assert m.tol.allows(m.margin, m.scale), m


def test_f3_second_derivative_skips_outside_cone():
    with pytest.raises(SkipTrial):
        checks.check_f3_second_derivative(np.eye(2) * 1e-4, np.eye(2), np.zeros((2, 2)))


def test_resolvent_single_summand_zero_margin():
    rng = np.random.default_rng(3)
    sample = (random_pd(rng, 3).matrix, ginibre(rng, 3))
    m, = checks.check_resolvent_superadditivity(1.0, [sample])
    assert abs(m.margin) <= 1e-14 * m.scale


@given(seeds, st.sampled_from([0.0, 0.1, 1.0, 10.0, 1000.0]))
def test_resolvent_superadditivity(seed, t):
    rng = np.random.default_rng(seed)
    samples = [(random_pd(rng, 3).matrix, ginibre(rng, 3)) for _ in range(2)]
    for m in checks.check_resolvent_superadditivity(t, samples, (0.3, 0.7)):
        assert Tolerance().allows(m.margin, m.scale), m


def test_resolvent_t0_is_inverse_form():
    rng = np.random.default_rng(4)
    A, K = random_pd(rng, 3).matrix, ginibre(rng, 3)
    ref = np.vdot(K, np.linalg.solve(A, K)).real
    assert checks.resolvent_form(0.0)(A, K) == pytest.approx(ref, rel=1e-10)
