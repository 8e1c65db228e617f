"""Monte-Carlo property engine: tolerance model, trial records, suite runner."""

from __future__ import annotations

import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from ..errors import DomainError

CHECK_KINDS = ("concave-joint", "convex-joint", "concave-single", "midpoint",
               "superadditive", "homogeneous-degree-1", "derivative-identity",
               "bound", "equality")
MAX_SKIP_FRACTION = 0.10


@dataclass(frozen=True)
class Tolerance:
    abs: float = 1e-10
    rel: float = 1e-9

    def allows(self, margin: float, scale: float) -> bool:
        return margin >= -(self.abs + self.rel * scale)

    def slack(self, margin: float, scale: float) -> float:
        return margin + self.abs + self.rel * scale


@dataclass(frozen=True)
class Margin:
    """One checked quantity: ``margin >= 0`` is the exact claim.

    ``tol=None`` means the suite's tolerance model applies; criteria with a
    pinned tolerance of their own (finite differences, quadrature) set it.
    """

    name: str
    margin: float
    scale: float = 0.0
    tol: Tolerance | None = None


def equality(name: str, value: float, reference: float, tol: Tolerance | None = None,
             scale: float | None = None) -> Margin:
    """Margin -|value - reference| with scale |reference| unless given."""
    diff = abs(value - reference)
    return Margin(name, -float(diff), abs(float(reference)) if scale is None else float(scale), tol)


class SkipTrial(Exception):
    """Raised by a trial whose random draw falls outside the check's domain."""


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    derived_seed: int
    margin: float
    scale: float
    passed: bool
    check: str = ""
    reason: str = ""
    skipped: bool = False


@dataclass(frozen=True)
class PropertySuite:
    name: str
    trial: Callable[[np.random.Generator, int], list[Margin]] = field(repr=False)
    check_kind: str = "bound"
    dim: int = 4
    trials: int = 500
    seed: int = 0
    tolerance: Tolerance = Tolerance()
    description: str = ""
    statement: str = ""

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("a suite needs at least one trial")
        if self.tolerance.abs <= 0 or self.tolerance.rel <= 0:
            raise DomainError("suite tolerances must be positive")
        if self.check_kind not in CHECK_KINDS:
            raise DomainError(f"unknown check kind {self.check_kind!r}")
        if self.dim < 1:
            raise DomainError("dim must be positive")


@dataclass
class VerificationReport:
    suite: str
    dim: int
    trials: int
    seed: int
    tol_abs: float
    tol_rel: float
    failures: list[TrialRecord]
    worst_margin: float
    worst_check: str
    skipped: int
    checks: int
    wall_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures and self.skipped <= MAX_SKIP_FRACTION * self.trials

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "dim": self.dim,
            "trials": self.trials,
            "seed": self.seed,
            "tol_abs": self.tol_abs,
            "tol_rel": self.tol_rel,
            "failures": [
                {"trial": r.trial_index, "seed": r.derived_seed, "margin": r.margin,
                 "scale": r.scale, "reason": r.reason}
                for r in self.failures
            ],
            "worst_margin": self.worst_margin,
            "worst_check": self.worst_check,
            "skipped": self.skipped,
            "checks": self.checks,
            "passed": self.passed,
            "wall_ms": self.wall_ms,
        }


def trial_seed_sequence(seed: int, suite: str, index: int) -> np.random.SeedSequence:
    """Per-trial stream keyed by (seed, suite name, trial index)."""
    return np.random.SeedSequence(int(seed) % 2**64,
                                  spawn_key=(zlib.crc32(suite.encode()), int(index)))


def run_trial(suite: PropertySuite, index: int) -> tuple[TrialRecord, int]:
    ss = trial_seed_sequence(suite.seed, suite.name, index)
    derived = int(ss.generate_state(1, np.uint64)[0])
    rng = np.random.default_rng(ss)
    try:
        margins = suite.trial(rng, suite.dim)
    except SkipTrial as exc:
        return TrialRecord(index, derived, 0.0, 0.0, True, reason=f"skipped: {exc}", skipped=True), 0
    except Exception as exc:  # recorded, never raised: one bad trial must not hide the rest
        return TrialRecord(index, derived, float("-inf"), 0.0, False,
                           reason=f"{type(exc).__name__}: {exc}"), 0
    worst, worst_slack, ok = None, np.inf, True
    for m in margins:
        tol = m.tol or suite.tolerance
        if not np.isfinite(m.margin):
            slack = -np.inf
        else:
            slack = tol.slack(m.margin, m.scale)
        ok = ok and np.isfinite(m.margin) and tol.allows(m.margin, m.scale)
        if worst is None or slack < worst_slack:
            worst, worst_slack = m, slack
    if worst is None:
        return TrialRecord(index, derived, 0.0, 0.0, True), 0
    reason = "" if ok else f"{worst.name} violated (margin {worst.margin:.6g}, scale {worst.scale:.6g})"
    return TrialRecord(index, derived, float(worst.margin), float(worst.scale), bool(ok),
                       check=worst.name, reason=reason), len(margins)


def run_suite(suite: PropertySuite, *, workers: int = 1) -> VerificationReport:
    """Run every trial and aggregate; the result depends only on ``suite``."""
    start = time.perf_counter()
    indices = range(suite.trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda i: run_trial(suite, i), indices))
    else:
        results = [run_trial(suite, i) for i in indices]
    results.sort(key=lambda r: r[0].trial_index)
    records = [r for r, _ in results]
    live = [r for r in records if not r.skipped]
    worst = min(live, key=lambda r: (r.margin, r.trial_index)) if live else None
    return VerificationReport(
        suite=suite.name,
        dim=suite.dim,
        trials=suite.trials,
        seed=suite.seed,
        tol_abs=suite.tolerance.abs,
        tol_rel=suite.tolerance.rel,
        failures=[r for r in records if not r.passed],
        worst_margin=worst.margin if worst else 0.0,
        worst_check=worst.check if worst else "",
        skipped=sum(r.skipped for r in records),
        checks=sum(n for _, n in results),
        wall_ms=round((time.perf_counter() - start) * 1000, 3),
    )


def record_dict(r: TrialRecord) -> dict:
    return asdict(r)
