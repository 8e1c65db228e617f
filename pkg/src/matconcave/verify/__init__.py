"""Randomized falsification of matrix inequalities."""

from .engine import (
    CHECK_KINDS,
    Margin,
    PropertySuite,
    SkipTrial,
    Tolerance,
    TrialRecord,
    VerificationReport,
    equality,
    run_suite,
    trial_seed_sequence,
)
from .suites import REGISTRY, SuiteEntry, get_suite

__all__ = [
    "CHECK_KINDS", "Margin", "PropertySuite", "SkipTrial", "Tolerance", "TrialRecord",
    "VerificationReport", "equality", "run_suite", "trial_seed_sequence",
    "REGISTRY", "SuiteEntry", "get_suite",
]
