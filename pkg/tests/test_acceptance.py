"""Acceptance gate: each criterion runs its suite at the stated size and tolerance.

Every criterion prints one ``PASS``/``FAIL`` line. Run directly with
``python3 tests/test_acceptance.py`` for the summary alone.
"""

import json
import sys
from dataclasses import dataclass

import pytest

from matconcave.cli import main
from matconcave.verify import REGISTRY, Tolerance, run_suite

DEFAULT_TOL = Tolerance(1e-10, 1e-9)


@dataclass(frozen=True)
class Criterion:
    number: int
    label: str
    runs: tuple  # (suite name, trials) pairs, all at dim 4

    def evaluate(self) -> tuple[bool, str]:
        parts, ok = [], True
        for name, trials in self.runs:
            r = run_suite(REGISTRY[name].build(dim=4, trials=trials, seed=0, tolerance=DEFAULT_TOL))
            ok = ok and r.passed
            parts.append(f"{name}: {trials} trials, {len(r.failures)} failures, {r.skipped} skipped, "
                         f"worst margin {r.worst_margin:.3g} ({r.worst_check})")
        return ok, "; ".join(parts)


CRITERIA = [
    Criterion(1, "f1 joint concavity", (("f1-concavity", 500),)),
    Criterion(2, "f2 joint convexity", (("f2-joint-convexity", 500),)),
    Criterion(3, "f3 concavity and second derivative", (("f3-concavity", 500),)),
    Criterion(4, "omega inverse pair", (("omega-inverse-pair", 500),)),
    Criterion(5, "quadrature cross-check", (("quadrature-crosscheck", 100),)),
    Criterion(6, "log series remainder", (("log-series", 50),)),
    Criterion(7, "exponential derivative", (("exp-frechet", 100),)),
    Criterion(8, "strip bounds", (("strip-bounds", 100),)),
    Criterion(9, "resolvent superadditivity", (("lemma41", 200),)),
    Criterion(10, "kernel sandwich", (("sandwich", 1000),)),
    Criterion(11, "strong subadditivity", (("ssa", 1000),)),
    Criterion(12, "relative entropy convexity",
              (("rel-entropy-convexity", 500), ("sym-rel-entropy", 500))),
    Criterion(13, "limit identity", (("limit-identity", 50),)),
    Criterion(14, "homogeneity and superadditivity", (("homogeneity", 200),)),
    Criterion(15, "block embedding", (("block-embed", 200),)),
]


def _verify_all_output(capsys, workers: int) -> list[dict]:
    code = main(["verify", "--suite", "all", "--dim", "3", "--trials", "30", "--seed", "5",
                 "--workers", str(workers)])
    out = capsys.readouterr().out if capsys is not None else None
    assert code == 0
    return out


def _strip_wall(text: str) -> str:
    docs = json.loads(text)
    for d in docs:
        d.pop("wall_ms")
    return json.dumps(docs, indent=2)


def _emit(capsys, line: str):
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line, end="")


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: f"criterion-{c.number:02d}")
def test_criterion(criterion, capsys):
    ok, detail = criterion.evaluate()
    _emit(capsys, f"[{'PASS' if ok else 'FAIL'}] {criterion.number:2d} {criterion.label}: {detail}")
    assert ok, detail


def test_criterion_16_determinism(capsys):
    first = _verify_all_output(capsys, 1)
    second = _verify_all_output(capsys, 1)
    threaded = _verify_all_output(capsys, 2)
    same = _strip_wall(first) == _strip_wall(second) == _strip_wall(threaded)
    _emit(capsys, f"[{'PASS' if same else 'FAIL'}] 16 determinism: 'verify --suite all' repeated and "
                  f"threaded reports byte-identical apart from wall_ms: {same}")
    assert same


if __name__ == "__main__":
    results = []
    for c in CRITERIA:
        ok, detail = c.evaluate()
        results.append(ok)
        print(f"[{'PASS' if ok else 'FAIL'}] {c.number:2d} {c.label}: {detail}", flush=True)
    import contextlib
    import io
    texts = []
    for workers in (1, 1, 2):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            main(["verify", "--suite", "all", "--dim", "3", "--trials", "30", "--seed", "5",
                  "--workers", str(workers)])
        texts.append(_strip_wall(buf.getvalue()))
    same = len(set(texts)) == 1
    results.append(same)
    print(f"[{'PASS' if same else 'FAIL'}] 16 determinism: reports byte-identical apart from wall_ms: {same}")
    sys.exit(0 if all(results) else 1)
