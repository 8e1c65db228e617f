"""Run every registered suite at acceptance size and write JSON reports.

    python3 scripts/run_acceptance.py --out results/acceptance
"""

from __future__ import annotations

import argparse
import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from matconcave.cli import _finite_or_str
from matconcave.verify import REGISTRY, Tolerance, run_suite

TRIALS = {
    "f1-concavity": 500, "f2-joint-convexity": 500, "f3-concavity": 500, "lemma41": 200,
    "omega-inverse-pair": 500, "quadrature-crosscheck": 100, "log-series": 50, "exp-frechet": 100,
    "strip-bounds": 100, "sandwich": 1000, "delta-convexity-and-fd": 200, "ssa": 1000,
    "rel-entropy-convexity": 500, "sym-rel-entropy": 500, "limit-identity": 50, "homogeneity": 200,
    "block-embed": 200, "bures": 200,
}


@dataclass(frozen=True)
class AcceptanceConfig:
    dim: int = 4
    seed: int = 0
    tol_abs: float = 1e-10
    tol_rel: float = 1e-9
    workers: int = 1
    out: str = "results/acceptance"


def run(cfg: AcceptanceConfig) -> bool:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    tol = Tolerance(cfg.tol_abs, cfg.tol_rel)
    summary, all_ok = [], True
    start = time.perf_counter()
    for name, trials in TRIALS.items():
        report = run_suite(REGISTRY[name].build(dim=cfg.dim, trials=trials, seed=cfg.seed,
                                                tolerance=tol), workers=cfg.workers)
        doc = _finite_or_str(report.to_dict())
        (out / f"{name}.json").write_text(json.dumps(doc, indent=2))
        all_ok &= report.passed
        summary.append({k: doc[k] for k in ("suite", "trials", "passed", "worst_margin", "worst_check",
                                            "skipped", "checks", "wall_ms")})
        print(f"{'PASS' if report.passed else 'FAIL'}  {name:24s} {trials:5d} trials  "
              f"worst {report.worst_margin:+.3e}  {report.wall_ms / 1000:6.2f}s", flush=True)
    (out / "summary.json").write_text(json.dumps({"config": asdict(cfg), "suites": summary}, indent=2))
    print(f"total {time.perf_counter() - start:.1f}s, {'all passed' if all_ok else 'FAILURES'}")
    return all_ok


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f, v in asdict(AcceptanceConfig()).items():
        p.add_argument("--" + f.replace("_", "-"), type=type(v), default=v)
    return 0 if run(AcceptanceConfig(**vars(p.parse_args()))) else 1


if __name__ == "__main__":
    raise SystemExit(main())
