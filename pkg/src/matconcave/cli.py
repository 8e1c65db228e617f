"""Command-line entry point: ``matconcave {verify,eval,list}``.

Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 I/O error,
4 domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import functionals as fn
from .errors import DomainError, NumericalConsistencyError
from .linalg import TripartiteState
from .superops import kernel_operator
from .verify import REGISTRY, Tolerance, VerificationReport, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO, EXIT_DOMAIN = 0, 1, 2, 3, 4
MAX_DIM = 64
MAX_TRIALS = 10 ** 6
ROLES = ("A", "B", "K", "P", "Q", "rho")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    command: str
    suite: str = "all"
    dim: int = 4
    trials: int = 500
    seed: int = 0
    tol_abs: float = 1e-10
    tol_rel: float = 1e-9
    output_path: str | None = None
    format: str = "json"
    workers: int = 1

    def __post_init__(self):
        if not 1 <= self.dim <= MAX_DIM:
            raise UsageError(f"--dim must lie in [1, {MAX_DIM}], got {self.dim}")
        if not 1 <= self.trials <= MAX_TRIALS:
            raise UsageError(f"--trials must lie in [1, {MAX_TRIALS}], got {self.trials}")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError("--seed must be a non-negative 64-bit integer")
        if self.tol_abs <= 0 or self.tol_rel <= 0:
            raise UsageError("tolerances must be positive")
        if self.workers < 1:
            raise UsageError("--workers must be at least 1")


# --- matrix files ----------------------------------------------------------------

def _decode_matrix(role: str, entry: dict) -> np.ndarray:
    try:
        n = int(entry["dim"])
        re_ = np.asarray(entry["real"], dtype=float)
        im_ = np.asarray(entry.get("imag", np.zeros((n, n))), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"matrix {role!r} is malformed: {exc}") from exc
    if re_.shape != (n, n) or im_.shape != (n, n):
        raise UsageError(f"matrix {role!r} must be {n}x{n}")
    M = re_ + 1j * im_
    if not np.all(np.isfinite(M)):
        raise UsageError(f"matrix {role!r} has non-finite entries")
    return M


def read_matrix_file(path: str | Path) -> dict:
    """Load a MatrixFile into ``{role: ndarray}`` plus ``"dims"`` if present."""
    try:
        doc = json.loads(Path(path).read_text())
    except OSError:
        raise
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise UsageError(f"{path}: expected a JSON object keyed by role")
    out = {role: _decode_matrix(role, doc[role]) for role in ROLES if role in doc}
    dims = doc.get("dims", doc.get("rho", {}).get("dims") if isinstance(doc.get("rho"), dict) else None)
    if dims is not None:
        out["dims"] = tuple(int(d) for d in dims)
    return out


def encode_matrix(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"dim": M.shape[0], "real": M.real.tolist(), "imag": M.imag.tolist()}


def write_matrix_file(path: str | Path, dims: Sequence[int] | None = None, **mats) -> None:
    unknown = set(mats) - set(ROLES)
    if unknown:
        raise UsageError(f"unknown roles {sorted(unknown)}")
    doc = {role: encode_matrix(M) for role, M in mats.items()}
    if dims is not None:
        doc["dims"] = list(dims)
    Path(path).write_text(json.dumps(doc, indent=1))


# --- eval ------------------------------------------------------------------------

@dataclass(frozen=True)
class EvalSpec:
    roles: tuple
    run: Callable[[dict, argparse.Namespace], float]


def _resolvent_value(m, a):
    X = kernel_operator("resolvent_pair", m["A"], t=a.t)(m["K"])
    return fn.real_part(np.vdot(m["K"], X), "resolvent form")


def _ssa_value(m, a):
    if "dims" not in m:
        raise UsageError("ssa needs \"dims\" for rho")
    return fn.ssa_deficit(TripartiteState.from_array(m["rho"], m["dims"]))


EVALUATORS: dict[str, EvalSpec] = {
    "f1": EvalSpec(("A", "B", "K"), lambda m, a: fn.lieb_f1(m["A"], m["B"], m["K"], a.p)),
    "f2": EvalSpec(("A", "B", "K"), lambda m, a: fn.lieb_f2(m["A"], m["B"], m["K"])),
    "f3": EvalSpec(("A", "K"), lambda m, a: fn.lieb_f3(m["A"], m["K"])),
    "vn_entropy": EvalSpec(("P",), lambda m, a: fn.vn_entropy(m["P"])),
    "rel_entropy": EvalSpec(("P", "Q"), lambda m, a: fn.rel_entropy(m["P"], m["Q"])),
    "sym_rel_entropy": EvalSpec(("P", "Q"), lambda m, a: fn.sym_rel_entropy(m["P"], m["Q"])),
    "cond_entropy_blockdiag": EvalSpec(("A", "B"),
                                       lambda m, a: fn.cond_entropy_blockdiag([m["A"], m["B"]])),
    "delta": EvalSpec(("A", "K"), lambda m, a: fn.delta_quadratic(m["A"], m["K"])),
    "lemma41": EvalSpec(("A", "K"), _resolvent_value),
    "bures": EvalSpec(("P", "Q"), lambda m, a: fn.bures_distance(m["P"], m["Q"])),
    "ssa": EvalSpec(("rho",), _ssa_value),
}


def format_value(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.15g}"


def cmd_eval(args: argparse.Namespace) -> int:
    name = args.functional.lower()
    if name not in EVALUATORS:
        raise UsageError(f"unknown functional {args.functional!r}; choose from {', '.join(EVALUATORS)}")
    spec = EVALUATORS[name]
    mats = read_matrix_file(args.file)
    missing = [r for r in spec.roles if r not in mats]
    if missing:
        raise UsageError(f"{name} needs roles {list(spec.roles)}; missing {missing}")
    if name == "f1" and args.p is None:
        raise UsageError("f1 needs --p")
    print(format_value(spec.run(mats, args)))
    return EXIT_OK


# --- verify ----------------------------------------------------------------------

def _finite_or_str(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, dict):
        return {k: _finite_or_str(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_finite_or_str(v) for v in x]
    return x


CSV_FIELDS = ("suite", "dim", "trials", "seed", "tol_abs", "tol_rel", "failures", "worst_margin",
              "worst_check", "skipped", "checks", "passed", "wall_ms")


def render_reports(reports: list[VerificationReport], fmt: str, single: bool) -> str:
    if fmt == "json":
        docs = [_finite_or_str(r.to_dict()) for r in reports]
        return json.dumps(docs[0] if single else docs, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in reports:
            d = r.to_dict()
            d["failures"] = len(r.failures)
            w.writerow([_finite_or_str(d[k]) for k in CSV_FIELDS])
        return buf.getvalue()
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.suite:24s} worst margin {r.worst_margin:.3e}"
             for r in reports]
    ok = all(r.passed for r in reports)
    lines.append("ALL SUITES PASSED" if ok else
                 f"FAILED: {sum(not r.passed for r in reports)} of {len(reports)} suites")
    return "\n".join(lines) + "\n"


def cmd_verify(cfg: CliConfig) -> int:
    names = list(REGISTRY) if cfg.suite == "all" else [cfg.suite]
    if any(n not in REGISTRY for n in names):
        raise UsageError(f"unknown suite {cfg.suite!r}; available suites:\n  " + "\n  ".join(REGISTRY))
    tol = Tolerance(cfg.tol_abs, cfg.tol_rel)
    reports = [run_suite(REGISTRY[n].build(dim=cfg.dim, trials=cfg.trials, seed=cfg.seed,
                                           tolerance=tol), workers=cfg.workers)
               for n in names]
    text = render_reports(reports, cfg.format, single=cfg.suite != "all")
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


# --- list ------------------------------------------------------------------------

def cmd_list(fmt: str) -> int:
    entries = [{"name": e.name, "check_kind": e.check_kind, "description": e.description,
                "statement": e.statement} for e in REGISTRY.values()]
    if fmt == "json":
        print(json.dumps(entries, indent=2))
    else:
        for e in entries:
            print(f"{e['name']:24s} {e['description']}  [{e['statement']}]")
    return EXIT_OK


# --- argument parsing ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matconcave",
                                     description="Randomized checks of matrix concavity inequalities.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", default="all", help="suite name or 'all'")
    v.add_argument("--dim", type=int, default=4)
    v.add_argument("--trials", type=int, default=500)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol-abs", type=float, default=1e-10)
    v.add_argument("--tol-rel", type=float, default=1e-9)
    v.add_argument("--output", default=None, help="write the report here instead of stdout")
    v.add_argument("--format", choices=("json", "csv", "human"), default="json")
    v.add_argument("--workers", type=int, default=1)

    e = sub.add_parser("eval", help="evaluate a functional on matrices from a JSON file")
    e.add_argument("functional", help=", ".join(EVALUATORS))
    e.add_argument("file", help="MatrixFile JSON")
    e.add_argument("--p", type=float, default=None, help="exponent for f1")
    e.add_argument("--t", type=float, default=0.0, help="resolvent parameter for lemma41")

    ls = sub.add_parser("list", help="list the suite registry")
    ls.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list":
            return cmd_list(args.format)
        if args.command == "eval":
            return cmd_eval(args)
        cfg = CliConfig("verify", args.suite, args.dim, args.trials, args.seed, args.tol_abs,
                        args.tol_rel, args.output, args.format, args.workers)
        return cmd_verify(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, NumericalConsistencyError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
