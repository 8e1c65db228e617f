"""Accuracy of the divided-difference kernels as two eigenvalues merge.

For a_j = a_i (1 + 10^-k), k = 1..15, compares the closed-form kernels with
adaptive quadrature of their integral definitions and prints relative errors.
The three-point kernel is swept with the third point both nearby and far.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from matconcave.superops import log_divdiff, log_divdiff2_neg


@dataclass(frozen=True)
class SweepConfig:
    base: float = 0.9
    far: float = 2.5
    k_min: int = 1
    k_max: int = 15


def oracle_first(a, b):
    return quad(lambda u: 1 / ((a + u) * (b + u)), 0, np.inf, epsabs=0, epsrel=1e-13, limit=200)[0]


def oracle_second(a, b, c):
    return quad(lambda u: 1 / ((a + u) * (b + u) * (c + u)), 0, np.inf, epsabs=0, epsrel=1e-13,
                limit=200)[0]


def sweep(cfg: SweepConfig):
    rows = []
    a = cfg.base
    for k in range(cfg.k_min, cfg.k_max + 1):
        b = a * (1 + 10.0 ** -k)
        e1 = abs(log_divdiff(a, b) / oracle_first(a, b) - 1)
        c_near = a * (1 - 10.0 ** -k)
        e2 = abs(log_divdiff2_neg(a, b, c_near) / oracle_second(a, b, c_near) - 1)
        c_far = cfg.far * a
        e3 = abs(log_divdiff2_neg(a, b, c_far) / oracle_second(a, b, c_far) - 1)
        rows.append((k, e1, e2, e3))
    return rows


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f, v in SweepConfig().__dict__.items():
        p.add_argument("--" + f.replace("_", "-"), type=type(v), default=v)
    cfg = SweepConfig(**vars(p.parse_args()))
    print(f"{'k':>3} {'[a,b] rel err':>15} {'[a,b,c~a] rel err':>19} {'[a,b,c far] rel err':>21}")
    for k, e1, e2, e3 in sweep(cfg):
        print(f"{k:3d} {e1:15.2e} {e2:19.2e} {e3:21.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
