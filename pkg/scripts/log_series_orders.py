"""Observed convergence orders of the first- and second-order log expansions.

For random positive definite A and Hermitian K with ||K|| = lambda_min / 2,
prints residual norms of log(A + xK) after the first- and second-order terms
as x halves, together with the successive ratios (about 4 and 8).
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from matconcave.linalg import matrix_log, random_hermitian, random_pd
from matconcave.superops import omega_inv, upsilon


@dataclass(frozen=True)
class OrdersConfig:
    dim: int = 4
    seed: int = 0
    max_cond: float = 10.0
    x0: float = 0.05
    halvings: int = 7


def residuals(cfg: OrdersConfig):
    rng = np.random.default_rng(cfg.seed)
    A = random_pd(rng, cfg.dim, cfg.max_cond)
    K = random_hermitian(rng, cfg.dim)
    K *= 0.5 * A.eigenvalues[0] / np.linalg.norm(K, 2)
    L0, D1, D2 = matrix_log(A), omega_inv(A, K), upsilon(A, K)
    out = []
    for j in range(cfg.halvings):
        x = cfg.x0 / 2 ** j
        Lx = matrix_log(A.matrix + x * K)
        out.append((x, np.linalg.norm(Lx - L0 - x * D1), np.linalg.norm(Lx - L0 - x * D1 + x * x * D2)))
    return out


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f, v in OrdersConfig().__dict__.items():
        p.add_argument("--" + f.replace("_", "-"), type=type(v), default=v)
    rows = residuals(OrdersConfig(**vars(p.parse_args())))
    print(f"{'x':>10} {'first-order res':>16} {'ratio':>7} {'second-order res':>17} {'ratio':>7}")
    prev = None
    for x, r1, r2 in rows:
        q1 = f"{prev[0] / r1:7.2f}" if prev else " " * 7
        q2 = f"{prev[1] / r2:7.2f}" if prev else " " * 7
        print(f"{x:10.3e} {r1:16.3e} {q1} {r2:17.3e} {q2}")
        prev = (r1, r2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
