"""Falsifiable checks: each turns one inequality or identity into margins.

Slots of a functional are tuples of arrays; mixtures and sums act slot by
slot, so joint concavity of (A, B) -> F(A, B) and single-slot concavity of
A -> F(A) go through the same code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .. import functionals as fn
from ..errors import DomainError
from ..linalg import as_psd, matrix_exp, matrix_log
from ..superops import kernel_operator, omega, omega_inv, upsilon
from .engine import Margin, SkipTrial, Tolerance, equality


@dataclass(frozen=True, eq=False)
class FunctionalTag:
    """A functional of one or more matrix slots with a known curvature."""

    name: str
    evaluate: Callable[..., float]
    concave: bool
    params: tuple = ()

    def __call__(self, *slots) -> float:
        return self.evaluate(*slots)

    @property
    def curvature(self) -> str:
        return "concave" if self.concave else "convex"


def F1(K, p: float) -> FunctionalTag:
    return FunctionalTag("F1", lambda A, B: fn.lieb_f1(A, B, K, p), True, (K, p))


def F1_diagonal(K, p: float) -> FunctionalTag:
    return FunctionalTag("F1-diagonal", lambda A: fn.lieb_f1(A, A, K, p), True, (K, p))


def F2() -> FunctionalTag:
    return FunctionalTag("F2", fn.lieb_f2, False)


def F3(K) -> FunctionalTag:
    return FunctionalTag("F3", lambda A: fn.lieb_f3(A, K), True, (K,))


def vn_entropy() -> FunctionalTag:
    return FunctionalTag("vn_entropy", fn.vn_entropy, True)


def rel_entropy() -> FunctionalTag:
    return FunctionalTag("rel_entropy", fn.rel_entropy, False)


def sym_rel_entropy() -> FunctionalTag:
    return FunctionalTag("sym_rel_entropy",
                         lambda P, Q: fn.sym_rel_entropy(P, Q, check=False), False)


def cond_entropy_blockdiag() -> FunctionalTag:
    return FunctionalTag("cond_entropy_blockdiag",
                         lambda *blocks: fn.cond_entropy_blockdiag(blocks), True)


def delta() -> FunctionalTag:
    return FunctionalTag("delta", fn.delta_quadratic, False)


def resolvent_form(t: float) -> FunctionalTag:
    def value(A, K):
        X = kernel_operator("resolvent_pair", A, t=t)(K)
        return fn.real_part(np.vdot(K, X), "resolvent form")
    return FunctionalTag(f"resolvent(t={t:g})", value, False, (t,))


def _mix(X1: Sequence, X2: Sequence, lam: float) -> tuple:
    return tuple(lam * np.asarray(a) + (1 - lam) * np.asarray(b) for a, b in zip(X1, X2))


def _add(*Xs: Sequence) -> tuple:
    return tuple(sum(np.asarray(x) for x in slot) for slot in zip(*Xs))


def _scale(X: Sequence, mu: float) -> tuple:
    return tuple(mu * np.asarray(a) for a in X)


def _sign(F: FunctionalTag) -> float:
    return 1.0 if F.concave else -1.0


def check_concavity(F: FunctionalTag, X1: Sequence, X2: Sequence, lam: float,
                    tol: Tolerance | None = None) -> Margin:
    """F(mix) - [lam F(X1) + (1-lam) F(X2)], negated for convex F."""
    if not 0 < lam < 1:
        raise DomainError("mixture weight must lie in (0, 1)")
    f1, f2 = F(*X1), F(*X2)
    fm = F(*_mix(X1, X2, lam))
    margin = _sign(F) * (fm - (lam * f1 + (1 - lam) * f2))
    return Margin(f"{F.name} {F.curvature}", margin, max(abs(f1), abs(f2), abs(fm)), tol)


def check_homogeneity_superadditivity(F: FunctionalTag, X1: Sequence, X2: Sequence,
                                      mus: Sequence[float] = (0.1, 2.0, 17.0),
                                      rel: float = 1e-12) -> list[Margin]:
    """Degree-one homogeneity as equalities, then super/subadditivity."""
    out = []
    f1, f2 = F(*X1), F(*X2)
    for mu in mus:
        out.append(equality(f"{F.name} homogeneity mu={mu:g}", F(*_scale(X1, mu)), mu * f1,
                            Tolerance(1e-14, rel)))
    fs = F(*_add(X1, X2))
    label = "superadditivity" if F.concave else "subadditivity"
    out.append(Margin(f"{F.name} {label}", _sign(F) * (fs - f1 - f2),
                      max(abs(fs), abs(f1) + abs(f2))))
    return out


def check_derivative_inequality(F: FunctionalTag, A: Sequence, B: Sequence,
                                xs: Sequence[float] = (0.5, 0.1, 0.02, 0.004)) -> list[Margin]:
    """Difference quotients q(x) = (F(A + xB) - F(A)) / x on a decreasing grid.

    Concave degree-one F: q grows as x shrinks and stays >= F(B).
    Convex degree-one F: q shrinks as x shrinks and stays <= F(B), which is
    the form lim q(x) <= F(B) used for the exponential trace functional.
    """
    xs = list(xs)
    if any(b >= a for a, b in zip(xs, xs[1:])) or xs[-1] <= 0:
        raise DomainError("x grid must be positive and strictly decreasing")
    fa, fb = F(*A), F(*B)
    s = _sign(F)
    out = []
    qs, scales = [], []
    for x in xs:
        fx = F(*_add(A, _scale(B, x)))
        qs.append((fx - fa) / x)
        # roundoff in a difference quotient grows like |F| / x
        scales.append((abs(fx) + abs(fa)) / x + abs(fb))
    for i in range(len(xs) - 1):
        out.append(Margin(f"{F.name} quotient monotone x={xs[i + 1]:g}",
                          s * (qs[i + 1] - qs[i]), max(scales[i], scales[i + 1])))
    for x, q, sc in zip(xs, qs, scales):
        out.append(Margin(f"{F.name} quotient bound x={x:g}", s * (q - fb), sc))
    return out


def f3_second_derivative_closed(A, B, K) -> float:
    """Second derivative of Tr exp(K + log(A + xB)) at x = 0 in closed form."""
    A = as_psd(A)
    D = as_psd(matrix_exp(np.asarray(K) + matrix_log(A)))
    W = omega_inv(A, B)
    first = fn.real_part(np.vdot(W, omega(D, W)))
    second = fn.real_part(np.vdot(D.matrix, upsilon(A, B)))
    return first - 2 * second


def check_f3_second_derivative(A, B, K, hs: Sequence[float] = (1e-3, 5e-4)) -> list[Margin]:
    """Closed-form f''(0) against a Richardson-extrapolated central difference."""
    A = as_psd(A)
    B = np.asarray(B)
    h = max(hs)
    if A.eigenvalues[0] - h * np.linalg.norm(B, 2) <= 0:
        raise SkipTrial("finite-difference stencil leaves the positive definite cone")
    closed = f3_second_derivative_closed(A, B, K)

    def f(x):
        return fn.lieb_f3(A.matrix + x * B, K)
    f0 = f(0.0)
    fds = [(f(h) - 2 * f0 + f(-h)) / h ** 2 for h in hs]
    ratio = (hs[0] / hs[1]) ** 2
    fd = (ratio * fds[1] - fds[0]) / (ratio - 1)
    return [
        equality("f3 f'' vs finite difference", closed, fd, Tolerance(1e-4, 1e-4), abs(closed)),
        Margin("f3 f'' <= 0", -closed, abs(closed), Tolerance(1e-9, 1e-300)),
    ]


def check_resolvent_superadditivity(t: float, samples: Sequence[tuple], lams: Sequence[float] | None = None
                  ) -> list[Margin]:
    """Superadditivity of (A, K) -> Tr K† (L_A + t R_A)^-1 (K), and the mixture form."""
    F = resolvent_form(t)
    vals = [F(A, K) for A, K in samples]
    total = F(*_add(*samples))
    out = [Margin(f"resolvent t={t:g} superadditive", sum(vals) - total,
                  max(sum(abs(v) for v in vals), abs(total)))]
    if lams is not None:
        mixed = F(*_add(*[_scale(s, l) for s, l in zip(samples, lams)]))
        conv = sum(l * v for l, v in zip(lams, vals))
        out.append(Margin(f"resolvent t={t:g} convex", conv - mixed, max(abs(conv), abs(mixed))))
    return out


def check_strip_bounds(inst: fn.StripInstance, ys: Sequence[float] = (0, 0.5, -0.5, 2, -2, 8, -8),
                       xs_interior: Sequence[float] = (0.25, 0.5, 0.75),
                       rel: float = 1e-9) -> list[Margin]:
    """Interior value f(p) <= Tr M†M and |f| <= Tr M†M on the strip boundary and a grid."""
    bound = inst.bound
    tol = Tolerance(1e-300, rel)
    fp = fn.strip_mixture(inst, inst.p)
    out = [
        equality("strip f(p) real", fp.imag, 0.0, tol, bound),
        Margin("strip f(p) <= Tr M†M", bound - fp.real, bound, tol),
    ]
    for x in (0.0, 1.0, *xs_interior):
        for y in ys:
            v = fn.strip_mixture(inst, complex(x, y))
            out.append(Margin(f"strip |f({x:g}{y:+g}i)|", bound - abs(v), bound, tol))
    for k, Ak in ((1, inst.A1), (2, inst.A2)):
        direct = fn.lieb_f1(Ak, Ak, inst.K, inst.p)
        out.append(equality(f"strip f_{k}(p) vs lieb_f1", fn.strip_f(inst, k, inst.p).real,
                            direct, Tolerance(1e-300, 1e-10), max(abs(direct), bound)))
    return out
