"""Least concave majorants of functions on {0, ..., n}.

Two independent algorithms (upper convex hull and pooled slopes) plus the
dictionaries that identify type A vectors and GL(n) coweights with such
functions.  Under these dictionaries the majorant is the retraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

from . import exact_linalg as la
from .exact_linalg import Q, Rational
from .root_data import AlphaVec

Variant = Literal["sl", "gl"]


@dataclass(frozen=True)
class StepFunction:
    """Values ``f(0), ..., f(n)``.  ``f(0) = 0``; the sl variant also pins ``f(n) = 0``."""

    values: tuple[Rational, ...]
    variant: Variant = "gl"

    def __post_init__(self):
        vals = la.vec(self.values)
        object.__setattr__(self, "values", vals)
        if self.variant not in ("sl", "gl"):
            raise ValueError(f"variant must be 'sl' or 'gl', not {self.variant!r}")
        if len(vals) < 2:
            raise ValueError("need at least f(0) and f(1)")
        if vals[0] != 0:
            raise ValueError("f(0) must be 0")
        if self.variant == "sl" and vals[-1] != 0:
            raise ValueError("sl variant requires f(n) = 0")

    @property
    def n(self) -> int:
        return len(self.values) - 1

    def slopes(self) -> tuple[Rational, ...]:
        v = self.values
        return tuple(v[i] - v[i - 1] for i in range(1, len(v)))

    def __ge__(self, other: "StepFunction") -> bool:
        return len(self.values) == len(other.values) and all(a >= b for a, b in zip(self.values, other.values))

    def __le__(self, other: "StepFunction") -> bool:
        return other >= self


def is_concave(f: StepFunction) -> bool:
    s = f.slopes()
    return all(s[i] >= s[i + 1] for i in range(len(s) - 1))


def _cross(o, a, b) -> Rational:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def upper_hull(points: Sequence[tuple[int, Rational]]) -> list[tuple[int, Rational]]:
    """Monotone chain, points sorted by abscissa.  Collinear points are dropped."""
    hull: list[tuple[int, Rational]] = []
    for p in points:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0:
            hull.pop()
        hull.append(p)
    return hull


def concave_envelope_hull(f: StepFunction) -> StepFunction:
    hull = upper_hull(list(enumerate(f.values)))
    out = [la.ZERO] * (f.n + 1)
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        slope = (y1 - y0) / (x1 - x0)
        for x in range(x0, x1 + 1):
            out[x] = y0 + slope * (x - x0)
    return StepFunction(tuple(out), f.variant)


def pool_slopes(slopes: Sequence[Rational]) -> list[tuple[int, int, Rational]]:
    """Pool adjacent violators until pooled means are non-increasing.

    Returns ``(start, stop, mean)`` blocks over slope indices ``start..stop-1``.
    """
    blocks: list[list] = []  # [start, count, total]
    for i, s in enumerate(slopes):
        blocks.append([i, 1, Q(s)])
        while len(blocks) >= 2 and blocks[-2][2] * blocks[-1][1] < blocks[-1][2] * blocks[-2][1]:
            start, count, total = blocks.pop()
            blocks[-1][1] += count
            blocks[-1][2] += total
    return [(start, start + count, total / count) for start, count, total in blocks]


def concave_envelope_pav(f: StepFunction) -> StepFunction:
    out = [la.ZERO]
    for start, stop, mean in pool_slopes(f.slopes()):
        for _ in range(start, stop):
            out.append(out[-1] + mean)
    return StepFunction(tuple(out), f.variant)


concave_envelope = concave_envelope_hull


def vec_to_function(v: AlphaVec) -> StepFunction:
    """Type A_{n-1} vector in alpha-coordinates to ``f_v`` with ``f(i) = <v, omega_i>``."""
    return StepFunction((la.ZERO, *la.vec(v), la.ZERO), "sl")


def function_to_vec(f: StepFunction) -> AlphaVec:
    if f.variant != "sl":
        raise ValueError("only sl functions correspond to type A vectors")
    return f.values[1:-1]


def coweight_to_function(lam: Sequence) -> StepFunction:
    """Partial sums ``f(i) = lam_1 + ... + lam_i`` of a GL(n) coweight."""
    out = [la.ZERO]
    for v in la.vec(lam):
        out.append(out[-1] + v)
    return StepFunction(tuple(out), "gl")


def function_to_coweight(f: StepFunction) -> tuple[Rational, ...]:
    return f.slopes()
