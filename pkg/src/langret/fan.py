"""The cones K_J: enumeration, simpliciality, coverage and face checks.

``K_J`` is generated by ``omega_k`` for ``k`` not in ``J`` and ``-alpha_k``
for ``k`` in ``J``; generator ``k`` always sits in position ``k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from . import exact_linalg as la
from .exact_linalg import Matrix, Q, Rational
from .retraction import ENUMERATION_GUARD, GuardExceeded, SubsetJ, generator_matrix, subsets_by_size
from .root_data import AlphaVec, ObtuseBasis
from .sampling import Rng, sample_vector


class SimplicialityError(ArithmeticError):
    pass


@dataclass(frozen=True)
class FanCone:
    J: SubsetJ
    generators: tuple[AlphaVec, ...]
    change_of_basis: Matrix
    det: Rational

    def coords(self, x: AlphaVec) -> tuple:
        return la.matvec(self.change_of_basis, x)

    def contains(self, x: AlphaVec) -> bool:
        return all(v >= 0 for v in self.coords(x))


def make_cone(B: ObtuseBasis, J: Sequence[int]) -> FanCone:
    J = tuple(sorted(set(J)))
    gm = generator_matrix(B, J)
    d = la.det(gm)
    if d == 0:
        raise SimplicialityError(f"generators of K_{J} are linearly dependent")
    return FanCone(J, la.transpose(gm), la.inverse(gm), d)


def enumerate_fan(B: ObtuseBasis, guard: int = ENUMERATION_GUARD) -> list[FanCone]:
    """All ``2**rank`` maximal cones, by size of ``J`` then lexicographically."""
    if B.rank > guard:
        raise GuardExceeded(f"rank {B.rank} exceeds enumeration guard {guard}")
    return [make_cone(B, J) for J in subsets_by_size(B.rank)]


def covering_cones(fan: Sequence[FanCone], x: AlphaVec) -> list[SubsetJ]:
    return [c.J for c in fan if c.contains(x)]


def check_completeness(B: ObtuseBasis, samples: int = 10_000, seed: int = 0, fan=None) -> dict:
    """Every sampled point must lie in some cone.  Half the samples sit on a wall."""
    fan = fan if fan is not None else enumerate_fan(B)
    rng = Rng(seed).derive("completeness", B.name)
    uncovered = []
    for i in range(samples):
        x = sample_vector(B, rng, "boundary" if i % 2 else "generic")
        if not any(c.contains(x) for c in fan):
            uncovered.append([la.format_rational(v) for v in x])
    return {"samples": samples, "uncovered": len(uncovered), "uncovered_points": uncovered[:10]}


def face_positions(J: SubsetJ, J2: SubsetJ, rank: int) -> tuple[int, ...]:
    """Positions shared by both cones: omega_k off ``J | J2``, -alpha_k on ``J & J2``."""
    a, b = set(J), set(J2)
    return tuple(k for k in range(rank) if (k in a) == (k in b))


def _random_point(rng: Rng, cone: FanCone) -> AlphaVec:
    n = len(cone.generators)
    x = la.zeros(n)
    for k in range(n):
        if rng.chance(1, 2):
            x = la.add(x, la.scale(rng.positive_rational(), cone.generators[k]))
    return x


def check_face_intersections(B: ObtuseBasis, samples: int = 20, seed: int = 0, fan=None) -> dict:
    """For each pair of cones, the coordinate-fan face must lie in both, and
    sampled points of the intersection must lie in that face."""
    fan = fan if fan is not None else enumerate_fan(B)
    rng = Rng(seed).derive("faces", B.name)
    failures = []
    pairs = tested = 0
    for i, c1 in enumerate(fan):
        for c2 in fan[i:]:
            pairs += 1
            shared = face_positions(c1.J, c2.J, B.rank)
            for k in shared:
                g = c1.generators[k]
                if not (c1.contains(g) and c2.contains(g)):
                    failures.append({"J": list(c1.J), "J2": list(c2.J), "generator": k, "kind": "generator"})
            for a, b in ((c1, c2), (c2, c1)):
                for _ in range(samples):
                    x = _random_point(rng, a)
                    if not b.contains(x):
                        continue
                    tested += 1
                    coords = a.coords(x)
                    if any(coords[k] != 0 for k in range(B.rank) if k not in shared):
                        failures.append({
                            "J": list(a.J), "J2": list(b.J), "kind": "point",
                            "point": [la.format_rational(v) for v in x],
                        })
    return {"pairs": pairs, "points_in_intersections": tested, "face_failures": failures}


def check_simplicial(B: ObtuseBasis, guard: int = ENUMERATION_GUARD) -> bool:
    try:
        enumerate_fan(B, guard)
    except SimplicialityError:
        return False
    return True


# rendering: the only place rationals become floats

_COLORS = {0: "#4c72b0", 1: "#dd8452", 2: "#55a868"}


def embed_rank2(B: ObtuseBasis) -> tuple[tuple[float, float], tuple[float, float]]:
    """Plane images of alpha_1, alpha_2 with Gram matrix ``B.gram`` (Cholesky)."""
    if B.rank != 2:
        raise ValueError(f"rank-2 basis required, got rank {B.rank}")
    g = B.gram
    a = math.sqrt(g[0][0])
    b = float(g[0][1]) / a
    c = math.sqrt(float(g[1][1] - g[0][1] ** 2 / g[0][0]))
    return (a, 0.0), (b, c)


def _num(v: float) -> str:
    v = 0.0 if abs(v) < 1e-12 else v
    return format(v, ".12g")


def fan_svg_rank2(B: ObtuseBasis, size: int = 400) -> str:
    a1, a2 = embed_rank2(B)
    half = size / 2
    radius = 0.42 * size

    def plane(x: AlphaVec) -> tuple[float, float]:
        px = float(x[0]) * a1[0] + float(x[1]) * a2[0]
        py = float(x[0]) * a1[1] + float(x[1]) * a2[1]
        r = math.hypot(px, py)
        return half + radius * px / r, half - radius * py / r

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<title>fan of {B.name}</title>',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for cone in enumerate_fan(B):
        (x1, y1), (x2, y2) = plane(cone.generators[0]), plane(cone.generators[1])
        cross = (x1 - half) * (y2 - half) - (y1 - half) * (x2 - half)
        sweep = 1 if cross > 0 else 0
        label = ",".join(B.labels[k] for k in cone.J)
        lines.append(
            f'<path class="cone" data-J="{{{label}}}" fill="{_COLORS[len(cone.J)]}" fill-opacity="0.35" '
            f'stroke="black" stroke-width="1" d="M {_num(half)} {_num(half)} L {_num(x1)} {_num(y1)} '
            f'A {_num(radius)} {_num(radius)} 0 0 {sweep} {_num(x2)} {_num(y2)} Z"/>'
        )
    for k in range(2):
        for name, v in ((f"ω{B.labels[k]}", B.omega(k)), (f"−α{B.labels[k]}", la.scale(Q(-1), B.alpha(k)))):
            x, y = plane(v)
            tx, ty = half + 1.08 * (x - half), half + 1.08 * (y - half)
            lines.append(f'<line class="generator" x1="{_num(half)}" y1="{_num(half)}" x2="{_num(x)}" y2="{_num(y)}" stroke="black"/>')
            lines.append(f'<text x="{_num(tx)}" y="{_num(ty)}" font-size="14" text-anchor="middle">{name}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
