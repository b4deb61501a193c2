"""Nearest-point retraction onto the dominant cone, with exact certificates.

For ``y`` dominant and ``J`` a set of indices with ``<y, alpha_j> = 0`` on
``J``, ``y`` is the retraction of ``x`` exactly when ``x - y`` is a
nonpositive combination of the ``alpha_j``, ``j`` in ``J``.  Every result
carries that data so it can be rechecked without trusting the search that
produced it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

from . import exact_linalg as la
from .exact_linalg import Rational, Vector
from .root_data import AlphaVec, ObtuseBasis, pairing

SubsetJ = tuple[int, ...]

ENUMERATION_GUARD = 16


class CertificateError(RuntimeError):
    """No subset certified the retraction.  Indicates an arithmetic bug."""


class GuardExceeded(ValueError):
    pass


@dataclass(frozen=True)
class RetractionResult:
    value: AlphaVec
    active_set: SubsetJ
    residual_coeffs: dict[int, Rational]
    used_fallback: bool = False

    def coeff_vector(self, rank: int) -> Vector:
        return tuple(self.residual_coeffs.get(i, la.ZERO) for i in range(rank))


def subset(J: Iterable[int]) -> SubsetJ:
    return tuple(sorted(set(J)))


def subsets_by_size(n: int) -> Iterator[SubsetJ]:
    """All subsets of ``range(n)``, by increasing size then lexicographically."""
    for k in range(n + 1):
        yield from combinations(range(n), k)


def _proj_matrix(B: ObtuseBasis, J: SubsetJ) -> la.Matrix:
    """``G_JJ^-1``, cached on the basis."""
    cache = B._proj_cache
    inv = cache.get(J)
    if inv is None:
        inv = la.invert_spd(la.submatrix(B.gram, J, J)) if J else ()
        cache[J] = inv
    return inv


def proj_J(B: ObtuseBasis, J: Iterable[int], x: AlphaVec) -> tuple[AlphaVec, dict[int, Rational]]:
    """Orthogonal projection onto the orthogonal complement of span{alpha_j : j in J}.

    Returns ``(y, c)`` with ``x - y = sum_j c[j] alpha_j`` and
    ``<y, alpha_k> = 0`` for ``k`` in ``J``.
    """
    J = subset(J)
    x = la.vec(x)
    if not J:
        return x, {}
    p = pairing(B, x)
    c = la.matvec(_proj_matrix(B, J), [p[j] for j in J])
    y = list(x)
    for j, cj in zip(J, c):
        y[j] -= cj
    return tuple(y), dict(zip(J, c))


def certificate_ok(B: ObtuseBasis, x: AlphaVec, result: RetractionResult) -> bool:
    """Recheck a result from scratch: dominance, slackness, residual sign."""
    y = result.value
    if len(y) != B.rank:
        return False
    p = pairing(B, y)
    if any(v < 0 for v in p):
        return False
    J = set(result.active_set)
    if any(p[j] != 0 for j in J):
        return False
    if set(result.residual_coeffs) - J:
        return False
    if any(c > 0 for c in result.residual_coeffs.values()):
        return False
    return la.sub(x, y) == result.coeff_vector(B.rank)


def _certified(B: ObtuseBasis, J: SubsetJ, y: AlphaVec, c: dict[int, Rational]) -> bool:
    return all(v >= 0 for v in pairing(B, y)) and all(v <= 0 for v in c.values())


def _canonical(B: ObtuseBasis, x: AlphaVec, y: AlphaVec, fallback: bool) -> RetractionResult:
    if not any(x):
        return RetractionResult(x, (), {}, fallback)
    p = pairing(B, y)
    J = tuple(j for j in range(B.rank) if p[j] == 0)
    return RetractionResult(y, J, {j: x[j] - y[j] for j in J}, fallback)


def retract(B: ObtuseBasis, x: AlphaVec) -> RetractionResult:
    """The point of the dominant cone nearest to ``x``.

    Grows the active set from the empty set, adding the smallest index whose
    pairing is negative, until the projection is dominant.  If the residual
    then has a wrong sign the exhaustive search takes over.  On obtuse bases
    the growth phase always succeeds; ``used_fallback`` reports when it did
    not.

    The reported active set is ``{j : <y, alpha_j> = 0}`` (empty for
    ``x = 0``), with residual coefficients over that set.
    """
    x = la.vec(x)
    if len(x) != B.rank:
        raise la.LinalgError(f"vector of length {len(x)} for basis of rank {B.rank}")
    _, y, c = _grow(B, x)
    if all(v <= 0 for v in c.values()):
        return _canonical(B, x, y, fallback=False)
    oracle = retract_oracle(B, x)
    return _canonical(B, x, oracle.value, fallback=True)


def retract_oracle(B: ObtuseBasis, x: AlphaVec, guard: int = ENUMERATION_GUARD) -> RetractionResult:
    """Exhaustive reference: the first subset (by size, then lexicographic)
    whose projection passes the certificate."""
    x = la.vec(x)
    if B.rank > guard:
        raise GuardExceeded(f"rank {B.rank} exceeds enumeration guard {guard}")
    for J in subsets_by_size(B.rank):
        y, c = proj_J(B, J, x)
        if _certified(B, J, y, c):
            return RetractionResult(y, J, c)
    raise CertificateError(f"no subset certifies the retraction of {x} in {B!r}")


def in_K_J(B: ObtuseBasis, J: Iterable[int], x: AlphaVec) -> tuple[bool, Vector]:
    """Coordinates of ``x`` in the generators of the cone K_J.

    Generator ``k`` is ``omega_k`` for ``k`` not in ``J`` and ``-alpha_k`` for
    ``k`` in ``J``.  Returns whether all coordinates are nonnegative.
    """
    coords = la.solve(generator_matrix(B, J), la.vec(x))
    return all(v >= 0 for v in coords), coords


def generator_matrix(B: ObtuseBasis, J: Iterable[int]) -> la.Matrix:
    """Columns are the generators of K_J in alpha-coordinates."""
    Jset = set(J)
    cols = [
        tuple(-v for v in B.alpha(k)) if k in Jset else B.omega(k)
        for k in range(B.rank)
    ]
    return la.transpose(tuple(cols))


def linearity_domain(B: ObtuseBasis, x: AlphaVec, guard: int = ENUMERATION_GUARD) -> SubsetJ:
    """A ``J`` with ``x`` in K_J.  Tries the subset suggested by growth first."""
    x = la.vec(x)
    first = _grow(B, x)[0]
    if in_K_J(B, first, x)[0]:
        return first
    if B.rank > guard:
        raise GuardExceeded(f"rank {B.rank} exceeds enumeration guard {guard}")
    for J in subsets_by_size(B.rank):
        if in_K_J(B, J, x)[0]:
            return J
    raise CertificateError(f"{x} lies in no cone of the fan of {B!r}")


def _grow(B: ObtuseBasis, x: AlphaVec) -> tuple[SubsetJ, AlphaVec, dict[int, Rational]]:
    J: list[int] = []
    while True:
        y, c = proj_J(B, J, x)
        p = pairing(B, y)
        neg = next((k for k in range(B.rank) if p[k] < 0), None)
        if neg is None:
            return subset(J), y, c
        J.append(neg)
