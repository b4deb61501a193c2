"""Bases with a rational Gram matrix, the two cones they define, and the
dominance order.

Vectors are always stored in alpha-coordinates: ``x = sum_i x[i] * alpha_i``.
In these coordinates the positive cone is the nonnegative orthant, the order
``x <= y`` is coordinatewise, and the pairings ``<x, alpha_i>`` are ``G x``.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

from . import exact_linalg as la
from .exact_linalg import Matrix, Q, Rational, Vector

AlphaVec = Vector

FAMILIES = ("A", "B", "C", "D", "E", "F", "G")


class RootDataError(ValueError):
    pass


class NotObtuseWarning(UserWarning):
    """An order-theoretic guarantee was requested on a non-obtuse basis."""


@dataclass(frozen=True)
class SystemSpec:
    family: str
    rank: int
    custom_gram: Matrix | None = None

    def __post_init__(self):
        if self.family == "custom":
            if self.custom_gram is None:
                raise RootDataError("custom system needs a gram matrix")
            if len(self.custom_gram) != self.rank:
                raise RootDataError("custom gram size does not match rank")
            return
        if self.family not in FAMILIES:
            raise RootDataError(f"unknown family {self.family!r}")
        ok = {
            "A": self.rank >= 1,
            "B": self.rank >= 2,
            "C": self.rank >= 2,
            "D": self.rank >= 4,
            "E": 6 <= self.rank <= 8,
            "F": self.rank == 4,
            "G": self.rank == 2,
        }[self.family]
        if not ok:
            raise RootDataError(f"no root system of type {self.family}{self.rank}")

    @property
    def name(self) -> str:
        return "custom" if self.family == "custom" else f"{self.family}{self.rank}"

    @classmethod
    def parse(cls, name: str) -> "SystemSpec":
        m = re.fullmatch(r"\s*([A-Ga-g])\s*(\d+)\s*", name)
        if not m:
            raise RootDataError(f"cannot parse system name {name!r}")
        return cls(m.group(1).upper(), int(m.group(2)))


@dataclass(frozen=True, eq=False)
class ObtuseBasis:
    """A basis ``alpha_i`` given by its Gram matrix.

    ``obtuse`` records whether all off-diagonal Gram entries are <= 0.  The
    metric theory works for any positive definite Gram matrix; the order
    theory needs obtuseness.
    """

    gram: Matrix
    labels: tuple[str, ...] = ()
    name: str = "custom"
    obtuse: bool = field(init=False)
    _proj_cache: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        gram = la.mat(self.gram)
        object.__setattr__(self, "gram", gram)
        n = len(gram)
        if n == 0:
            raise RootDataError("empty basis")
        if not la.is_symmetric(gram):
            raise RootDataError("gram matrix is not symmetric")
        if not la.is_positive_definite(gram):
            raise RootDataError("gram matrix is not positive definite")
        labels = tuple(self.labels) or tuple(str(i + 1) for i in range(n))
        if len(labels) != n or len(set(labels)) != n:
            raise RootDataError("labels must be distinct, one per basis vector")
        object.__setattr__(self, "labels", labels)
        obtuse = all(gram[i][j] <= 0 for i in range(n) for j in range(n) if i != j)
        object.__setattr__(self, "obtuse", obtuse)
        object.__setattr__(self, "_proj_cache", {})

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def dual(self) -> Matrix:
        return la.invert_spd(self.gram)

    def omega(self, i: int) -> AlphaVec:
        """alpha-coordinates of the fundamental coweight ``omega_i``."""
        return tuple(row[i] for row in self.dual)

    def alpha(self, i: int) -> AlphaVec:
        return tuple(la.ONE if k == i else la.ZERO for k in range(self.rank))

    def index(self, label: str | int) -> int:
        if isinstance(label, int):
            return label
        return self.labels.index(str(label))

    def inner(self, x: Sequence[Rational], y: Sequence[Rational]) -> Rational:
        return la.dot(x, la.matvec(self.gram, y))

    def norm2(self, x: Sequence[Rational]) -> Rational:
        return la.quad_form(self.gram, x)

    def require_obtuse(self, what: str) -> None:
        if not self.obtuse:
            warnings.warn(
                f"{what}: basis {self.name} is not obtuse; the order-theoretic "
                "guarantee does not apply",
                NotObtuseWarning,
                stacklevel=3,
            )

    def __repr__(self) -> str:
        return f"ObtuseBasis({self.name}, rank={self.rank}, obtuse={self.obtuse})"


def _chain(n: int, norms: Sequence[int], links: dict[tuple[int, int], int]) -> Matrix:
    g = [[Q(0)] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = Q(norms[i])
    for (i, j), v in links.items():
        g[i][j] = g[j][i] = Q(v)
    return la.mat(g)


def catalog_gram(family: str, rank: int) -> Matrix:
    """Symmetrized Cartan matrix, Bourbaki numbering, short roots of norm 2."""
    SystemSpec(family, rank)
    n = rank
    path = {(i, i + 1): -1 for i in range(n - 1)}
    if family == "A":
        return _chain(n, [2] * n, path)
    if family == "B":
        # alpha_1..alpha_{n-1} long, alpha_n short
        links = {(i, i + 1): -2 for i in range(n - 1)}
        return _chain(n, [4] * (n - 1) + [2], links)
    if family == "C":
        # alpha_1..alpha_{n-1} short, alpha_n long
        links = dict(path)
        links[(n - 2, n - 1)] = -2
        return _chain(n, [2] * (n - 1) + [4], links)
    if family == "D":
        links = {(i, i + 1): -1 for i in range(n - 2)}
        links[(n - 3, n - 1)] = -1
        return _chain(n, [2] * n, links)
    if family == "E":
        links = {(0, 2): -1, (1, 3): -1}
        links.update({(i, i + 1): -1 for i in range(2, n - 1)})
        return _chain(n, [2] * n, links)
    if family == "F":
        return _chain(4, [4, 4, 2, 2], {(0, 1): -2, (1, 2): -2, (2, 3): -1})
    if family == "G":
        return _chain(2, [2, 6], {(0, 1): -3})
    raise RootDataError(f"unknown family {family!r}")


def make_system(spec: SystemSpec | str) -> ObtuseBasis:
    if isinstance(spec, str):
        spec = SystemSpec.parse(spec)
    if spec.family == "custom":
        return ObtuseBasis(spec.custom_gram, name="custom")
    return ObtuseBasis(catalog_gram(spec.family, spec.rank), name=spec.name)


def catalog(max_rank: int = 8) -> list[ObtuseBasis]:
    """Every catalog system of rank <= ``max_rank``."""
    out = []
    for fam in FAMILIES:
        for r in range(1, max_rank + 1):
            try:
                out.append(make_system(SystemSpec(fam, r)))
            except RootDataError:
                continue
    return out


def load_gram_file(path: str | Path) -> ObtuseBasis:
    """Read ``{"gram": [["2", "-1"], ...]}``; an optional ``labels`` list is honoured."""
    data = json.loads(Path(path).read_text())
    return basis_from_json(data, name=Path(path).stem)


def basis_from_json(data: dict, name: str = "custom") -> ObtuseBasis:
    if not isinstance(data, dict) or "gram" not in data:
        raise RootDataError('gram file must be an object with a "gram" key')
    try:
        gram = la.mat(data["gram"])
    except (ValueError, TypeError) as exc:
        raise RootDataError(f"bad gram entry: {exc}") from None
    return ObtuseBasis(gram, labels=tuple(data.get("labels", ())), name=name)


def _check_dim(B: ObtuseBasis, x: Sequence) -> None:
    if len(x) != B.rank:
        raise la.LinalgError(f"vector of length {len(x)} for basis of rank {B.rank}")


def dual_basis(B: ObtuseBasis) -> Matrix:
    """Column ``i`` is ``omega_i`` in alpha-coordinates, i.e. ``gram^-1``."""
    return B.dual


def pairing(B: ObtuseBasis, x: AlphaVec) -> Vector:
    """``(<x, alpha_i>)_i``; by duality these are also the omega-coordinates."""
    _check_dim(B, x)
    return la.matvec(B.gram, x)


def in_dominant(B: ObtuseBasis, x: AlphaVec) -> bool:
    return all(p >= 0 for p in pairing(B, x))


def in_pos_cone(B: ObtuseBasis, x: AlphaVec) -> bool:
    _check_dim(B, x)
    return all(c >= 0 for c in x)


def leq(B: ObtuseBasis, x: AlphaVec, y: AlphaVec) -> bool:
    """``x <= y`` iff ``y - x`` is a nonnegative combination of the alpha_i."""
    _check_dim(B, x)
    _check_dim(B, y)
    return all(b >= a for a, b in zip(x, y))


def infimum(B: ObtuseBasis, family: Sequence[AlphaVec]) -> AlphaVec:
    """Greatest lower bound for the dominance order: coordinatewise minimum.

    On an obtuse basis the infimum of dominant vectors is again dominant.
    """
    family = list(family)
    if not family:
        raise ValueError("infimum of an empty family")
    for x in family:
        _check_dim(B, x)
    return tuple(min(col) for col in zip(*family))


def check_wellknown(B: ObtuseBasis) -> bool:
    """True iff every omega_i has nonnegative alpha-coordinates.

    That is the inclusion of the dominant cone in the positive cone.  A False
    return is a counterexample, not an error.
    """
    return all(v >= 0 for row in B.dual for v in row)
