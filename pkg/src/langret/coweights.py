"""Retraction on rational coweights of a root datum.

A root datum is given by matrices: simple coroots as lattice vectors and
simple roots as covectors.  Their pairing matrix ``M[i][j] = <coroot_j, root_i>``
must be a symmetrizable Cartan matrix of finite type.

Dominance of ``lam + sum_j d_j coroot_j`` reads ``p + M d >= 0`` with
``p_i = <lam, root_i>``, so only ``p`` matters.  Symmetrizing ``M`` by a positive
diagonal gives an obtuse Gram matrix on the coroot span; the general
retraction there supplies ``d``.  The part of ``lam`` killed by every root
passes through unchanged.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

from . import exact_linalg as la
from .exact_linalg import Matrix, Q, Rational, Vector
from .retraction import retract
from .root_data import ObtuseBasis, RootDataError, catalog_gram, SystemSpec
from .sampling import Rng

Coweight = Vector


@dataclass(frozen=True, eq=False)
class RootDatum:
    rank: int
    coroots: Matrix
    roots: Matrix
    name: str = "datum"
    _bases: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "coroots", la.mat(self.coroots))
        object.__setattr__(self, "roots", la.mat(self.roots))
        object.__setattr__(self, "_bases", {})
        if self.rank < 0:
            raise RootDataError("lattice rank must be nonnegative")
        if len(self.coroots) != len(self.roots):
            raise RootDataError("need as many simple roots as simple coroots")
        for v in (*self.coroots, *self.roots):
            if len(v) != self.rank:
                raise RootDataError(f"vector {v} does not have length {self.rank}")
        M = self.pairing_matrix
        s = len(M)
        for i in range(s):
            if M[i][i] != 2:
                raise RootDataError(f"pairing matrix diagonal entry {i} is {M[i][i]}, expected 2")
            for j in range(s):
                if i != j and (M[i][j] > 0 or (M[i][j] == 0) != (M[j][i] == 0)):
                    raise RootDataError("pairing matrix is not a generalized Cartan matrix")
        self.symmetrizer  # raises if not symmetrizable
        if s and not la.is_positive_definite(self.gram):
            raise RootDataError("pairing matrix is not of finite type")

    @property
    def semisimple_rank(self) -> int:
        return len(self.coroots)

    @cached_property
    def pairing_matrix(self) -> Matrix:
        return la.matmul(self.roots, la.transpose(self.coroots)) if self.coroots else ()

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        """Index sets of the irreducible factors (connected Dynkin components)."""
        M = self.pairing_matrix
        s = len(M)
        seen: set[int] = set()
        comps = []
        for start in range(s):
            if start in seen:
                continue
            comp, queue = [], deque([start])
            seen.add(start)
            while queue:
                i = queue.popleft()
                comp.append(i)
                for j in range(s):
                    if j not in seen and M[i][j] != 0:
                        seen.add(j)
                        queue.append(j)
            comps.append(tuple(sorted(comp)))
        return tuple(comps)

    @cached_property
    def symmetrizer(self) -> Vector:
        """Positive diagonal ``D0`` with ``D0 M`` symmetric; first index of each factor gets 1."""
        M = self.pairing_matrix
        s = len(M)
        d: list[Rational | None] = [None] * s
        for comp in self.components:
            d[comp[0]] = la.ONE
            queue = deque([comp[0]])
            while queue:
                i = queue.popleft()
                for j in comp:
                    if d[j] is None and M[i][j] != 0:
                        d[j] = d[i] * M[i][j] / M[j][i]
                        queue.append(j)
        for i in range(s):
            for j in range(s):
                if d[i] * M[i][j] != d[j] * M[j][i]:
                    raise RootDataError("pairing matrix is not symmetrizable")
        return tuple(d)

    @cached_property
    def gram(self) -> Matrix:
        return symmetrized_gram(self, self.symmetrizer)

    @cached_property
    def central_basis(self) -> Matrix:
        """Basis of the coweights killed by every simple root."""
        return la.nullspace(self.roots, ncols=self.rank)

    def basis(self, symmetrizer: Sequence[Rational] | None = None) -> ObtuseBasis:
        key = tuple(symmetrizer) if symmetrizer is not None else self.symmetrizer
        b = self._bases.get(key)
        if b is None:
            b = ObtuseBasis(symmetrized_gram(self, key), name=self.name)
            self._bases[key] = b
        return b

    def root_pairing(self, lam: Sequence[Rational]) -> Vector:
        """``(<lam, root_i>)_i``."""
        lam = la.vec(lam)
        if len(lam) != self.rank:
            raise la.LinalgError(f"coweight of length {len(lam)} for lattice rank {self.rank}")
        return la.matvec(self.roots, lam)

    def combine_coroots(self, d: Sequence[Rational]) -> Coweight:
        out = la.zeros(self.rank)
        for di, c in zip(d, self.coroots):
            out = la.add(out, la.scale(di, c))
        return out

    def split(self, lam: Sequence[Rational]) -> tuple[Vector, Coweight]:
        """Coroot coefficients and central remainder of ``lam``."""
        p = self.root_pairing(lam)
        c = la.solve(self.pairing_matrix, p) if p else ()
        return c, la.sub(lam, self.combine_coroots(c))

    def __repr__(self) -> str:
        return f"RootDatum({self.name}, rank={self.rank}, semisimple_rank={self.semisimple_rank})"


def symmetrized_gram(D: RootDatum, symmetrizer: Sequence[Rational]) -> Matrix:
    M = D.pairing_matrix
    sym = la.vec(symmetrizer)
    if len(sym) != len(M) or any(v <= 0 for v in sym):
        raise RootDataError("symmetrizer must be one positive rational per simple root")
    G = tuple(tuple(sym[i] * M[i][j] for j in range(len(M))) for i in range(len(M)))
    if not la.is_symmetric(G):
        raise RootDataError("symmetrizer does not make the pairing matrix symmetric")
    return G


def make_gl(n: int) -> RootDatum:
    if n < 1:
        raise RootDataError("GL(n) needs n >= 1")
    vecs = []
    for i in range(n - 1):
        v = [0] * n
        v[i], v[i + 1] = 1, -1
        vecs.append(v)
    return RootDatum(n, vecs, vecs, name=f"GL{n}")


def make_simply_connected(spec: SystemSpec | str) -> RootDatum:
    """Coroots are the lattice basis; roots are the rows of the Cartan matrix."""
    if isinstance(spec, str):
        spec = SystemSpec.parse(spec)
    G = catalog_gram(spec.family, spec.rank)
    n = spec.rank
    cartan = [[2 * G[i][j] / G[j][j] for j in range(n)] for i in range(n)]
    return RootDatum(n, la.identity(n), cartan, name=f"{spec.name}-sc")


def direct_sum(*data: RootDatum) -> RootDatum:
    rank = sum(D.rank for D in data)
    coroots, roots = [], []
    offset = 0
    for D in data:
        for c, r in zip(D.coroots, D.roots):
            pad_l, pad_r = [0] * offset, [0] * (rank - offset - D.rank)
            coroots.append(pad_l + list(c) + pad_r)
            roots.append(pad_l + list(r) + pad_r)
        offset += D.rank
    return RootDatum(rank, coroots, roots, name="x".join(D.name for D in data))


def datum_from_json(data: dict, name: str = "datum") -> RootDatum:
    try:
        rank = int(data["rank"])
        coroots = la.mat(data.get("coroots", []))
        roots = la.mat(data.get("roots", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise RootDataError(f"bad root datum: {exc}") from None
    return RootDatum(rank, coroots, roots, name=data.get("name", name))


def load_datum_file(path: str | Path) -> RootDatum:
    return datum_from_json(json.loads(Path(path).read_text()), name=Path(path).stem)


def named_datum(name: str) -> RootDatum:
    """``gl4`` for GL(4); a catalog name such as ``B3`` for its simply connected datum."""
    key = name.strip().lower()
    if key.startswith("gl") and key[2:].isdigit():
        return make_gl(int(key[2:]))
    return make_simply_connected(name)


def leq_G(D: RootDatum, lam: Sequence, mu: Sequence) -> bool:
    """``lam <= mu`` iff ``mu - lam`` is a nonnegative combination of simple coroots."""
    d = coroot_coefficients(D, la.sub(la.vec(mu), la.vec(lam)))
    return d is not None and all(v >= 0 for v in d)


def coroot_coefficients(D: RootDatum, v: Sequence) -> Vector | None:
    """The ``d`` with ``v = sum d_i coroot_i``, or None if ``v`` is outside the coroot span."""
    v = la.vec(v)
    if not D.coroots:
        return () if not any(v) else None
    C = D.coroots
    normal = tuple(tuple(la.dot(a, b) for b in C) for a in C)
    d = la.solve_spd(normal, tuple(la.dot(a, v) for a in C))
    return d if D.combine_coroots(d) == v else None


def is_dominant_coweight(D: RootDatum, lam: Sequence) -> bool:
    return all(v >= 0 for v in D.root_pairing(lam))


def retract_G(
    D: RootDatum, lam: Sequence, symmetrizer: Sequence[Rational] | None = None
) -> tuple[Coweight, Vector]:
    """Least dominant coweight above ``lam``, with its coroot coefficients ``d``."""
    lam = la.vec(lam)
    p = D.root_pairing(lam)
    if not p:
        return lam, ()
    c = la.solve(D.pairing_matrix, p)
    y = retract(D.basis(symmetrizer), c).value
    d = la.sub(y, c)
    return la.add(lam, D.combine_coroots(d)), d


def coweight_certificate_ok(D: RootDatum, lam: Sequence, mu: Sequence, d: Sequence) -> bool:
    """``d >= 0``, ``mu = lam + sum d_i coroot_i`` dominant, and ``<mu, root_i> = 0`` where ``d_i != 0``."""
    lam, mu, d = la.vec(lam), la.vec(mu), la.vec(d)
    if len(d) != D.semisimple_rank or any(v < 0 for v in d):
        return False
    if la.add(lam, D.combine_coroots(d)) != mu:
        return False
    q = D.root_pairing(mu)
    return all(v >= 0 for v in q) and all(q[i] == 0 for i in range(len(d)) if d[i] != 0)


def invariant_norm2(
    D: RootDatum, v: Sequence, factor_scales: Sequence[Rational], central_scale: Rational = la.ONE
) -> Rational:
    """Squared length for a Weyl-invariant form: each irreducible factor's
    symmetrized Cartan form times its scale, orthogonal to the central part,
    which gets ``central_scale`` times the standard dot product."""
    c, z = D.split(v)
    G = scaled_gram(D, factor_scales)
    return (la.quad_form(G, c) if c else la.ZERO) + central_scale * la.dot(z, z)


def scaled_gram(D: RootDatum, factor_scales: Sequence[Rational]) -> Matrix:
    scales = la.vec(factor_scales)
    if len(scales) != len(D.components):
        raise ValueError(f"need {len(D.components)} factor scalings, got {len(scales)}")
    if any(t <= 0 for t in scales):
        raise ValueError("scalings must be positive")
    per_index = [la.ZERO] * D.semisimple_rank
    for t, comp in zip(scales, D.components):
        for i in comp:
            per_index[i] = t
    return symmetrized_gram(D, [per_index[i] * D.symmetrizer[i] for i in range(len(per_index))])


def check_metric_characterization(
    D: RootDatum,
    lam: Sequence,
    scalings: Sequence[Sequence[Rational]],
    samples: int = 200,
    seed: int = 0,
    central_scale: Rational = la.ONE,
) -> dict:
    """For each scaling, the nearest dominant point to ``lam`` (computed by the
    metric retraction under that form) must equal ``retract_G(lam)`` and beat
    every sampled dominant candidate."""
    lam = la.vec(lam)
    if central_scale <= 0:
        raise ValueError("central scaling must be positive")
    mu, _ = retract_G(D, lam)
    rng = Rng(seed).derive("metric", D.name)
    minimizers, violations = [], []
    for scales in scalings:
        G = scaled_gram(D, scales)
        if D.semisimple_rank:
            c, z = D.split(lam)
            y = retract(ObtuseBasis(G), c).value
            best = la.add(D.combine_coroots(y), z)
        else:
            best = lam
        minimizers.append(best)
        d_best = invariant_norm2(D, la.sub(lam, best), scales, central_scale)
        for cand in _dominant_candidates(D, rng, best, samples):
            if invariant_norm2(D, la.sub(lam, cand), scales, central_scale) < d_best:
                violations.append({"scales": [la.format_rational(t) for t in la.vec(scales)],
                                   "candidate": [la.format_rational(v) for v in cand]})
    identical = all(m == mu for m in minimizers)
    return {
        "minimizer": [la.format_rational(v) for v in mu],
        "identical": identical,
        "scalings": len(minimizers),
        "samples": samples,
        "violations": violations,
        "ok": identical and not violations,
    }


def _dominant_candidates(D: RootDatum, rng: Rng, near: Coweight, count: int) -> list[Coweight]:
    """Random dominant coweights: half far away, half small perturbations of
    ``near`` (pushed back into the dominant cone when they leave it)."""
    B = D.basis() if D.semisimple_rank else None
    out = []
    while len(out) < count:
        central = la.zeros(D.rank)
        for z in D.central_basis:
            central = la.add(central, la.scale(rng.rational(), z))
        if B is None:
            out.append(la.add(near, la.scale(Q(1, rng.randint(1, 8)), central)))
            continue
        if len(out) % 2 == 0:
            t = [Q(rng.randint(0, 20), rng.randint(1, 6)) for _ in range(B.rank)]
            cand = la.add(D.combine_coroots(la.matvec(B.dual, t)), central)
        else:
            step = Q(1, rng.randint(1, 50))
            delta = [rng.rational() for _ in range(B.rank)]
            cand = la.add(near, la.scale(step, la.add(D.combine_coroots(delta), central)))
            if not is_dominant_coweight(D, cand):
                cand = retract_G(D, cand)[0]
        out.append(cand)
    return out
