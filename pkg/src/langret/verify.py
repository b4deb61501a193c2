"""Seeded property checks over catalog systems, custom bases and root data.

Each sampled trial draws from its own stream ``Rng(seed).derive(system,
check, index)``, so a report depends only on the plan, never on how trials
are split between worker processes.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import exact_linalg as la
from .exact_linalg import Q, Rational
from . import coweights as cw
from .envelope import coweight_to_function, concave_envelope_hull, concave_envelope_pav, vec_to_function
from .fan import SimplicialityError, check_face_intersections, enumerate_fan
from .retraction import ENUMERATION_GUARD, certificate_ok, proj_J, retract, retract_oracle, subsets_by_size
from .root_data import (
    ObtuseBasis,
    RootDataError,
    SystemSpec,
    basis_from_json,
    in_dominant,
    in_pos_cone,
    infimum,
    leq,
    make_system,
)
from .sampling import Rng, sample_vector

CHECKS = (
    "oracle_agreement",
    "certificate",
    "dominates_input",
    "idempotence",
    "homogeneity",
    "nearest_point",
    "order_preserving",
    "least_element",
    "infimum_closure",
    "proj_order",
    "wellknown",
    "fan",
    "envelope_commutes",
    "metric_char",
)

# checks whose statement assumes pairwise obtuse simple roots
NEEDS_OBTUSE = {"order_preserving", "least_element", "infimum_closure", "proj_order", "wellknown"}

FACE_SWEEP_MAX_RANK = 4


class PlanError(ValueError):
    pass


def _fmt(v) -> list[str] | str:
    if isinstance(v, Rational):
        return la.format_rational(v)
    return [la.format_rational(x) for x in v]


@dataclass(frozen=True)
class Target:
    """A system to verify, described by plain data so it can cross process boundaries."""

    name: str
    kind: str  # "catalog", "gl", "gram", "datum"
    payload: tuple = ()

    @classmethod
    def parse(cls, text: str) -> "Target":
        key = text.strip()
        low = key.lower()
        if low.startswith("gl") and low[2:].isdigit():
            n = int(low[2:])
            if n < 2:
                raise PlanError("GL(n) targets need n >= 2 to have a root")
            return cls(f"GL{n}", "gl", (n,))
        try:
            spec = SystemSpec.parse(key)
        except RootDataError as exc:
            raise PlanError(str(exc)) from None
        return cls(spec.name, "catalog", (spec.family, spec.rank))

    @classmethod
    def from_gram(cls, gram, name: str = "custom") -> "Target":
        return cls(name, "gram", tuple(tuple(la.format_rational(v) for v in row) for row in la.mat(gram)))

    @classmethod
    def from_datum(cls, D: cw.RootDatum) -> "Target":
        return cls(D.name, "datum", (D.rank, _strs(D.coroots), _strs(D.roots)))


def _strs(m) -> tuple:
    return tuple(tuple(la.format_rational(v) for v in row) for row in m)


@dataclass
class Built:
    target: Target
    basis: ObtuseBasis
    datum: cw.RootDatum | None
    type_a: bool
    fan: list | None = None


_BUILT: dict[Target, Built] = {}


def build(t: Target) -> Built:
    b = _BUILT.get(t)
    if b is not None:
        return b
    if t.kind == "catalog":
        fam, rank = t.payload
        basis = make_system(SystemSpec(fam, rank))
        datum = cw.make_simply_connected(SystemSpec(fam, rank))
        b = Built(t, basis, datum, fam == "A")
    elif t.kind == "gl":
        datum = cw.make_gl(t.payload[0])
        b = Built(t, datum.basis(), datum, True)
    elif t.kind == "gram":
        b = Built(t, basis_from_json({"gram": [list(r) for r in t.payload]}, name=t.name), None, False)
    elif t.kind == "datum":
        rank, coroots, roots = t.payload
        datum = cw.RootDatum(rank, coroots, roots, name=t.name)
        b = Built(t, datum.basis(), datum, False)
    else:
        raise PlanError(f"unknown target kind {t.kind!r}")
    _BUILT[t] = b
    return b


@dataclass(frozen=True)
class VerifyPlan:
    systems: tuple[Target, ...]
    trials: int = 100
    seed: int = 0
    checks: tuple[str, ...] = CHECKS
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise PlanError("trials must be >= 1")
        if not self.systems:
            raise PlanError("no systems to verify")
        bad = [c for c in self.checks if c not in CHECKS]
        if bad:
            raise PlanError(f"unknown checks: {', '.join(bad)}")
        if self.workers < 1:
            raise PlanError("workers must be >= 1")

    @classmethod
    def make(cls, systems: Iterable, trials: int = 100, seed: int = 0, checks="all", workers: int = 1):
        targets = []
        for s in systems:
            if isinstance(s, Target):
                targets.append(s)
            elif isinstance(s, str):
                targets.append(Target.parse(s))
            elif isinstance(s, cw.RootDatum):
                targets.append(Target.from_datum(s))
            elif isinstance(s, ObtuseBasis):
                targets.append(Target.from_gram(s.gram, s.name))
            else:
                raise PlanError(f"cannot verify {s!r}")
        if checks == "all":
            checks = CHECKS
        elif isinstance(checks, str):
            checks = tuple(c.strip() for c in checks.split(",") if c.strip())
        return cls(tuple(targets), trials, seed, tuple(checks), workers)


@dataclass
class CheckResult:
    passed: int = 0
    failed: int = 0
    fallbacks: int = 0
    counterexample: dict | None = None
    applicable: bool = True

    def record(self, ok: bool, cex: Callable[[], dict] | None = None) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if self.counterexample is None and cex is not None:
                self.counterexample = cex()

    def merge(self, other: "CheckResult") -> None:
        self.passed += other.passed
        self.failed += other.failed
        self.fallbacks += other.fallbacks
        self.applicable = self.applicable and other.applicable
        if self.counterexample is None:
            self.counterexample = other.counterexample


@dataclass
class VerifyReport:
    plan: VerifyPlan
    systems: list[dict] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def bugs(self) -> int:
        return sum(1 for s in self.systems for c in s["checks"].values() if c["status"] == "bug")

    @property
    def hypothesis_violated(self) -> int:
        return sum(1 for s in self.systems for c in s["checks"].values() if c["status"] == "hypothesis-violated")

    def ok(self, allow_nonobtuse: bool = False) -> bool:
        return self.bugs == 0 and (allow_nonobtuse or self.hypothesis_violated == 0)

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "seed": self.plan.seed,
            "trials": self.plan.trials,
            "checks": list(self.plan.checks),
            "systems": self.systems,
            "summary": {
                "passed": sum(c["passed"] for s in self.systems for c in s["checks"].values()),
                "failed": sum(c["failed"] for s in self.systems for c in s["checks"].values()),
                "bugs": self.bugs,
                "hypothesis_violated": self.hypothesis_violated,
                "fallbacks": sum(s["fallbacks"] for s in self.systems),
            },
            "ok": self.ok(),
        }
        if include_timing:
            out["elapsed_seconds"] = round(self.elapsed, 3)
        return out

    def to_json(self, include_timing: bool = False, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(include_timing), indent=indent, sort_keys=False)


# -- individual checks ---------------------------------------------------
# sampled checks: fn(built, rng, result) runs one trial
# exhaustive checks: fn(built, result) runs once


def _generic(b: Built, rng: Rng):
    return sample_vector(b.basis, rng, "boundary" if rng.chance(1, 4) else "generic")


def _retract(b: Built, res: CheckResult, x):
    r = retract(b.basis, x)
    res.fallbacks += r.used_fallback
    return r


def t_oracle(b: Built, rng: Rng, res: CheckResult) -> None:
    if b.basis.rank > ENUMERATION_GUARD:
        res.applicable = False
        return
    x = _generic(b, rng)
    fast, slow = _retract(b, res, x).value, retract_oracle(b.basis, x).value
    res.record(fast == slow, lambda: {"x": _fmt(x), "retract": _fmt(fast), "oracle": _fmt(slow)})


def t_certificate(b: Built, rng: Rng, res: CheckResult) -> None:
    x = _generic(b, rng)
    r = _retract(b, res, x)
    res.record(certificate_ok(b.basis, x, r), lambda: {"x": _fmt(x), "value": _fmt(r.value), "active_set": list(r.active_set)})


def t_dominates(b: Built, rng: Rng, res: CheckResult) -> None:
    x = _generic(b, rng)
    y = _retract(b, res, x).value
    res.record(leq(b.basis, x, y), lambda: {"x": _fmt(x), "value": _fmt(y)})


def t_idempotence(b: Built, rng: Rng, res: CheckResult) -> None:
    x = _generic(b, rng)
    y = _retract(b, res, x).value
    yy = _retract(b, res, y).value
    z = sample_vector(b.basis, rng, "dominant")
    zz = _retract(b, res, z).value
    res.record(yy == y and zz == z, lambda: {"x": _fmt(x), "value": _fmt(y), "again": _fmt(yy),
                                            "dominant": _fmt(z), "dominant_image": _fmt(zz)})


def t_homogeneity(b: Built, rng: Rng, res: CheckResult) -> None:
    x = _generic(b, rng)
    t = rng.positive_rational()
    lhs = _retract(b, res, la.scale(t, x)).value
    rhs = la.scale(t, _retract(b, res, x).value)
    res.record(lhs == rhs, lambda: {"x": _fmt(x), "t": _fmt(t), "retract_tx": _fmt(lhs), "t_retract_x": _fmt(rhs)})


def t_nearest(b: Built, rng: Rng, res: CheckResult) -> None:
    B = b.basis
    x = _generic(b, rng)
    y = _retract(b, res, x).value
    d = B.norm2(la.sub(x, y))
    z = sample_vector(B, rng, "dominant")
    if rng.chance(1, 2):
        z = la.add(y, la.scale(Q(1, rng.randint(1, 40)), z))
    res.record(d <= B.norm2(la.sub(x, z)), lambda: {"x": _fmt(x), "value": _fmt(y), "closer": _fmt(z)})


def t_order(b: Built, rng: Rng, res: CheckResult) -> None:
    B = b.basis
    x = _generic(b, rng)
    y = la.add(x, sample_vector(B, rng, "positive"))
    lx, ly = _retract(b, res, x).value, _retract(b, res, y).value
    res.record(leq(B, lx, ly), lambda: {"x": _fmt(x), "y": _fmt(y), "retract_x": _fmt(lx), "retract_y": _fmt(ly)})


def t_least(b: Built, rng: Rng, res: CheckResult) -> None:
    B = b.basis
    x = _generic(b, rng)
    y = _retract(b, res, x).value
    comparands = []
    for _ in range(4):
        z = sample_vector(B, rng, "dominant", num=60)
        comparands.append(z)
        comparands.append(la.add(y, la.scale(Q(1, rng.randint(1, 10)), z)))
    ok = True
    bad = None
    for z in comparands:
        if in_dominant(B, z) and leq(B, x, z) and not leq(B, y, z):
            ok, bad = False, z
            break
    if ok and b.datum is not None:
        ok, bad = _least_G(b.datum, rng)
    res.record(ok, lambda: {"x": _fmt(x), "value": _fmt(y), "comparand": _fmt(bad)})


def _least_G(D: cw.RootDatum, rng: Rng):
    lam = tuple(rng.rational() for _ in range(D.rank))
    mu, d = cw.retract_G(D, lam)
    if not cw.coweight_certificate_ok(D, lam, mu, d):
        return False, mu
    t = sample_vector(D.basis(), rng, "dominant")
    extra = sample_vector(D.basis(), rng, "positive")
    for other in (la.add(mu, D.combine_coroots(t)), la.add(lam, D.combine_coroots(la.add(d, extra)))):
        if cw.is_dominant_coweight(D, other) and cw.leq_G(D, lam, other) and not cw.leq_G(D, mu, other):
            return False, other
    central = la.zeros(D.rank)
    for z in D.central_basis:
        central = la.add(central, la.scale(rng.rational(), z))
    # a shifted coweight is not comparable; central shifts move the output rigidly
    mu2, _ = cw.retract_G(D, la.add(lam, central))
    if mu2 != la.add(mu, central):
        return False, mu2
    return True, None


def t_infimum(b: Built, rng: Rng, res: CheckResult) -> None:
    B = b.basis
    fam = [sample_vector(B, rng, "dominant") for _ in range(rng.randint(2, 10))]
    inf = infimum(B, fam)
    ok = in_dominant(B, inf) and all(leq(B, inf, m) for m in fam)
    res.record(ok, lambda: {"family": [_fmt(m) for m in fam], "infimum": _fmt(inf)})


def t_fan(b: Built, rng: Rng, res: CheckResult) -> None:
    B = b.basis
    if B.rank > ENUMERATION_GUARD:
        res.applicable = False
        return
    if b.fan is None:
        b.fan = enumerate_fan(B)
    x = _generic(b, rng)
    y = _retract(b, res, x).value
    cones = [c.J for c in b.fan if c.contains(x)]
    ok = bool(cones) and all(proj_J(B, J, x)[0] == y for J in cones)
    res.record(ok, lambda: {"x": _fmt(x), "value": _fmt(y), "cones": [list(J) for J in cones]})


def t_envelope(b: Built, rng: Rng, res: CheckResult) -> None:
    if not b.type_a:
        res.applicable = False
        return
    if b.target.kind == "gl":
        D = b.datum
        lam = tuple(rng.rational() for _ in range(D.rank))
        mu, _ = cw.retract_G(D, lam)
        f = coweight_to_function(lam)
        env = concave_envelope_hull(f)
        ok = coweight_to_function(mu) == env and concave_envelope_pav(f) == env
        res.record(ok, lambda: {"coweight": _fmt(lam), "retract_G": _fmt(mu), "envelope": _fmt(env.values)})
        return
    v = _generic(b, rng)
    y = _retract(b, res, v).value
    env = concave_envelope_hull(vec_to_function(v))
    ok = vec_to_function(y) == env and concave_envelope_pav(vec_to_function(v)) == env
    res.record(ok, lambda: {"v": _fmt(v), "retract": _fmt(y), "envelope": _fmt(env.values)})


def t_metric(b: Built, rng: Rng, res: CheckResult) -> None:
    D = b.datum
    if D is None or not b.basis.obtuse:
        res.applicable = False
        return
    lam = tuple(rng.rational() for _ in range(D.rank))
    k = len(D.components)
    scalings = [[la.ONE] * k, [rng.positive_rational() for _ in range(k)]]
    rep = cw.check_metric_characterization(D, lam, scalings, samples=6, seed=rng.next_u64())
    res.record(rep["ok"], lambda: {"coweight": _fmt(lam), "report": rep})


def x_proj_order(b: Built, res: CheckResult) -> None:
    B = b.basis
    if B.rank > ENUMERATION_GUARD:
        res.applicable = False
        return
    for J in subsets_by_size(B.rank):
        for i in range(B.rank):
            y, _ = proj_J(B, J, B.alpha(i))
            res.record(in_pos_cone(B, y), lambda: {"J": list(J), "i": i, "proj": _fmt(y)})


def x_wellknown(b: Built, res: CheckResult) -> None:
    B = b.basis
    for i in range(B.rank):
        w = B.omega(i)
        res.record(in_pos_cone(B, w), lambda: {"i": i, "omega": _fmt(w)})


def x_fan(b: Built, res: CheckResult, seed: int) -> None:
    B = b.basis
    if B.rank > ENUMERATION_GUARD:
        res.applicable = False
        return
    try:
        b.fan = b.fan or enumerate_fan(B)
        res.record(True)
    except SimplicialityError as exc:
        msg = str(exc)
        res.record(False, lambda: {"simplicial": False, "error": msg})
        return
    if B.rank <= FACE_SWEEP_MAX_RANK:
        rep = check_face_intersections(B, samples=4, seed=seed, fan=b.fan)
        res.record(not rep["face_failures"], lambda: {"face_failures": rep["face_failures"][:3]})


SAMPLED: dict[str, Callable] = {
    "oracle_agreement": t_oracle,
    "certificate": t_certificate,
    "dominates_input": t_dominates,
    "idempotence": t_idempotence,
    "homogeneity": t_homogeneity,
    "nearest_point": t_nearest,
    "order_preserving": t_order,
    "least_element": t_least,
    "infimum_closure": t_infimum,
    "fan": t_fan,
    "envelope_commutes": t_envelope,
    "metric_char": t_metric,
}


def _run_task(task: tuple[Target, str, int, int, int]) -> CheckResult:
    target, check, seed, lo, hi = task
    b = build(target)
    res = CheckResult()
    if lo == 0:
        if check == "proj_order":
            x_proj_order(b, res)
        elif check == "wellknown":
            x_wellknown(b, res)
        elif check == "fan":
            x_fan(b, res, seed)
    fn = SAMPLED.get(check)
    if fn is not None:
        base = Rng(seed).derive(target.name, check)
        for i in range(lo, hi):
            fn(b, base.derive(i), res)
            if not res.applicable:
                break
    return res


def _chunks(trials: int, workers: int) -> list[tuple[int, int]]:
    if workers == 1:
        return [(0, trials)]
    size = max(1, -(-trials // (workers * 4)))
    return [(lo, min(trials, lo + size)) for lo in range(0, trials, size)]


def run_verify(plan: VerifyPlan) -> VerifyReport:
    start = time.perf_counter()
    tasks, keys = [], []
    for t in plan.systems:
        build(t)  # surface construction errors before forking
        for check in plan.checks:
            for lo, hi in _chunks(plan.trials, plan.workers):
                tasks.append((t, check, plan.seed, lo, hi))
                keys.append((t, check))
    if plan.workers == 1:
        results = [_run_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=plan.workers) as ex:
            results = list(ex.map(_run_task, tasks))
    merged: dict[tuple[Target, str], CheckResult] = {}
    for key, r in zip(keys, results):
        if key in merged:
            merged[key].merge(r)
        else:
            merged[key] = r
    report = VerifyReport(plan)
    for t in plan.systems:
        b = build(t)
        checks = {}
        fallbacks = 0
        for check in plan.checks:
            r = merged[(t, check)]
            fallbacks += r.fallbacks
            checks[check] = {
                "status": _status(check, r, b.basis.obtuse),
                "passed": r.passed,
                "failed": r.failed,
                "counterexample": r.counterexample,
            }
        report.systems.append({
            "name": t.name,
            "rank": b.basis.rank,
            "obtuse": b.basis.obtuse,
            "fallbacks": fallbacks,
            "checks": checks,
        })
    report.elapsed = time.perf_counter() - start
    return report


def _status(check: str, r: CheckResult, obtuse: bool) -> str:
    if not r.applicable and r.passed == 0 and r.failed == 0:
        return "not-applicable"
    if r.failed == 0:
        return "pass"
    if check in NEEDS_OBTUSE and not obtuse:
        return "hypothesis-violated"
    return "bug"


def verify_systems(systems: Sequence, **kw) -> VerifyReport:
    return run_verify(VerifyPlan.make(systems, **kw))
