"""Acceptance criteria, one test per criterion.

Every criterion is exact (rational arithmetic, zero tolerance).  Each test
prints one PASS/FAIL line; the lines are repeated in the pytest terminal
summary under "acceptance criteria".
"""

import subprocess
import sys
import time

import pytest

from langret import exact_linalg as la
from langret.coweights import (
    check_metric_characterization, direct_sum, make_gl, make_simply_connected, retract_G,
)
from langret.envelope import (
    StepFunction, concave_envelope_hull, concave_envelope_pav, coweight_to_function, function_to_vec,
    vec_to_function,
)
from langret.exact_linalg import Q
from langret.fan import check_completeness, check_face_intersections, check_simplicial
from langret.retraction import certificate_ok, proj_J, retract, retract_oracle, subsets_by_size
from langret.root_data import (
    ObtuseBasis, catalog, check_wellknown, in_dominant, in_pos_cone, infimum, leq, make_system,
)
from langret.sampling import Rng, sample_vector
from langret.verify import Target, verify_systems

SEED = 20240601
RUN1_SYSTEMS = ["A1", "A2", "A3", "A4", "B2", "B3", "C3", "D4", "G2", "F4", "E6"]
NONOBTUSE = ObtuseBasis(la.mat([[1, "1/2"], ["1/2", 1]]), name="nonobtuse")


def rng_for(*keys):
    return Rng(SEED).derive(*keys)


def mixed_sample(B, rng):
    profile = rng.choice(("generic", "generic", "generic", "boundary", "dominant", "positive"))
    x = sample_vector(B, rng, profile)
    return la.scale(-1, x) if profile == "positive" and rng.chance(1, 2) else x


@pytest.fixture(scope="module")
def run1():
    """1000 samples per system: fast path, oracle and certificate on each."""
    out = {}
    start = time.perf_counter()
    for name in RUN1_SYSTEMS:
        B = make_system(name)
        rng = rng_for("run1", name)
        rows = []
        for _ in range(1000):
            x = mixed_sample(B, rng)
            r = retract(B, x)
            rows.append((x, r, retract_oracle(B, x).value))
        out[name] = (B, rows)
    return out, time.perf_counter() - start


def test_criterion_01_oracle_equivalence(run1, acceptance_log):
    data, elapsed = run1
    mismatches = sum(1 for B, rows in data.values() for x, r, o in rows if r.value != o)
    total = sum(len(rows) for _, rows in data.values())
    ok = mismatches == 0 and elapsed < 60
    acceptance_log(1, "oracle equivalence", ok,
                   f"{total} samples over {len(data)} systems, {mismatches} mismatches, {elapsed:.1f}s")
    assert mismatches == 0
    assert elapsed < 60


def test_criterion_02_certificates(run1, acceptance_log):
    data, _ = run1
    bad = sum(1 for B, rows in data.values() for x, r, _ in rows if not certificate_ok(B, x, r))
    fallbacks = sum(r.used_fallback for B, rows in data.values() for _, r, _ in rows)
    acceptance_log(2, "certificate soundness", bad == 0, f"{bad} failing certificates, {fallbacks} fallbacks")
    assert bad == 0 and fallbacks == 0


def _near_candidates(B, y, rng, count):
    out = []
    for k in range(count):
        if k % 2 == 0:
            t = [Q(rng.randint(0, 20), rng.randint(1, 6)) for _ in range(B.rank)]
            out.append(la.matvec(B.dual, t))
        else:
            step = Q(1, rng.randint(1, 40))
            z = la.add(y, la.scale(step, tuple(rng.rational() for _ in range(B.rank))))
            out.append(z if in_dominant(B, z) else retract(B, z).value)
    return out


def test_criterion_03_nearest_point(acceptance_log):
    beaten = checked = 0
    for name in RUN1_SYSTEMS:
        B = make_system(name)
        rng = rng_for("nearest", name)
        for _ in range(200):
            x = mixed_sample(B, rng)
            y = retract(B, x).value
            best = B.norm2(la.sub(x, y))
            for z in _near_candidates(B, y, rng, 50):
                assert in_dominant(B, z)
                checked += 1
                beaten += B.norm2(la.sub(x, z)) < best
    acceptance_log(3, "nearest point", beaten == 0, f"{checked} candidate comparisons, {beaten} closer")
    assert beaten == 0


def test_criterion_04_order_preservation(acceptance_log):
    bad = pairs = 0
    for name in RUN1_SYSTEMS:
        B = make_system(name)
        rng = rng_for("order", name)
        for _ in range(1000):
            x = mixed_sample(B, rng)
            x2 = la.add(x, sample_vector(B, rng, "positive"))
            pairs += 1
            bad += not leq(B, retract(B, x).value, retract(B, x2).value)
    rep = verify_systems([Target.from_gram(NONOBTUSE.gram, "nonobtuse")], trials=10_000, seed=SEED,
                         checks="order_preserving")
    status = rep.systems[0]["checks"]["order_preserving"]
    ok = bad == 0 and status["status"] == "hypothesis-violated"
    acceptance_log(4, "order preservation", ok,
                   f"{pairs} obtuse pairs, {bad} violations; non-obtuse gram: {status['failed']} "
                   f"violating pairs in 10^4 trials, status {status['status']}")
    assert bad == 0
    # the non-obtuse case is expected to break; it must be flagged, never called a bug
    assert status["status"] == "hypothesis-violated" and status["counterexample"] is not None


def test_criterion_05_least_element(acceptance_log):
    bad = samples = comparands = 0
    min_per_sample = None
    for name in RUN1_SYSTEMS:
        B = make_system(name)
        rng = rng_for("least", name)
        for _ in range(500):
            x = mixed_sample(B, rng)
            y = retract(B, x).value
            zs = []
            k = 0
            while len(zs) < 24 and k < 72:
                k += 1
                if k % 3 == 0:
                    # constructed: y + sum t_i omega_i, nonnegative since omega_i lies in V^pos
                    z = la.add(y, la.matvec(B.dual, sample_vector(B, rng, "positive")))
                elif k % 3 == 1:
                    z = retract(B, la.add(x, sample_vector(B, rng, "positive"))).value
                else:
                    z = la.add(x, la.scale(rng.randint(1, 40), sample_vector(B, rng, "positive")))
                if in_dominant(B, z) and leq(B, x, z):
                    zs.append(z)
            samples += 1
            comparands += len(zs)
            min_per_sample = len(zs) if min_per_sample is None else min(min_per_sample, len(zs))
            bad += sum(not leq(B, y, z) for z in zs)
    ok = bad == 0 and min_per_sample >= 20
    acceptance_log(5, "least element", ok,
                   f"{samples} samples, {comparands} comparands (min {min_per_sample} per sample), {bad} violations")
    assert bad == 0 and min_per_sample >= 20


def test_criterion_06_lxgex_idempotence_homogeneity(run1, acceptance_log):
    data, _ = run1
    fails = {"above input": 0, "idempotence": 0, "homogeneity": 0, "fixes dominant": 0}
    for name, (B, rows) in data.items():
        rng = rng_for("homog", name)
        for x, r, _ in rows:
            y = r.value
            fails["above input"] += not leq(B, x, y)
            fails["idempotence"] += retract(B, y).value != y
            t = Q(rng.randint(1, 12), rng.randint(1, 7))
            fails["homogeneity"] += retract(B, la.scale(t, x)).value != la.scale(t, y)
            if in_dominant(B, x):
                fails["fixes dominant"] += y != x
    ok = not any(fails.values())
    acceptance_log(6, "L(x) >= x, idempotence, homogeneity, fixes V+", ok,
                   ", ".join(f"{k}: {v} failures" for k, v in fails.items()))
    assert ok, fails


def test_criterion_07_projection_order(acceptance_log):
    bad = checked = 0
    systems = catalog(8)
    for B in systems:
        for J in subsets_by_size(B.rank):
            for i in range(B.rank):
                checked += 1
                bad += not in_pos_cone(B, proj_J(B, J, B.alpha(i))[0])
    acceptance_log(7, "proj_J(alpha_i) >= 0", bad == 0,
                   f"{len(systems)} systems of rank <= 8, {checked} projections, {bad} negative")
    assert bad == 0


def test_criterion_08_wellknown(acceptance_log):
    systems = catalog(8)
    bad = [B.name for B in systems if not check_wellknown(B)]
    acceptance_log(8, "dual basis entrywise >= 0", not bad, f"{len(systems)} catalog systems, failures: {bad or 'none'}")
    assert not bad


def test_criterion_09_infimum(acceptance_log):
    bad = families = 0
    for name in RUN1_SYSTEMS:
        B = make_system(name)
        rng = rng_for("infimum", name)
        for _ in range(500):
            fam = [sample_vector(B, rng, "dominant") for _ in range(rng.randint(2, 10))]
            inf = infimum(B, fam)
            families += 1
            bad += not (in_dominant(B, inf) and all(leq(B, inf, m) for m in fam))
    acceptance_log(9, "infimum of dominant family is dominant", bad == 0, f"{families} families, {bad} failures")
    assert bad == 0


def test_criterion_10_fan(acceptance_log):
    systems = catalog(8)
    nonsimplicial = [B.name for B in systems if not check_simplicial(B)]
    small = [B for B in systems if B.rank in (2, 3)]
    uncovered = {B.name: check_completeness(B, samples=10_000, seed=SEED)["uncovered"] for B in small}
    swept = [B for B in systems if B.rank <= 4]
    face_fail = {B.name: len(check_face_intersections(B, samples=10, seed=SEED)["face_failures"]) for B in swept}
    ok = not nonsimplicial and not any(uncovered.values()) and not any(face_fail.values())
    acceptance_log(10, "fan simplicial, complete, face pattern", ok,
                   f"simplicial {len(systems) - len(nonsimplicial)}/{len(systems)}; "
                   f"uncovered {sum(uncovered.values())} of {10_000 * len(small)} points over {len(small)} systems; "
                   f"face failures {sum(face_fail.values())} over {len(swept)} systems")
    assert ok


def test_criterion_11_envelope(acceptance_log):
    rng = rng_for("envelope")
    hull_pav = 0
    for _ in range(10_000):
        n = rng.randint(1, 64)
        vals = [Q(0)] + [rng.rational(-50, 50, 8) for _ in range(n)]
        f = StepFunction(tuple(vals), "gl")
        hull_pav += concave_envelope_hull(f) != concave_envelope_pav(f)
    type_a = 0
    for n in range(2, 11):
        B = make_system(f"A{n - 1}")
        for _ in range(500):
            v = sample_vector(B, rng, "generic")
            type_a += vec_to_function(retract(B, v).value) != concave_envelope_hull(vec_to_function(v))
    gl = 0
    for n in range(1, 13):
        D = make_gl(n)
        for _ in range(500):
            lam = tuple(rng.rational() for _ in range(n))
            gl += coweight_to_function(retract_G(D, lam)[0]) != concave_envelope_hull(coweight_to_function(lam))
    A2 = make_system("A2")
    anchor = (retract(A2, (1, -1)).value == (1, Q(1, 2))
              and concave_envelope_hull(StepFunction((0, 1, -1, 0), "sl")).values == (0, 1, Q(1, 2), 0)
              and function_to_vec(concave_envelope_hull(vec_to_function((1, -1)))) == (1, Q(1, 2)))
    ok = hull_pav == 0 and type_a == 0 and gl == 0 and anchor
    acceptance_log(11, "envelope cross-checks", ok,
                   f"hull/PAV {hull_pav}/10000 differ; type A {type_a}/4500; GL(n) {gl}/6000; A2 anchor {anchor}")
    assert ok


def test_criterion_12_metric(acceptance_log):
    A1 = make_simply_connected("A1")
    data = [make_gl(2), make_gl(3), make_gl(4), make_simply_connected("B2"), make_simply_connected("G2"),
            make_simply_connected("C3"), direct_sum(A1, A1), direct_sum(make_gl(3), make_simply_connected("B2"))]
    bad = runs = 0
    for D in data:
        rng = rng_for("metric", D.name)
        k = len(D.components)
        for _ in range(200):
            lam = tuple(rng.rational() for _ in range(D.rank))
            scalings = [[Q(1)] * k, [rng.positive_rational() for _ in range(k)],
                        [rng.positive_rational() for _ in range(k)]]
            rep = check_metric_characterization(D, lam, scalings, samples=4, seed=rng.next_u64(),
                                                central_scale=rng.positive_rational())
            runs += 1
            bad += not rep["ok"]
    acceptance_log(12, "metric minimizer independent of invariant form", bad == 0,
                   f"{len(data)} data x 200 coweights x 3 scalings, {bad} failures")
    assert bad == 0


def _cli_verify(workers):
    cmd = [sys.executable, "-m", "langret", "verify", "--systems", "A2,B2,G2,A3,C3,D4,F4,gl4", "--trials", "100",
           "--seed", "42", "--workers", str(workers)]
    proc = subprocess.run(cmd, capture_output=True, check=False)
    return proc.returncode, proc.stdout


def test_criterion_13_determinism(acceptance_log):
    c1, first = _cli_verify(1)
    c2, second = _cli_verify(1)
    c3, parallel = _cli_verify(2)
    ok = c1 == c2 == c3 == 0 and first == second == parallel and len(first) > 0
    acceptance_log(13, "verify --seed 42 byte-identical", ok,
                   f"two serial runs identical: {first == second}; workers 1 vs 2 identical: {first == parallel}")
    assert ok
