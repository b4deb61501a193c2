import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given
from scipy.optimize import nnls

from langret import exact_linalg as la
from langret.exact_linalg import Q
from langret.retraction import (
    GuardExceeded, RetractionResult, certificate_ok, generator_matrix, in_K_J, linearity_domain, proj_J,
    retract, retract_oracle, subsets_by_size,
)
from langret.root_data import ObtuseBasis, catalog, in_dominant, leq, make_system, pairing

from conftest import rat_vectors

A1, A2 = make_system("A1"), make_system("A2")
SYSTEMS = [make_system(n) for n in ("A2", "B2", "G2", "A3", "B3", "C3", "D4", "F4")]
NONOBTUSE = ObtuseBasis(la.mat([[1, "1/2"], ["1/2", 1]]), name="nonobtuse")


def moreau_float(B, x):
    """Nearest dominant point via floats: x - L(x) is the projection onto cone(-alpha_i)."""
    g = np.array([[float(v) for v in row] for row in B.gram])
    L = np.linalg.cholesky(g)  # gram = L L^T, so alpha-coords v embed as L^T v
    xv = np.array([float(v) for v in x])
    d, _ = nnls(L.T, -L.T @ xv)
    return xv + d


def vectors_for(B):
    return rat_vectors(B.rank, lo=-20, hi=20, max_den=6)


# -- proj_J --------------------------------------------------------------

def test_proj_examples():
    x = (Q(3, 2), Q(-7, 5))
    assert proj_J(A2, (), x) == (x, {})
    y, c = proj_J(A2, (0, 1), x)
    assert y == (0, 0) and c == {0: x[0], 1: x[1]}
    y, c = proj_J(A2, [1], (1, -1))
    assert y == (1, Q(1, 2)) and c == {1: Q(-3, 2)}
    assert pairing(A2, y)[1] == 0


@pytest.mark.parametrize("B", SYSTEMS, ids=lambda B: B.name)
def test_proj_kills_J_pairings(B):
    x = tuple(Q(k * k - 3 * k + 1, k + 1) for k in range(B.rank))
    for J in subsets_by_size(B.rank):
        y, c = proj_J(B, J, x)
        p = pairing(B, y)
        assert all(p[j] == 0 for j in J)
        assert la.sub(x, y) == tuple(c.get(k, 0) for k in range(B.rank))


# -- K_J membership ------------------------------------------------------

def test_in_K_J_examples():
    ok, coords = in_K_J(A1, [0], (-1,))
    assert ok and coords == (1,)
    for B in SYSTEMS:
        ok, coords = in_K_J(B, [], B.omega(0))
        assert ok and coords == B.alpha(0)
    ok, coords = in_K_J(A2, [1], (1, -1))
    assert ok and coords == (Q(3, 2), Q(3, 2))
    assert generator_matrix(A2, [1]) == la.mat([["2/3", 0], ["1/3", -1]])


# -- retract: worked examples -------------------------------------------

def test_retract_examples():
    r = retract(A2, (-1, -1))
    assert r.value == (0, 0) and r.active_set == (0, 1) and r.residual_coeffs == {0: -1, 1: -1}
    r = retract(A2, (1, -1))
    assert r.value == (1, Q(1, 2)) and r.active_set == (1,) and r.residual_coeffs == {1: Q(-3, 2)}
    r = retract(A2, (0, 0))
    assert r.value == (0, 0) and r.active_set == () and not r.used_fallback
    r = retract(A1, (-5,))
    assert r.value == (0,) and r.active_set == (0,)
    assert retract_oracle(A2, (0, 0)).value == (0, 0)
    assert retract_oracle(A1, (-5,)).active_set == (0,)


def test_retract_dominant_fixed_with_zero_pairing_set():
    for B in SYSTEMS:
        x = la.add(B.omega(0), la.scale(Q(2), B.omega(B.rank - 1)))
        r = retract(B, x)
        p = pairing(B, x)
        assert r.value == x
        assert r.active_set == tuple(j for j in range(B.rank) if p[j] == 0)
        assert all(c == 0 for c in r.residual_coeffs.values())


def test_retract_dimension_error():
    with pytest.raises(la.LinalgError):
        retract(A2, (1, 2, 3))


def test_oracle_guard():
    big = ObtuseBasis(la.identity(17))
    with pytest.raises(GuardExceeded):
        retract_oracle(big, la.zeros(17))
    # growth itself has no guard
    assert retract(big, tuple(Q((-1) ** i) for i in range(17))).value == tuple(Q(i % 2 == 0) for i in range(17))


def test_certificate_rejects_tampering():
    x = (1, -1)
    r = retract(A2, x)
    assert certificate_ok(A2, x, r)
    bad = [
        RetractionResult((1, Q(1, 3)), r.active_set, r.residual_coeffs),
        RetractionResult(r.value, (), {}),
        RetractionResult(r.value, (0, 1), {0: 0, 1: Q(-3, 2)}),
        RetractionResult((1, -1), (), {}),
        RetractionResult(r.value, (1,), {1: Q(3, 2)}),
    ]
    for b in bad:
        assert not certificate_ok(A2, x, b)


# -- properties on every flagship system ---------------------------------

@pytest.mark.parametrize("B", SYSTEMS, ids=lambda B: B.name)
@given(data=st.data())
def test_retract_matches_float_moreau(B, data):
    x = data.draw(vectors_for(B))
    y = retract(B, x).value
    ref = moreau_float(B, x)
    scale = 1 + max(abs(float(v)) for v in x)
    assert all(math.isclose(float(a), b, abs_tol=1e-9 * scale) for a, b in zip(y, ref))


@pytest.mark.parametrize("B", SYSTEMS, ids=lambda B: B.name)
@given(data=st.data())
def test_retract_properties(B, data):
    x = data.draw(vectors_for(B))
    r = retract(B, x)
    y = r.value
    assert not r.used_fallback
    assert certificate_ok(B, x, r)
    assert r.value == retract_oracle(B, x).value
    assert in_dominant(B, y) and leq(B, x, y)
    assert retract(B, y).value == y
    t = data.draw(st.integers(1, 9)) / Q(data.draw(st.integers(1, 5)))
    assert retract(B, la.scale(t, x)).value == la.scale(t, y)
    # x lies in a linearity cone whose projection gives the retraction
    J = linearity_domain(B, x)
    assert in_K_J(B, J, x)[0] and proj_J(B, J, x)[0] == y


@pytest.mark.parametrize("B", SYSTEMS[:4], ids=lambda B: B.name)
@given(data=st.data())
def test_order_preserving_and_least(B, data):
    x = data.draw(vectors_for(B))
    bump = data.draw(rat_vectors(B.rank, lo=0, hi=10, max_den=4))
    x2 = la.add(x, bump)
    assert leq(B, retract(B, x).value, retract(B, x2).value)
    y = retract(B, x).value
    z = la.add(y, la.matvec(B.dual, bump))
    assert in_dominant(B, z) and leq(B, x, z) and leq(B, y, z)


@given(data=st.data())
def test_nearest_point_against_candidates(data):
    B = make_system("B3")
    x = data.draw(vectors_for(B))
    y = retract(B, x).value
    best = B.norm2(la.sub(x, y))
    for _ in range(10):
        t = data.draw(rat_vectors(3, lo=0, hi=15, max_den=5))
        z = la.matvec(B.dual, t)
        assert B.norm2(la.sub(x, z)) >= best


def test_nonobtuse_metric_still_holds():
    # the retraction is metric; it stays correct without obtuseness
    for x in [(1, -1), (-1, 2), (Q(3, 2), Q(-5)), (-1, -1)]:
        r = retract(NONOBTUSE, x)
        assert certificate_ok(NONOBTUSE, x, r)
        assert r.value == retract_oracle(NONOBTUSE, x).value
        ref = moreau_float(NONOBTUSE, x)
        assert all(math.isclose(float(a), b, abs_tol=1e-9) for a, b in zip(r.value, ref))


def test_nonobtuse_counterexamples():
    # x = (0,-3) <= x' = (1,-3) but L(x) = 0 is not <= L(x') = (1,-1/2)
    x, x2 = (0, -3), (1, -3)
    assert leq(NONOBTUSE, x, x2)
    assert retract(NONOBTUSE, x).value == (0, 0)
    assert retract(NONOBTUSE, x2).value == (1, Q(-1, 2))
    assert not leq(NONOBTUSE, retract(NONOBTUSE, x).value, retract(NONOBTUSE, x2).value)
    # z = omega_2 is dominant and above x = (-3,-3), yet not above L(x) = 0
    z = NONOBTUSE.omega(1)
    assert z == (Q(-2, 3), Q(4, 3)) and in_dominant(NONOBTUSE, z) and leq(NONOBTUSE, (-3, -3), z)
    assert not leq(NONOBTUSE, retract(NONOBTUSE, (-3, -3)).value, z)


def test_fallback_flag_on_nonobtuse():
    flagged = 0
    for a in range(-6, 7):
        for b in range(-6, 7):
            x = (Q(a), Q(b, 2))
            r = retract(NONOBTUSE, x)
            assert certificate_ok(NONOBTUSE, x, r)
            flagged += r.used_fallback
    assert flagged > 0


def test_linearity_domain_examples():
    assert linearity_domain(A2, la.add(A2.omega(0), A2.omega(1))) == ()
    assert linearity_domain(A2, (-1, -1)) == (0, 1)
    x = la.scale(3, A2.omega(0))
    J = linearity_domain(A2, x)
    assert in_K_J(A2, J, x)[0] and proj_J(A2, J, x)[0] == x


@pytest.mark.parametrize("B", catalog(5), ids=lambda B: B.name)
def test_boundary_vectors_all_cones_agree(B):
    x = la.sub(B.omega(0), la.scale(Q(1, 2), B.alpha(B.rank - 1)))
    y = retract(B, x).value
    for J in subsets_by_size(B.rank):
        if in_K_J(B, J, x)[0]:
            assert proj_J(B, J, x)[0] == y
