import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from subrad.polyhedral import (
    Cone,
    ConvexCone,
    ConvexPoly,
    PolyUnion,
    contains,
    dir_limiting_normal_cone,
    frechet_normal_cone,
    limiting_normal_cone,
    min_norm_point,
    polar,
    tangent_cone,
)

D = PolyUnion([ConvexPoly([[-1, 1], [-1, -1]], [0, 0])])
K = PolyUnion([ConvexPoly([[-1, 0]], [0], E=[[0, 1]], d=[0]),
               ConvexPoly([[0, -1]], [0], E=[[1, 0]], d=[0])])
O = np.zeros(2)


def cc(ineq=None, eq=None):
    return ConvexCone(2, ineq=np.array(ineq or np.zeros((0, 2)), dtype=float),
                      eq=np.array(eq or np.zeros((0, 2)), dtype=float))


def same(C, pieces):
    return C.equals(Cone(2, pieces))


def test_contains():
    assert contains(D, [1, 1])
    assert not contains(K, [1, 1])
    assert contains(K, [0, 0])


def test_tangent_cones():
    assert same(tangent_cone(D, O), [cc([[-1, 1], [-1, -1]])])
    assert same(tangent_cone(D, [1, 1]), [cc([[-1, 1]])])
    assert same(tangent_cone(K, [2, 0]), [cc(eq=[[0, 1]])])


def test_polar():
    assert polar(ConvexCone.whole(2)).is_zero()
    ray = ConvexCone(2, rays=np.array([[1.0, 0.0]]))
    assert polar(ray).equals(cc([[1, 0]]))
    # polar of D: xi_1 + |xi_2| <= 0
    assert polar(tangent_cone(D, O)).equals(cc([[1, 1], [1, -1]]))


def test_frechet_normal_cones():
    assert same(frechet_normal_cone(K, O), [cc([[1, 0], [0, 1]])])
    assert same(frechet_normal_cone(K, [3, 0]), [cc(eq=[[1, 0]])])
    assert same(frechet_normal_cone(D, [1, 0]), [ConvexCone.zero(2)])


def test_directional_limiting_normal_cones():
    u = np.array([1.0, 1.0]) / math.sqrt(2)
    assert same(dir_limiting_normal_cone(D, O, u), [cc([[1, 0]], [[1, 1]])])
    assert same(dir_limiting_normal_cone(K, O, [1, 0]), [cc(eq=[[1, 0]])])
    assert dir_limiting_normal_cone(K, O, [1, 1]).is_empty
    # base point outside the set gives the empty marker
    assert dir_limiting_normal_cone(D, [-1, 0], [1, 0]).is_empty


def test_limiting_normal_cones():
    expected_D = [cc([[1, 1], [1, -1]]), cc([[1, 0]], [[1, 1]]), cc([[1, 0]], [[1, -1]]), ConvexCone.zero(2)]
    assert same(limiting_normal_cone(D, O), expected_D)
    expected_K = [cc([[1, 0], [0, 1]]), cc(eq=[[1, 0]]), cc(eq=[[0, 1]])]
    assert same(limiting_normal_cone(K, O), expected_K)
    assert same(limiting_normal_cone(D, [1, 0]), [ConvexCone.zero(2)])


def test_limiting_cone_at_zero_direction_is_full_table():
    assert dir_limiting_normal_cone(D, O, [0, 0]).equals(limiting_normal_cone(D, O))


def test_arrangement_cell_counts():
    assert len(D.arrangement(O).cells) == 4
    assert len(K.arrangement(O).cells) == 3


def test_min_norm_point_examples():
    d, x = min_norm_point([1, 0], ConvexCone.zero(2), "2")
    assert d == pytest.approx(1.0) and np.allclose(x, 0)
    neg = cc([[1, 0], [0, 1]])
    d, x = min_norm_point([1, 1], neg, "2")
    assert d == pytest.approx(math.sqrt(2)) and np.allclose(x, 0)
    d, x = min_norm_point([-1, -3], neg, "inf")
    assert d == 0 and np.allclose(x, [-1, -3])
    assert min_norm_point([1, 1], Cone.empty(2), "2") == (math.inf, None)


def test_too_many_hyperplanes_rejected():
    rows = [[math.cos(t), math.sin(t)] for t in np.linspace(0.1, 3.0, 13)]
    U = PolyUnion([ConvexPoly([r], [0]) for r in rows])
    with pytest.raises(ValueError):
        U.arrangement(O)


int_row = st.lists(st.integers(-3, 3), min_size=2, max_size=2).filter(any)


@st.composite
def convex_cone_poly(draw):
    rows = draw(st.lists(int_row, min_size=1, max_size=3))
    return ConvexPoly(np.array(rows, dtype=float), np.zeros(len(rows)))


@settings(max_examples=40, deadline=None)
@given(convex_cone_poly(), st.floats(0, 2 * math.pi))
def test_convex_directional_cone_is_normal_of_tangent(P, angle):
    U = PolyUnion([P])
    u = np.array([math.cos(angle), math.sin(angle)])
    T = P.tangent_cone(O)
    N = dir_limiting_normal_cone(U, O, u)
    if not T.contains(u):
        assert N.is_empty
        return
    TP = PolyUnion([ConvexPoly(T.ineq if T.ineq.size else np.zeros((0, 2)), np.zeros(T.ineq.shape[0]),
                               T.eq if T.eq.size else np.zeros((0, 2)), np.zeros(T.eq.shape[0]), dim=2)])
    assert N.equals(frechet_normal_cone(TP, u))


@settings(max_examples=40, deadline=None)
@given(st.lists(int_row, min_size=0, max_size=3), st.lists(int_row, min_size=0, max_size=1))
def test_bipolar(ineq, eq):
    C = ConvexCone(2, ineq=np.array(ineq, dtype=float).reshape(-1, 2), eq=np.array(eq, dtype=float).reshape(-1, 2))
    assert C.polar().polar().equals(C)


@settings(max_examples=40, deadline=None)
@given(st.lists(int_row, min_size=1, max_size=3), st.floats(-3, 3), st.floats(-3, 3),
       st.sampled_from(["1", "2", "inf"]))
def test_min_norm_point_grid_certificate(rows, z1, z2, p):
    from subrad.norms import vec_norm

    A = np.array(rows, dtype=float)
    P = ConvexPoly(A, np.ones(len(rows)))
    z = np.array([z1, z2])
    d, x = min_norm_point(z, P, p)
    assume(x is not None)
    assert P.contains(x, 1e-7)
    assert vec_norm(x - z, p) == pytest.approx(d, abs=1e-7)
    g = np.linspace(-6, 6, 121)
    X = np.array([[a, b] for a in g for b in g])
    X = X[np.all(X @ A.T <= 1 + 1e-12, axis=1)]
    if X.size:
        assert min(vec_norm(y - z, p) for y in X) >= d - 1e-7


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(-1, 1))
def test_directional_normals_are_limits_of_frechet_normals(angle, wiggle):
    # along x = t (u + t w), Frechet normals of D and K settle into the directional cone
    u = np.array([math.cos(angle), math.sin(angle)])
    w = np.array([-u[1], u[0]]) * wiggle
    for U in (D, K):
        N = dir_limiting_normal_cone(U, O, u)
        for t in (1e-3, 1e-4, 1e-5):
            x = t * (u + t * w)
            if not U.contains(x, 0.0):
                continue
            F = frechet_normal_cone(U, x, 0.0)
            for piece in F.pieces:
                R, L = piece.v_rep()
                for g in list(R) + list(L) + list(-L):
                    assert N.contains(g / max(1.0, np.abs(g).max()), 1e-6)
