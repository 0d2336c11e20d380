import itertools
import math

import numpy as np
import pytest

from subrad.cli import linear_system
from subrad.polyhedral import ConvexPoly, PolyUnion, limiting_normal_cone
from subrad.system import (
    ConstraintSystem,
    InfeasibleBasePoint,
    LocalMap,
    critical_zero,
    dir_coderivative,
    enumerate_pieces,
    graphical_derivative_contains,
    pdd_contains,
    residual,
    solution_set,
    subreg_ratio,
)

from conftest import identity_full_space


def test_base_point_checked(cone_systems):
    s = cone_systems["2"]
    with pytest.raises(InfeasibleBasePoint):
        ConstraintSystem(s.D, s.K, s.g, [-1.0, 0.0])
    with pytest.raises(ValueError):
        LocalMap([0.0, 0.0], [[1.0, 0.0]])


def test_affine_evaluation(cone_systems):
    g = LocalMap([1.0], [[2.0, -1.0]])
    assert g([3.0, 1.0], [1.0, 1.0]) == pytest.approx([5.0])


def test_residual(cone_systems):
    s = cone_systems["inf"]
    assert residual(s, [1, 0]) == 0
    assert residual(s, [1, 1]) == pytest.approx(1.0)
    assert residual(s, [-1, 0]) == math.inf


def test_solution_set(cone_systems):
    S = solution_set(cone_systems["2"])
    for x in ([0, 0], [1, 0], [5, 0]):
        assert S.contains(x)
    for x in ([-1, 0], [1, 0.1], [0, 1]):
        assert not S.contains(x)
    s = cone_systems["2"]
    whole = PolyUnion([ConvexPoly.whole_space(2)])
    sK = ConstraintSystem(s.D, whole, s.g, s.xbar)
    for x in ([1, 0.5], [2, -2]):
        assert sK.D.contains(x) and solution_set(sK).contains(x)
    # an empty K cannot pass the base-point check, so bypass it to exercise pruning
    emptyK = PolyUnion([ConvexPoly([[1, 0], [-1, 0]], [-1, -1], dim=2)], dim=2)
    trick = object.__new__(ConstraintSystem)
    trick.__dict__.update(D=s.D, K=emptyK, g=s.g, xbar=s.xbar, norm=s.norm)
    assert solution_set(trick).pieces == []


def test_graphical_derivative(cone_systems):
    s = cone_systems["2"]
    assert graphical_derivative_contains(s, [1, 0], [0, 0])
    assert not graphical_derivative_contains(s, [-1, 0], [0, 0])
    assert graphical_derivative_contains(s, [1, 1], [0, -1])


@pytest.mark.parametrize("p", ["1", "2", "inf"])
def test_example_coderivative(cone_systems, p):
    s = cone_systems[p]
    c = {"1": 0.5, "2": 1 / math.sqrt(2), "inf": 1.0}[p]
    u = np.array([c, c])
    S = dir_coderivative(s, u, [0, -c], [0, 1])
    assert np.allclose(S.offset, [0, -1])
    for xi in (0.0, -0.3, -2.0):
        assert S.contains(np.array([xi, -xi]) + [0, -1])
    assert not S.contains(np.array([0.3, -0.3]) + [0, -1])
    assert not S.contains([0.0, 0.0])
    ustar = np.array([-0.5, -0.5])
    assert pdd_contains(s, u, [0, 1], ustar, [0, -c])


def test_coderivative_empty_branches(cone_systems):
    s = cone_systems["2"]
    # -v* = (-1, -1) lies in the orthant only for the zero direction of K
    assert dir_coderivative(s, [1, 0], [0, 0], [1, 1]).is_empty
    assert not pdd_contains(s, [-1, 0], [0, 1], [0, -1], [0, 0])
    lin = linear_system(np.eye(2))
    whole = PolyUnion([ConvexPoly.whole_space(2)])
    s2 = ConstraintSystem(whole, whole, LocalMap(np.zeros(2), np.zeros((2, 2))), np.zeros(2))
    assert not pdd_contains(s2, [1, 0], [0, 0], [1, 0], [0, 0])
    assert pdd_contains(s2, [1, 0], [0, 0], [0, 0], [0, 0])
    zero = linear_system(np.zeros((2, 2)))
    assert pdd_contains(zero, [1, 0], [0, 1], [0, 0], [0, 0])
    assert lin.n == 2


def test_pieces(cone_systems):
    pcs = enumerate_pieces(cone_systems["2"])
    assert len(pcs) == 12
    whole = identity_full_space()
    pw = enumerate_pieces(whole)
    assert len(pw) == 1
    assert pw[0].d_normal.is_zero() and pw[0].k_normal.is_zero()


def test_critical_zero(zero_system, cone_systems):
    assert critical_zero(zero_system)
    assert not critical_zero(cone_systems["2"])
    assert not critical_zero(identity_full_space())


def test_tuple_classification_agrees_with_pieces(cone_systems):
    s = cone_systems["2"]
    pcs = enumerate_pieces(s)
    G = s.G
    vals = (-1.0, 0.0, 1.0)
    rng = np.random.default_rng(0)
    tuples = list(itertools.product(itertools.product(vals, repeat=2), repeat=4))
    idx = rng.choice(len(tuples), 1500, replace=False)
    hits = 0
    for i in idx:
        u, v, vs, us = (np.array(t) for t in tuples[i])
        direct = pdd_contains(s, u, vs, us, v)
        via = any(P.d_dir.contains(u) and P.k_dir.contains(v + G @ u) and P.k_normal.contains(-vs)
                  and P.d_normal.contains(us + G.T @ vs) for P in pcs)
        assert direct == via, (u, v, vs, us)
        hits += direct
    assert hits > 10


def test_primal_dual_inclusion(cone_systems):
    # every primal-dual tuple is in the graphical derivative and its u* in the limiting coderivative
    s = cone_systems["2"]
    rng = np.random.default_rng(1)
    ND = limiting_normal_cone(s.D, s.xbar)
    checked = 0
    for P in enumerate_pieces(s):
        for _ in range(10):
            def sample(C):
                g = C.generators()
                return g @ rng.uniform(0, 1, g.shape[1]) if g.shape[1] else np.zeros(C.dim)
            u = sample(P.d_dir)
            w = sample(P.k_dir)
            vs = -sample(P.k_normal)
            xi = sample(P.d_normal)
            v, us = w - s.G @ u, xi - s.G.T @ vs
            assert pdd_contains(s, u, vs, us, v)
            assert graphical_derivative_contains(s, u, v)
            assert ND.contains(us + s.G.T @ vs)
            checked += 1
    assert checked == 120


def test_residual_zero_iff_solution(cone_systems):
    s = cone_systems["2"]
    S = solution_set(s)
    rng = np.random.default_rng(2)
    X = rng.integers(-2, 3, size=(200, 2)).astype(float) / 2
    for x in X:
        assert (residual(s, x) <= 1e-9) == S.contains(x)


def test_unperturbed_ratio_is_bounded(cone_systems):
    # polyhedral systems are subregular; the sampled ratio is frozen at 1
    for p in ("1", "2", "inf"):
        ratios = [subreg_ratio(cone_systems[p], None, r, 500, 0) for r in (0.1, 0.01, 0.001)]
        assert max(ratios) <= 1.0 + 1e-9


def test_nonlinear_ratio_needs_one_dimension(cone_systems):
    s = cone_systems["2"]
    with pytest.raises(ValueError):
        subreg_ratio(s, lambda x: x ** 2, 0.1, 10)
