import json
import math

import numpy as np
import pytest

from subrad.cli import linear_system, oracle_comparison, random_polyhedral_system
from subrad.constants import (
    brute_force_oracle,
    compute_constants,
    compute_mr_ssr_bounds,
    compute_rg,
    compute_rg_circ,
    compute_rg_dagger,
    compute_rg_diamond,
    compute_rg_over,
    cone_gap,
)
from subrad.polyhedral import ConvexCone
from subrad.system import ConstraintSystem, LocalMap, pdd_contains

from conftest import identity_full_space

EXPECTED = {"1": 0.5, "2": 1 / math.sqrt(2), "inf": 1.0}


@pytest.mark.parametrize("p", ["1", "2", "inf"])
def test_cone_example(cone_systems, cfg, p):
    s = cone_systems[p]
    tol = 1e-3 if p == "2" else 1e-6
    assert compute_rg(s, cfg)[0] == pytest.approx(EXPECTED[p], abs=tol)
    assert compute_rg_diamond(s, cfg)[0] == pytest.approx(EXPECTED[p], abs=tol)
    lo, up, w = compute_rg_circ(s, cfg)
    assert lo == pytest.approx(EXPECTED[p], abs=tol) and up == pytest.approx(EXPECTED[p], abs=tol)
    assert max(w.residuals()) <= 1e-9
    over = compute_rg_over(s, cfg)[0]
    q = {"1": math.inf, "2": 2.0, "inf": 1.0}[p]
    assert over <= 2 ** (1 / q) + 1e-3
    mr, ssr = compute_mr_ssr_bounds(s, cfg)
    assert ssr == 0


def test_cone_circ_matrix_p2(cone_systems, cfg):
    _, _, w = compute_rg_circ(cone_systems["2"], cfg)
    assert operator_norm_close(w.B, 1 / math.sqrt(2))
    assert max(w.residuals()) <= 1e-9


def operator_norm_close(B, target):
    return abs(np.linalg.norm(B, 2) - target) <= 1e-9


def test_cone_dagger(cone_systems, cfg):
    val, w = compute_rg_dagger(cone_systems["2"], cfg)
    assert val == pytest.approx(1 / math.sqrt(2), abs=1e-3)
    assert max(w.residuals()) <= 1e-9
    with pytest.raises(ValueError):
        compute_rg_dagger(cone_systems["1"], cfg)


def test_zero_mapping(zero_system, cfg):
    rep = compute_constants(zero_system, cfg)
    for v in (rep.rg, rep.rg_over, rep.rg_diamond, rep.rg_circ_lower, rep.rg_circ_upper, rep.rg_dagger,
              rep.ssr_bound):
        assert v == 0
    orc = brute_force_oracle(zero_system, cfg, 64)
    assert orc.rg == orc.rg_over == 0


def test_no_witness_gives_inf(cfg):
    rep = compute_constants(identity_full_space(), cfg)
    assert rep.rg == math.inf and rep.rg_circ_upper == math.inf
    d = rep.to_dict()
    assert d["rg"] == "inf" and d["rg_circ"]["upper"] == "inf"
    json.dumps(d)


def test_linear_system_bounds_equal_smallest_singular_value(cfg):
    A = np.array([[2.0, 1.0], [0.5, 1.5]])
    smin = float(np.linalg.svd(A, compute_uv=False)[-1])
    s = linear_system(A)
    mr, ssr = compute_mr_ssr_bounds(s, cfg)
    assert mr == pytest.approx(smin, abs=1e-9) and ssr == pytest.approx(smin, abs=1e-9)
    assert compute_rg(s, cfg)[0] == pytest.approx(smin, abs=1e-9)


def test_cone_gap_simple():
    # min ||x - y|| over unit x in the first quadrant and y in the negative orthant
    Q = ConvexCone(2, ineq=-np.eye(2))
    N = ConvexCone(2, ineq=np.eye(2))
    val, x, y = cone_gap(np.eye(2), Q, N, "2")
    assert val == pytest.approx(1.0)
    val1, _, _ = cone_gap(np.eye(2), Q, N, "1")
    assert val1 == pytest.approx(1.0)
    val_zero, _, _ = cone_gap(np.eye(2), Q, Q, "inf")
    assert val_zero == 0


@pytest.mark.parametrize("seed", range(12))
def test_random_chain_and_witnesses(seed, cfg):
    s = random_polyhedral_system(np.random.default_rng(seed))
    rep = compute_constants(s, cfg)
    assert rep.chain_violations() == []
    for key in ("rg", "rg_over", "rg_diamond"):
        w = rep.witnesses[key]
        if w is None:
            continue
        assert pdd_contains(s, w.u, w.vstar, w.ustar, w.v, 1e-7)
        assert w.unit_ok(1e-7)
    w = rep.witnesses["rg"]
    if w is not None:
        assert max(w.norm_ustar, w.norm_v) == pytest.approx(rep.rg, abs=1e-7)
    wc = rep.witnesses["rg_circ"]
    if wc is not None and wc.B is not None:
        assert max(wc.residuals()) <= 1e-8


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_mr_bound_scales_with_jacobian(lam, cfg):
    base = random_polyhedral_system(np.random.default_rng(4))
    scaled = ConstraintSystem(base.D, base.K, LocalMap(base.g.value, lam * base.G), base.xbar, base.norm)
    mr0, _ = compute_mr_ssr_bounds(base, cfg)
    mr1, _ = compute_mr_ssr_bounds(scaled, cfg)
    if math.isinf(mr0):
        assert math.isinf(mr1)
    else:
        assert mr1 == pytest.approx(lam * mr0, rel=1e-7, abs=1e-9)


def test_oracle_on_cone_p2(cone_systems, cfg):
    orc = brute_force_oracle(cone_systems["2"], cfg, 1440)
    assert abs(orc.rg - compute_rg(cone_systems["2"], cfg)[0]) <= 5e-3


# oracle outputs at resolution 720, frozen
FROZEN_ORACLE = {
    "1": (0.5, 1.0, 0.5),
    "2": (0.70710678118655, 1.0, 0.70710678118655),
    "inf": (1.0, 1.0, 1.0),
}


@pytest.mark.parametrize("p", ["1", "2", "inf"])
def test_frozen_oracle_values(cone_systems, cfg, p):
    orc = brute_force_oracle(cone_systems[p], cfg, 720)
    assert (orc.rg, orc.rg_over, orc.rg_diamond) == pytest.approx(FROZEN_ORACLE[p], abs=1e-12)
    rep = compute_constants(cone_systems[p], cfg)
    assert abs(rep.rg - orc.rg) <= 2 * orc.grid_error
    assert abs(rep.rg_over - orc.rg_over) <= 2 * orc.grid_error


@pytest.mark.parametrize("seed", [100, 101, 102, 103, 104, 105])
def test_oracle_agrees_on_random_instances(seed, cfg):
    s = random_polyhedral_system(np.random.default_rng(seed))
    out = oracle_comparison(s, cfg, 360)
    assert out["passed"], out
