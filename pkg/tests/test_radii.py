import math

import numpy as np
import pytest

from subrad.cli import linear_system, random_polyhedral_system
from subrad.radii import eckart_young, radius_report

EXPECTED = {"1": 0.5, "2": 1 / math.sqrt(2), "inf": 1.0}


@pytest.mark.parametrize("p", ["1", "2", "inf"])
def test_cone_radii(cone_systems, cfg, p):
    rep = radius_report(cone_systems[p], cfg)
    tol = 1e-3 if p == "2" else 1e-6
    assert rep.rad_ss == pytest.approx(EXPECTED[p], abs=tol)
    assert rep.rad_c1 == pytest.approx(EXPECTED[p], abs=tol)
    assert rep.rad_lip_lower == pytest.approx(EXPECTED[p], abs=tol)
    assert rep.rad_lip_upper == pytest.approx(EXPECTED[p], abs=tol)
    assert rep.violations() == []
    d = rep.to_dict()
    assert d["provenance"]["rad_lip_lower"] == "rg"
    assert (d["euclidean"] is not None) == (p == "2")


def test_zero_map_radii(zero_system, cfg):
    rep = radius_report(zero_system, cfg)
    assert rep.rad_lip_lower == rep.rad_lip_upper == rep.rad_ss == rep.rad_c1 == 0


def test_eckart_young_examples():
    r, B = eckart_young(np.diag([2.0, 1.0]))
    assert r == pytest.approx(1.0)
    assert np.allclose(np.abs(B), [[0, 0], [0, 1]])
    assert np.allclose(np.diag([2.0, 1.0]) + B, np.diag([2.0, 0.0]))
    assert eckart_young(np.eye(4))[0] == pytest.approx(1.0)
    r, B = eckart_young([[1.0, 2.0], [2.0, 4.0]])
    assert r == 0 and not B.any()
    with pytest.raises(ValueError):
        eckart_young(np.ones((2, 3)))


@pytest.mark.parametrize("seed", range(3))
def test_linear_system_matches_eckart_young(seed, cfg):
    A = np.random.default_rng(seed).normal(size=(3, 3))
    smin, _ = eckart_young(A)
    rep = radius_report(linear_system(A), cfg)
    assert rep.rad_ss == pytest.approx(smin, abs=5e-3)
    assert rep.rad_lip_lower == pytest.approx(smin, abs=5e-3)


@pytest.mark.parametrize("seed", range(8))
def test_ordering_and_factor_two(seed, cfg):
    rep = radius_report(random_polyhedral_system(np.random.default_rng(1000 + seed)), cfg)
    assert rep.violations() == []
    lo, up = rep.rad_lip_lower, rep.rad_lip_upper
    if math.isfinite(up) and lo > 0:
        assert up / lo <= 2 + 1e-6
