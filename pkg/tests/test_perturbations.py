import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subrad.cli import linear_system, random_witness, staircase_system
from subrad.matrices import Witness, frobenius_min_matrix
from subrad.norms import operator_norm, vec_norm
from subrad.perturbations import (
    StaircaseSpec,
    ZigzagSpec,
    lip_estimate,
    linear_perturbation,
    piecewise_random,
    quadratic,
    staircase_f,
    step2_h,
    step4_linear,
    zigzag_eval,
)
from subrad.system import subreg_ratio


def test_zigzag_breakpoints_interleave():
    spec = ZigzagSpec(1.0, 0.5)
    assert spec.check_order()
    for k in range(1, 20):
        assert spec.a[k + 1] < spec.b[k] < spec.a[k]


def test_zigzag_values_at_tau():
    spec = ZigzagSpec(1.0, 0.5)
    for k in range(1, 31):
        t = 2.0 ** -k
        chi = zigzag_eval(spec, t)
        assert t * (1 - 1 / (k + 1)) < chi < t


def test_zigzag_odd_and_domain():
    spec = ZigzagSpec()
    assert zigzag_eval(spec, 0.0) == 0.0
    for t in (0.01, 0.2, 0.37, 0.5):
        assert zigzag_eval(spec, -t) == -zigzag_eval(spec, t)
    with pytest.raises(ValueError):
        zigzag_eval(spec, 0.6)
    assert zigzag_eval(spec, 0.6, extend=True) == zigzag_eval(spec, 0.5)


def test_zigzag_flat_at_tau():
    spec = ZigzagSpec()
    for k in range(1, 25):
        t = 2.0 ** -k
        h = 1e-9 * t
        slope = (zigzag_eval(spec, t + h, extend=True) - zigzag_eval(spec, t - h)) / (2 * h)
        assert slope == 0.0


def test_zigzag_slope_one_between():
    spec = ZigzagSpec()
    for k in range(1, 20):
        mid = 0.5 * (spec.a[k + 1] + spec.b[k])
        h = 1e-6 * mid
        slope = (zigzag_eval(spec, mid + h) - zigzag_eval(spec, mid - h)) / (2 * h)
        assert slope == pytest.approx(1.0, rel=1e-6)


def test_zigzag_lipschitz_estimate():
    spec = ZigzagSpec()
    est = lip_estimate(lambda x: [zigzag_eval(spec, x[0])], [0.0], 0.5, 1000, 0)
    assert 0.9 < est <= 1.0


def test_step2_diag_witness(diag_witness):
    pert = step2_h(diag_witness)
    h = pert.h
    assert np.allclose(h(np.zeros(2)), 0)
    assert h.modulus == pytest.approx(math.sqrt(2))
    est = lip_estimate(h, np.zeros(2), 1.0, 1000, 0)
    assert est <= math.sqrt(2) + 1e-6
    # along x = t_k u the perturbation behaves like t_k v
    for t in pert.t[:20]:
        assert np.allclose(h(t * diag_witness.u) / t, diag_witness.v, atol=1e-12)


def test_step2_zero_witness():
    w = Witness([1, 0], [0, 0], [0, 0], [1, 0])
    pert = step2_h(w)
    rng = np.random.default_rng(0)
    for x in rng.normal(size=(20, 2)):
        assert not pert.h(x).any()
    with pytest.raises(ValueError):
        step2_h(Witness([2, 0], [0, 0], [0, 0], [1, 0]))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["1", "2", "inf"]), st.integers(1, 3), st.integers(1, 3))
def test_step2_certificate_dominates_estimate(seed, p, n, m):
    w = random_witness(np.random.default_rng(seed), n, m, p)
    pert = step2_h(w)
    est = lip_estimate(pert.h, np.zeros(n), 1.0, 1000, seed, p)
    assert est <= pert.h.modulus * (1 + 1e-9)
    assert pert.h.modulus == pytest.approx(vec_norm(w.v, p) + vec_norm(w.ustar, w.norm.dual))


def test_step4_linear(diag_witness):
    B, _ = frobenius_min_matrix(diag_witness)
    diag_witness.B = B
    h = step4_linear(diag_witness)
    x = np.array([0.3, -1.1])
    assert np.allclose(h(x), -np.array([[0, 0], [-0.5, -0.5]]) @ x)
    assert h.modulus == pytest.approx(operator_norm(B, "2"))
    zero = step4_linear(Witness([1, 0], [0, 0], [0, 0], [1, 0], B=np.zeros((2, 2))))
    assert not zero(x).any() and zero.modulus == 0
    with pytest.raises(ValueError):
        step4_linear(Witness([1, 0], [0, 0], [0, 0], [1, 0]))


def test_linear_estimate_below_norm():
    B = np.array([[1.0, -2.0], [0.5, 0.3]])
    for p in ("1", "2", "inf"):
        h = linear_perturbation(B, np.zeros(2), p)
        assert lip_estimate(h, np.zeros(2), 1.0, 500, 0, p) <= operator_norm(B, p) + 1e-12


def test_quadratic_estimate():
    h = quadratic()
    for r in (1.0, 0.1, 0.01):
        est = lip_estimate(h, [0.0], r, 2000, 0)
        assert est == pytest.approx(2 * r, rel=0.05)
        assert est <= h.modulus_bound(r) + 1e-15


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.0, 5.0), st.sampled_from(["1", "2", "inf"]))
def test_piecewise_random_modulus(seed, lip, p):
    h = piecewise_random(2, 2, lip, seed, p)
    assert np.allclose(h(np.zeros(2)), 0)
    assert lip_estimate(h, np.zeros(2), 1.0, 300, seed, p) <= lip * (1 + 1e-9) + 1e-12


def test_staircase_spec():
    spec = StaircaseSpec()
    assert spec.check()
    for k in range(1, 30):
        assert spec.gap_ratio(k) == pytest.approx(1 / (k + 1))


def test_staircase_below_identity():
    spec = StaircaseSpec()
    f = staircase_f(spec)
    assert f(0.0) == 0.0
    for x in np.linspace(1e-6, spec.a[2], 400):
        assert f(x) < x
        assert f(-x) == f(x)


def test_staircase_ratio_bound():
    spec = StaircaseSpec()
    f = staircase_f(spec)
    for n in range(2, 30):
        eps = max(spec.gap_ratio(k) for k in range(n, spec.cap))
        x = spec.a[n]
        assert 1 - eps <= f(x) / x < 1


def test_staircase_slope_one_on_flat_pieces():
    spec = StaircaseSpec()
    f = staircase_f(spec)
    for k in range(1, 20):
        x = 0.5 * (spec.b[k] + spec.a[k])
        h = 1e-7 * x
        assert (f(x + h) - f(x - h)) / (2 * h) == pytest.approx(1.0, rel=1e-6)
        assert f.phi(x) == 1.0


def test_staircase_ratio_bound_on_pieces():
    # on [a_{k+1}, a_k) the loss is at most gap_ratio(k) * a_k
    spec = StaircaseSpec()
    f = staircase_f(spec)
    rng = np.random.default_rng(0)
    for x in np.concatenate([rng.uniform(0, spec.a[1], 2000), np.geomspace(1e-12, 0.99, 2000)]):
        k = spec.locate(x)
        assert x - spec.gap_ratio(k) * spec.a[k] <= f(x) < x


def test_staircase_graphical_derivative_at_zero():
    # inf of f(x)/|x| over (0, a_n] climbs toward 1
    spec = StaircaseSpec()
    f = staircase_f(spec)
    infs = []
    for n in (2, 4, 8, 16, 32):
        xs = np.geomspace(1e-12 * spec.a[n], spec.a[n], 5000)
        infs.append(min(f(x) / x for x in xs))
    assert all(b > a for a, b in zip(infs, infs[1:]))
    assert infs[-1] > 0.9


def test_quadratic_destroys_zero_map():
    s = linear_system([[0.0]])
    h = quadratic()
    ratios = [subreg_ratio(s, h, r, 1000, 0) for r in (1e-1, 1e-2, 1e-3, 1e-4)]
    for r, val in zip((1e-1, 1e-2, 1e-3, 1e-4), ratios):
        assert val >= 1 / r
    assert all(b >= 5 * a for a, b in zip(ratios, ratios[1:]))


def test_staircase_not_subregular_at_breakpoint():
    spec = StaircaseSpec()
    s = staircase_system(spec, 3)
    ratios = [subreg_ratio(s, None, r, 1000, 0) for r in (1e-2, 1e-3, 1e-4, 1e-5)]
    assert ratios[-1] > 1e3
    assert all(b >= 5 * a for a, b in zip(ratios, ratios[1:]))
