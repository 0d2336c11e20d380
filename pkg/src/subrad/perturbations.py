"""Perturbation catalog: zigzag functions, the perturbations built from a
witness, the quadratic destabilizer of the zero map and the staircase
function whose subregularity is not stable under small shifts of the base
point.

Only explicit constructions are implemented.  The C^1 correction that turns
the zigzag perturbation into a genuine destabilizer exists but is not
constructive, so destruction is demonstrated on the one-dimensional
examples where it is explicit.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .matrices import Witness
from .norms import NormSpec, dual_attainer, operator_norm, vec_norm

DEFAULT_CAP = 60


def _tail_sum(term: Callable[[int], float], start: int, ref: float, limit: int = 100_000) -> float:
    # sum term(j) for j >= start until the terms are negligible against ref
    total = 0.0
    j = start
    while j < start + limit:
        t = term(j)
        total += t
        if abs(t) <= 1e-18 * max(ref, 1e-300):
            break
        j += 1
    return total


@dataclass
class ZigzagSpec:
    """Breakpoints of the zigzag for tau_k = scale * ratio**k, k >= 1."""

    scale: float = 1.0
    ratio: float = 0.5
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if not (0.0 < self.ratio < 1.0) or self.scale <= 0.0:
            raise ValueError("need scale > 0 and 0 < ratio < 1")
        K = self.cap
        self.tau = [0.0] + [self.tau_k(k) for k in range(1, K + 2)]
        # a[k] for k = 1..K+1 (a[1] := tau_1), b[k] for k = 1..K
        self.a = [0.0] * (K + 2)
        self.b = [0.0] * (K + 1)
        self.a[1] = self.tau[1]
        for k in range(1, K + 1):
            step = (self.tau[k] - self.tau[k + 1]) / (2 * (k + 1))
            self.a[k + 1] = self.tau[k + 1] + step
            self.b[k] = self.tau[k] - step
        # S[k] = chi(b_k) = sum_{j >= k} (b_j - a_{j+1})
        self.S = [0.0] * (K + 2)

        def gain(j: int) -> float:
            tj, tj1 = self.tau_k(j), self.tau_k(j + 1)
            return (tj - tj1) * (1.0 - 1.0 / (j + 1))

        self.S[K + 1] = _tail_sum(gain, K + 1, self.tau[K + 1])
        for k in range(K, 0, -1):
            self.S[k] = self.S[k + 1] + (self.b[k] - self.a[k + 1])
        # decreasing breakpoints for bisection, stored negated to sort ascending
        self._neg_a = [-self.a[k] for k in range(1, K + 2)]

    def tau_k(self, k: int) -> float:
        return self.scale * self.ratio ** k

    def check_order(self) -> bool:
        return all(self.tau[k + 1] < self.a[k + 1] < self.b[k] < self.tau[k] for k in range(1, self.cap + 1))


def zigzag_eval(spec: ZigzagSpec, t: float, extend: bool = False) -> float:
    """Slope 1 on [a_{k+1}, b_k], constant on [b_k, a_k], odd, chi(0) = 0.

    Arguments beyond tau_1 raise unless ``extend`` is set, in which case the
    function stays at chi(tau_1), so tau_1 is flat from both sides.
    Below the last generated breakpoint the function is interpolated
    linearly to 0, which changes values by at most that breakpoint.
    """
    t = float(t)
    if t < 0:
        return -zigzag_eval(spec, -t, extend)
    if t == 0.0:
        return 0.0
    a, b, S, K = spec.a, spec.b, spec.S, spec.cap
    if t > a[1]:
        if not extend:
            raise ValueError(f"|t| = {t} exceeds tau_1 = {a[1]}")
        return S[1]
    if t <= a[K + 1]:
        return t * S[K + 1] / a[K + 1]
    # _neg_a[i] = -a[i+1]; the first i with a[i+1] < t is the k with a_{k+1} < t <= a_k
    k = max(bisect.bisect_right(spec._neg_a, -t), 1)
    while not (a[k + 1] < t <= a[k]):
        k += 1 if t <= a[k + 1] else -1
    if t > b[k]:
        return S[k]
    return S[k + 1] + (t - a[k + 1])


@dataclass
class PerturbationSpec:
    """A perturbation h with h(xbar) = 0 and a declared Lipschitz bound."""

    kind: str
    fn: Callable[[np.ndarray], np.ndarray]
    modulus: float
    matrix: np.ndarray | None = None
    params: dict = field(default_factory=dict)

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(x, dtype=float).ravel()), dtype=float).ravel()

    def modulus_bound(self, radius: float) -> float:
        """Lipschitz bound valid on the ball of the given radius around xbar."""
        if self.kind == "quadratic":
            return 2.0 * abs(self.params["coef"]) * radius
        return self.modulus

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "modulus": self.modulus}
        if self.matrix is not None:
            out["B"] = np.asarray(self.matrix).tolist()
        out.update({k: v for k, v in self.params.items() if isinstance(v, (int, float, str, list))})
        return out


def linear_perturbation(B, xbar, p="2") -> PerturbationSpec:
    B = np.atleast_2d(np.asarray(B, dtype=float))
    xbar = np.asarray(xbar, dtype=float).ravel()
    return PerturbationSpec("linear", lambda x: -B @ (x - xbar), operator_norm(B, p), matrix=B,
                            params={"norm_p": str(NormSpec.parse(p))})


def step4_linear(w: Witness, xbar=None) -> PerturbationSpec:
    """h(x) = -B (x - xbar) for the matrix carried by the witness."""
    if w.B is None:
        raise ValueError("witness carries no matrix")
    xbar = np.zeros(w.n) if xbar is None else xbar
    return linear_perturbation(w.B, xbar, w.norm)


def quadratic(coef: float = 1.0, center: float = 0.0) -> PerturbationSpec:
    """h(x) = coef (x - center)^2 on the real line."""
    return PerturbationSpec("quadratic", lambda x: np.array([coef * (x[0] - center) ** 2]), 0.0,
                            params={"coef": coef, "center": center})


def piecewise_random(n: int, m: int, lip: float, seed: int = 0, p="2", pieces: int = 4,
                     xbar=None) -> PerturbationSpec:
    """Max-of-affine perturbation along a fixed direction with modulus <= lip."""
    p = NormSpec.parse(p)
    rng = np.random.default_rng(seed)
    xbar = np.zeros(n) if xbar is None else np.asarray(xbar, dtype=float).ravel()
    A = rng.normal(size=(pieces, n))
    A /= np.array([vec_norm(a, p.dual) for a in A])[:, None]
    b = rng.normal(scale=0.1, size=pieces)
    d = rng.normal(size=m)
    d /= vec_norm(d, p)
    top = float(b.max())

    def fn(x):
        return lip * (float(np.max(A @ (x - xbar) + b)) - top) * d

    return PerturbationSpec("piecewise_random", fn, float(lip), params={"seed": seed, "pieces": pieces})


@dataclass
class Step2Perturbation:
    h: PerturbationSpec
    zig_u: ZigzagSpec
    zig_us: ZigzagSpec | None
    uhat_star: np.ndarray
    vhat: np.ndarray
    t: list[float]


def step2_h(w: Witness, xbar=None, t0: float = 1.0, ratio: float = 0.5, cap: int = DEFAULT_CAP,
            tol: float = 1e-12) -> Step2Perturbation:
    """Lipschitz perturbation that makes the witness critical for F + h.

    Uses the sequence t_k = t0 ratio**k along the fixed direction u, so
    both zigzag sequences are geometric.  The certified modulus is
    ||v|| + ||u*||_*.
    """
    if not w.unit_ok():
        raise ValueError("witness must have ||u|| = ||v*||_* = 1")
    p = w.norm
    xbar = np.zeros(w.n) if xbar is None else np.asarray(xbar, dtype=float).ravel()
    uhat = dual_attainer(w.u, p)          # uhat*.u = 1, ||uhat*||_* = 1
    vhat = dual_attainer(w.vstar, p.dual)  # v*.vhat = 1, ||vhat|| = 1
    zig_u = ZigzagSpec(t0, ratio, cap)
    alpha = float(w.ustar @ w.u)
    zig_us = ZigzagSpec(t0 * abs(alpha), ratio, cap) if abs(alpha) > tol else None
    v, us = w.v.copy(), w.ustar.copy()

    def zeta(y):
        s = float(us @ y)
        if zig_us is None:
            return s
        return s - zigzag_eval(zig_us, s, extend=True)

    def fn(x):
        y = x - xbar
        return zigzag_eval(zig_u, float(uhat @ y), extend=True) * v + zeta(y) * vhat

    modulus = vec_norm(v, p) + vec_norm(us, p.dual)
    h = PerturbationSpec("zigzag", fn, modulus, params={"t0": t0, "ratio": ratio})
    ts = [t0 * ratio ** k for k in range(1, cap + 1)]
    return Step2Perturbation(h, zig_u, zig_us, uhat, vhat, ts)


# ---------------------------------------------------------------------------
# staircase


@dataclass
class StaircaseSpec:
    """a_k = scale * ratio**(k-1); b_k = a_{k+1} + (a_k - a_{k+1}) / (k + 2).

    The gap ratio (b_k - a_{k+1}) / (a_k - b_k) equals 1/(k+1) and tends to 0.
    """

    scale: float = 1.0
    ratio: float = 0.5
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if not (0.0 < self.ratio < 1.0) or self.scale <= 0.0:
            raise ValueError("need scale > 0 and 0 < ratio < 1")
        K = self.cap
        self.a = [0.0] + [self.a_k(k) for k in range(1, K + 2)]
        self.b = [0.0] + [self.b_k(k) for k in range(1, K + 1)]
        # F[k] = f(a_k) = sum_{j >= k} [(b_j - a_{j+1})^2 / 2 + (a_j - b_j)]
        self.F = [0.0] * (K + 2)

        def piece(j: int) -> float:
            aj, aj1, bj = self.a_k(j), self.a_k(j + 1), self.b_k(j)
            return 0.5 * (bj - aj1) ** 2 + (aj - bj)

        self.F[K + 1] = _tail_sum(piece, K + 1, self.a[K + 1])
        for k in range(K, 0, -1):
            self.F[k] = self.F[k + 1] + 0.5 * (self.b[k] - self.a[k + 1]) ** 2 + (self.a[k] - self.b[k])
        self._neg_a = [-self.a[k] for k in range(1, K + 2)]

    def a_k(self, k: int) -> float:
        return self.scale * self.ratio ** (k - 1)

    def b_k(self, k: int) -> float:
        a, a1 = self.a_k(k), self.a_k(k + 1)
        return a1 + (a - a1) / (k + 2)

    def gap_ratio(self, k: int) -> float:
        return (self.b_k(k) - self.a_k(k + 1)) / (self.a_k(k) - self.b_k(k))

    def check(self) -> bool:
        ok = all(self.a[k + 1] < self.b[k] < self.a[k] for k in range(1, self.cap + 1))
        ratios = [self.gap_ratio(k) for k in range(1, self.cap + 1)]
        return ok and all(r2 < r1 for r1, r2 in zip(ratios, ratios[1:]))

    def locate(self, t: float) -> int:
        """k with a_{k+1} <= t < a_k."""
        k = max(bisect.bisect_left(self._neg_a, -t), 1)
        while not (self.a[k + 1] <= t < self.a[k]):
            k += 1 if t < self.a[k + 1] else -1
        return k


class StaircaseFunction:
    """f(x) = integral of phi over [0, |x|] on (-a_1, a_1)."""

    def __init__(self, spec: StaircaseSpec):
        self.spec = spec

    def phi(self, t: float) -> float:
        s = self.spec
        t = abs(float(t))
        if t >= s.a[1]:
            raise ValueError("staircase is defined on (-a_1, a_1)")
        if t < s.a[s.cap + 1]:
            return 1.0
        k = s.locate(t)
        return t - s.a[k + 1] if t < s.b[k] else 1.0

    def __call__(self, x) -> float:
        s = self.spec
        t = abs(float(np.asarray(x, dtype=float).ravel()[0]))
        if t >= s.a[1]:
            raise ValueError("staircase is defined on (-a_1, a_1)")
        if t == 0.0:
            return 0.0
        K = s.cap
        if t < s.a[K + 1]:
            return t * s.F[K + 1] / s.a[K + 1]
        k = s.locate(t)
        if t < s.b[k]:
            return s.F[k + 1] + 0.5 * (t - s.a[k + 1]) ** 2
        return s.F[k + 1] + 0.5 * (s.b[k] - s.a[k + 1]) ** 2 + (t - s.b[k])


    def offset(self, x, k: int) -> float:
        """f(x) - f(a_k), evaluated without cancellation next to a_k."""
        s = self.spec
        t = float(np.asarray(x, dtype=float).ravel()[0])
        if k >= 2 and s.a[k] <= t < s.b[k - 1]:
            return 0.5 * (t - s.a[k]) ** 2
        if s.b[k] <= t < s.a[k]:
            return t - s.a[k]
        return self(t) - self(s.a[k])


def staircase_f(spec: StaircaseSpec) -> StaircaseFunction:
    return StaircaseFunction(spec)


def lip_estimate(fn, xbar, radius: float, n_samples: int = 1000, seed: int = 0, p="2",
                 digits: int = 12) -> float:
    """Largest sampled difference quotient over pairs in the ball around xbar.

    This is a lower bound on the Lipschitz modulus on the ball.  Quotients
    are rounded to ``digits`` significant digits: below that level the
    floating-point evaluation of fn, not fn itself, decides the value.
    """
    p = NormSpec.parse(p)
    xbar = np.atleast_1d(np.asarray(xbar, dtype=float))
    rng = np.random.default_rng(seed)
    n = xbar.size
    best = 0.0
    for _ in range(n_samples):
        x1 = xbar + radius * rng.uniform(-1.0, 1.0, size=n)
        x2 = xbar + radius * rng.uniform(-1.0, 1.0, size=n)
        dx = vec_norm(x1 - x2, p)
        if dx <= 1e-300:
            continue
        f1 = np.atleast_1d(np.asarray(fn(x1), dtype=float))
        f2 = np.atleast_1d(np.asarray(fn(x2), dtype=float))
        q = vec_norm(f1 - f2, p) / dx
        if q > 0:
            q = float(f"{q:.{digits}g}")
        best = max(best, q)
    return best
