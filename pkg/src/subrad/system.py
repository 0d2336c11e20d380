"""Constraint systems x in D, g(x) in K and the feasibility mapping x -> K - g(x)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq, linprog

from .norms import NormSpec, vec_norm
from .polyhedral import (
    TOL,
    CellClass,
    Cone,
    ConvexCone,
    ConvexPoly,
    PolyUnion,
    dir_limiting_normal_cone,
    min_norm_point,
)


@dataclass
class LocalMap:
    """First-order data of g at the base point.

    ``value`` is g(xbar) and ``jacobian`` its derivative.  With ``affine``
    set the map is g(x) = value + jacobian (x - xbar) everywhere; ``fn``
    supplies a global evaluator for nonlinear maps.
    """

    value: np.ndarray
    jacobian: np.ndarray
    affine: bool = True
    fn: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        self.value = np.asarray(self.value, dtype=float).ravel()
        self.jacobian = np.atleast_2d(np.asarray(self.jacobian, dtype=float))
        if self.jacobian.shape[0] != self.value.size:
            raise ValueError(
                f"jacobian has {self.jacobian.shape[0]} rows but g(xbar) has {self.value.size} entries")

    @property
    def m(self) -> int:
        return self.value.size

    @property
    def n(self) -> int:
        return self.jacobian.shape[1]

    def __call__(self, x, xbar) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        if self.fn is not None:
            return np.asarray(self.fn(x), dtype=float).ravel()
        if not self.affine:
            raise ValueError("g is only known to first order; set affine or supply fn")
        return self.value + self.jacobian @ (x - np.asarray(xbar, dtype=float).ravel())


class InfeasibleBasePoint(ValueError):
    pass


@dataclass
class ConstraintSystem:
    D: PolyUnion
    K: PolyUnion
    g: LocalMap
    xbar: np.ndarray
    norm: NormSpec = NormSpec.TWO

    def __post_init__(self):
        self.xbar = np.asarray(self.xbar, dtype=float).ravel()
        self.norm = NormSpec.parse(self.norm)
        if self.D.dim != self.xbar.size or self.g.n != self.xbar.size:
            raise ValueError("dimension mismatch between D, xbar and the jacobian")
        if self.K.dim != self.g.m:
            raise ValueError("dimension mismatch between K and g(xbar)")
        if not self.D.contains(self.xbar):
            raise InfeasibleBasePoint("xbar is not in D")
        if not self.K.contains(self.g.value):
            raise InfeasibleBasePoint("g(xbar) is not in K")

    @property
    def n(self) -> int:
        return self.xbar.size

    @property
    def m(self) -> int:
        return self.g.m

    @property
    def G(self) -> np.ndarray:
        return self.g.jacobian

    def with_norm(self, p) -> "ConstraintSystem":
        return ConstraintSystem(self.D, self.K, self.g, self.xbar, NormSpec.parse(p))

    def with_jacobian(self, G) -> "ConstraintSystem":
        g = LocalMap(self.g.value, G, affine=self.g.affine)
        return ConstraintSystem(self.D, self.K, g, self.xbar, self.norm)


def residual(sys: ConstraintSystem, x, perturbation=None) -> float:
    """Distance from 0 to F(x) (+ h(x)); +inf outside D."""
    x = np.asarray(x, dtype=float).ravel()
    if not sys.D.contains(x):
        return math.inf
    y = sys.g(x, sys.xbar)
    if perturbation is not None:
        y = y - np.asarray(perturbation(x), dtype=float).ravel()
    return min_norm_point(y, sys.K, sys.norm)[0]


def _nonempty(P: ConvexPoly) -> bool:
    n = P.dim
    res = linprog(np.zeros(n), A_ub=P.A if P.A.shape[0] else None, b_ub=P.b if P.A.shape[0] else None,
                  A_eq=P.E if P.E.shape[0] else None, b_eq=P.d if P.E.shape[0] else None,
                  bounds=[(None, None)] * n, method="highs")
    return res.status == 0


def solution_set(sys: ConstraintSystem, G=None) -> PolyUnion:
    """Zeros of the feasibility mapping, as a union of polyhedra (affine g only).

    ``G`` overrides the jacobian, which is how linear perturbations enter.
    """
    if not sys.g.affine or sys.g.fn is not None:
        raise ValueError("solution_set needs an affine g")
    G = sys.G if G is None else np.atleast_2d(np.asarray(G, dtype=float))
    c = sys.g.value - G @ sys.xbar  # g(x) = c + G x
    pieces = []
    for P in sys.D.pieces:
        for Q in sys.K.pieces:
            A = np.vstack([P.A, Q.A @ G])
            b = np.concatenate([P.b, Q.b - Q.A @ c])
            E = np.vstack([P.E, Q.E @ G])
            d = np.concatenate([P.d, Q.d - Q.E @ c])
            S = ConvexPoly(A, b, E, d, dim=sys.n)
            if _nonempty(S):
                pieces.append(S)
    return PolyUnion(pieces, dim=sys.n)


def graphical_derivative_contains(sys: ConstraintSystem, u, v, tol: float = TOL) -> bool:
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    arrD = sys.D.arrangement(sys.xbar)
    arrK = sys.K.arrangement(sys.g.value)
    return arrD.in_tangent(u, tol) and arrK.in_tangent(v + sys.G @ u, tol)


@dataclass
class ShiftedCone:
    """The set cone + offset; an empty cone makes the whole set empty."""

    cone: Cone
    offset: np.ndarray

    @property
    def is_empty(self) -> bool:
        return self.cone.is_empty

    def contains(self, x, tol: float = TOL) -> bool:
        return self.cone.contains(np.asarray(x, dtype=float).ravel() - self.offset, tol)

    def min_norm(self, p) -> tuple[float, np.ndarray | None]:
        """Smallest-norm element (p-norm) of the set."""
        dist, y = min_norm_point(-self.offset, self.cone, p)
        if y is None:
            return math.inf, None
        return dist, y + self.offset


def dir_coderivative(sys: ConstraintSystem, u, v, vstar) -> ShiftedCone:
    """Set of u* paired with (u, v, v*): N_D(xbar; u) - G^T v* when -v* is an
    admissible normal of K in direction v + G u, empty otherwise."""
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    vstar = np.asarray(vstar, dtype=float).ravel()
    NK = dir_limiting_normal_cone(sys.K, sys.g.value, v + sys.G @ u)
    offset = -sys.G.T @ vstar
    if not NK.contains(-vstar):
        return ShiftedCone(Cone.empty(sys.n), offset)
    ND = dir_limiting_normal_cone(sys.D, sys.xbar, u)
    return ShiftedCone(ND, offset)


def pdd_contains(sys: ConstraintSystem, u, vstar, ustar, v, tol: float = TOL) -> bool:
    """Membership of (u*, v) in the primal-dual derivative at (u, v*)."""
    return dir_coderivative(sys, u, v, vstar).contains(ustar, tol)


@dataclass
class Piece:
    """One cell of D at xbar paired with one cell of K at g(xbar)."""

    d_cell: CellClass
    k_cell: CellClass

    @property
    def d_dir(self) -> ConvexCone:
        return self.d_cell.closure

    @property
    def d_normal(self) -> ConvexCone:
        return self.d_cell.normal

    @property
    def k_dir(self) -> ConvexCone:
        return self.k_cell.closure

    @property
    def k_normal(self) -> ConvexCone:
        return self.k_cell.normal


def enumerate_pieces(sys: ConstraintSystem) -> list[Piece]:
    arrD = sys.D.arrangement(sys.xbar)
    arrK = sys.K.arrangement(sys.g.value)
    return [Piece(cd, ck) for cd in arrD.cells for ck in arrK.cells]


def critical_zero(sys: ConstraintSystem, tol: float = 1e-9, cfg=None) -> bool:
    from .constants import compute_rg

    value, _ = compute_rg(sys, cfg)
    return value < tol


# ---------------------------------------------------------------------------
# empirical subregularity


def _ball_samples(n: int, p: NormSpec, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        Z = rng.uniform(-1.0, 1.0, size=(2 * count, n))
        if p is not NormSpec.INF:
            Z = Z[np.array([vec_norm(z, p) <= 1.0 for z in Z])]
        out.extend(Z)
    return np.array(out[:count])


def _intervals(K: PolyUnion) -> list[tuple[float, float]]:
    """The pieces of a subset of R as closed intervals."""
    out = []
    for P in K.pieces:
        lower, upper = -math.inf, math.inf
        for a, b in zip(P.A[:, 0], P.b):
            if a > 0:
                upper = min(upper, b / a)
            elif a < 0:
                lower = max(lower, b / a)
        for e, d in zip(P.E[:, 0], P.d):
            if e != 0:
                lower = max(lower, d / e)
                upper = min(upper, d / e)
        if lower <= upper:
            out.append((lower, upper))
    return out


def _scalar_distance(y: float, intervals) -> float:
    return min((max(lo - y, y - up, 0.0) for lo, up in intervals), default=math.inf)


def _scalar_solutions(phi: Callable[[float], float], K: PolyUnion, lo: float, hi: float,
                      anchor: float, grid: int = 4001) -> np.ndarray:
    """Points of {x in [lo, hi] : phi(x) in K} for scalar phi and K in R."""
    xs = np.linspace(lo, hi, grid)
    vals = np.array([phi(x) for x in xs])
    sols = [anchor]
    for lower, upper in _intervals(K):
        inside = (vals >= lower) & (vals <= upper)
        sols.extend(xs[inside])
        for level in (lower, upper):
            if not math.isfinite(level):
                continue
            f = vals - level
            for i in range(grid - 1):
                if f[i] == 0.0:
                    sols.append(xs[i])
                elif f[i] * f[i + 1] < 0:
                    sols.append(brentq(lambda t: phi(t) - level, xs[i], xs[i + 1], xtol=1e-15))
    return np.unique(np.array(sols))


def subreg_ratio(sys: ConstraintSystem, perturbation=None, r: float = 0.1, n_samples: int = 2000,
                 seed: int = 0) -> float:
    """Largest sampled d(x, S) / d(0, F(x) + h(x)) over x in the r-ball around xbar.

    S is the zero set of the perturbed mapping.  Affine systems with linear
    (or no) perturbations are handled exactly; one-dimensional systems with
    nonlinear data use a bracketing root search for S.
    """
    p = sys.norm
    Z = _ball_samples(sys.n, p, n_samples, seed)
    X = sys.xbar[None, :] + r * Z
    matrix = getattr(perturbation, "matrix", None) if perturbation is not None else None
    exact = sys.g.fn is None and sys.g.affine and (perturbation is None or matrix is not None)
    best = 0.0
    if exact:
        G = sys.G if matrix is None else sys.G + np.asarray(matrix, dtype=float)
        S = solution_set(sys, G)
        for x in X:
            if not sys.D.contains(x):
                continue
            y = sys.g.value + G @ (x - sys.xbar)
            res = min_norm_point(y, sys.K, p)[0]
            if res <= 1e-14:
                continue
            dist = min_norm_point(x, S, p)[0]
            best = max(best, dist / res)
        return best
    if sys.n != 1 or sys.m != 1:
        raise ValueError("nonlinear data are only supported for one-dimensional systems")

    def phi(t: float) -> float:
        x = np.array([t])
        y = sys.g(x, sys.xbar)
        if perturbation is not None:
            y = y - np.asarray(perturbation(x), dtype=float).ravel()
        return float(y[0])

    xb = float(sys.xbar[0])
    sols = _scalar_solutions(phi, sys.K, xb - 2 * r, xb + 2 * r, xb)
    sols = np.array([s for s in sols if sys.D.contains([s])])
    ivals = _intervals(sys.K)
    for x in X[:, 0]:
        if not sys.D.contains([x]):
            continue
        res = _scalar_distance(phi(x), ivals)
        if res <= 0.0:
            continue
        dist = float(np.min(np.abs(sols - x)))
        best = max(best, dist / res)
    return best
