"""Regularity constants of polyhedral constraint systems.

For a system x in D, g(x) in K with jacobian G at the base point, every
admissible tuple (u, v, u*, v*) lives in one *piece*: a cell of D at xbar
(direction cone C_D, normal cone N_D) paired with a cell of K at g(xbar)
(C_K, N_K).  Inside a piece the constraints read

    u in C_D,  u* + G^T v* in N_D,  v + G u in C_K,  -v* in N_K,

so the u-block and the v*-block decouple:

    min ||v||  = min over unit u in C_D  of d(G u, C_K)
    min ||u*|| = min over unit v* in -N_K of d(G^T v*, N_D).

Both are "cone gap" problems, solved exactly: by linear programming over
the facets of the unit sphere for p in {1, inf}, and by enumerating face
pairs (a restricted smallest-eigenvalue problem on each) for p = 2.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog, nnls

from .matrices import Witness, frobenius_min_matrix, min_opnorm_matrix
from .norms import NormSpec, operator_norm, sphere_points, vec_norm, vec_norms
from .polyhedral import (
    Cone,
    ConvexCone,
    dir_limiting_normal_cone,
    limiting_normal_cone,
    min_norm_point,
    tangent_cone,
)
from .system import ConstraintSystem, enumerate_pieces

INF = math.inf


@dataclass
class SolverConfig:
    resolution: int = 720
    refine_tol: float = 1e-4
    pool: int = 32
    seed: int = 0
    box: float = 4.0
    threads: int = 1
    oracle_resolution: int = 1440

    @classmethod
    def from_dict(cls, d: dict | None) -> "SolverConfig":
        d = dict(d or {})
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        return cls(**known)


# ---------------------------------------------------------------------------
# cone gap: min ||L x - y|| over unit x in C1 and y in C2


def _gap_lp(L: np.ndarray, C1: ConvexCone, C2: ConvexCone, p: NormSpec):
    n1, n2 = L.shape[1], L.shape[0]
    M1, E1 = C1.h_rep()
    M2, E2 = C2.h_rep()
    nt = n2 if p is NormSpec.ONE else 1
    nv = n1 + n2 + nt
    c = np.zeros(nv)
    c[n1 + n2:] = 1.0
    T = -np.eye(n2) if nt == n2 else -np.ones((n2, 1))
    base_ub = [np.hstack([L, -np.eye(n2), T]), np.hstack([-L, np.eye(n2), T])]
    base_rhs = [np.zeros(n2), np.zeros(n2)]
    if M1.shape[0]:
        base_ub.append(np.hstack([M1, np.zeros((M1.shape[0], n2 + nt))]))
        base_rhs.append(np.zeros(M1.shape[0]))
    if M2.shape[0]:
        base_ub.append(np.hstack([np.zeros((M2.shape[0], n1)), M2, np.zeros((M2.shape[0], nt))]))
        base_rhs.append(np.zeros(M2.shape[0]))
    base_eq = []
    if E1.shape[0]:
        base_eq.append(np.hstack([E1, np.zeros((E1.shape[0], n2 + nt))]))
    if E2.shape[0]:
        base_eq.append(np.hstack([np.zeros((E2.shape[0], n1)), E2, np.zeros((E2.shape[0], nt))]))
    best = (INF, None, None)
    if p is NormSpec.INF:
        facets = [(i, s) for i in range(n1) for s in (1.0, -1.0)]
    else:
        facets = list(itertools.product((1.0, -1.0), repeat=n1))
    for facet in facets:
        A_ub = list(base_ub)
        b_ub = list(base_rhs)
        A_eq = list(base_eq)
        b_eq = [np.zeros(r.shape[0]) for r in base_eq]
        bounds = [(None, None)] * (n1 + n2) + [(0.0, None)] * nt
        if p is NormSpec.INF:
            i, s = facet
            for j in range(n1):
                bounds[j] = (-1.0, 1.0)
            bounds[i] = (s, s)
        else:
            s = np.array(facet)
            A_ub.append(np.hstack([-np.diag(s), np.zeros((n1, n2 + nt))]))
            b_ub.append(np.zeros(n1))
            A_eq.append(np.concatenate([s, np.zeros(n2 + nt)])[None, :])
            b_eq.append(np.ones(1))
        res = linprog(c, A_ub=np.vstack(A_ub), b_ub=np.concatenate(b_ub),
                      A_eq=np.vstack(A_eq) if A_eq else None,
                      b_eq=np.concatenate(b_eq) if A_eq else None,
                      bounds=bounds, method="highs")
        if res.status != 0:
            continue
        x, y = res.x[:n1], res.x[n1:n1 + n2]
        x = x / vec_norm(x, p)
        val = vec_norm(L @ x - y, p)
        if val < best[0] - 1e-13:
            best = (val, x, y)
    return best


def _nonzero_in(A: np.ndarray, Ceq: np.ndarray, k: int) -> np.ndarray | None:
    """A nonzero e with A e <= 0 and Ceq e = 0, or None."""
    if k == 0:
        return None
    cone = ConvexCone(k, ineq=A, eq=Ceq)
    R, Lb = cone.v_rep()
    if R.shape[0]:
        return R[0]
    if Lb.shape[0]:
        return Lb[0]
    return None


def _gap_faces(L: np.ndarray, C1: ConvexCone, C2: ConvexCone):
    n1, n2 = L.shape[1], L.shape[0]
    M1, E1 = C1.h_rep()
    M2, E2 = C2.h_rep()
    faces1 = [f for f in C1.faces() if not f.is_zero()]
    faces2 = C2.faces()
    best = (INF, None, None)
    for f1 in faces1:
        Q1 = f1.span_basis()
        k1 = Q1.shape[1]
        if k1 == 0:
            continue
        LQ = L @ Q1
        for f2 in faces2:
            Q2 = f2.span_basis()
            P2 = Q2 @ Q2.T if Q2.shape[1] else np.zeros((n2, n2))
            A = LQ - P2 @ LQ
            lam, V = np.linalg.eigh(A.T @ A)
            tol = 1e-10 * max(1.0, lam[-1])
            W = V[:, lam <= lam[0] + tol]
            cons_ineq = []
            if M1.shape[0]:
                cons_ineq.append(M1 @ Q1 @ W)
            Y = P2 @ LQ @ W
            if M2.shape[0]:
                cons_ineq.append(M2 @ Y)
            cons_eq = []
            if E2.shape[0]:
                cons_eq.append(E2 @ Y)
            d = W.shape[1]
            Ain = np.vstack(cons_ineq) if cons_ineq else np.zeros((0, d))
            Aeq = np.vstack(cons_eq) if cons_eq else np.zeros((0, d))
            if d == 1:
                e = None
                for s in (1.0, -1.0):
                    ok = (not Ain.shape[0] or np.all(Ain[:, 0] * s <= 1e-9)) and \
                         (not Aeq.shape[0] or np.all(np.abs(Aeq[:, 0]) <= 1e-9))
                    if ok:
                        e = np.array([s])
                        break
            else:
                e = _nonzero_in(Ain, Aeq, d)
            if e is None:
                continue
            x = Q1 @ (W @ e)
            x = x / np.linalg.norm(x)
            if not C1.contains(x, 1e-7):
                continue
            dist, y = min_norm_point(L @ x, C2, NormSpec.TWO)
            if dist < best[0] - 1e-13:
                best = (dist, x, y)
    return best


def cone_gap(L, C1: ConvexCone, C2: ConvexCone, p) -> tuple[float, np.ndarray | None, np.ndarray | None]:
    """min ||L x - y||_p over x in C1 with ||x||_p = 1 and y in C2.

    Returns ``(value, x, y)``; value is +inf when C1 = {0}.
    """
    p = NormSpec.parse(p)
    L = np.atleast_2d(np.asarray(L, dtype=float))
    if C1.is_zero():
        return INF, None, None
    if p is NormSpec.TWO:
        return _gap_faces(L, C1, C2)
    return _gap_lp(L, C1, C2, p)


# ---------------------------------------------------------------------------
# per-piece table


@dataclass
class PieceResult:
    index: int
    v_norm: float
    u: np.ndarray | None
    v: np.ndarray | None
    ustar_norm: float
    vstar: np.ndarray | None
    ustar: np.ndarray | None

    @property
    def finite(self) -> bool:
        return math.isfinite(self.v_norm) and math.isfinite(self.ustar_norm)

    @property
    def max_obj(self) -> float:
        return max(self.v_norm, self.ustar_norm)

    @property
    def sum_obj(self) -> float:
        return self.v_norm + self.ustar_norm

    def witness(self, norm: NormSpec) -> Witness:
        return Witness(self.u, self.v, self.ustar, self.vstar, norm=norm,
                       meta={"piece": self.index})


def _solve_piece(sys: ConstraintSystem, idx: int, piece) -> PieceResult:
    p, q = sys.norm, sys.norm.dual
    G = sys.G
    vn, u, w = cone_gap(G, piece.d_dir, piece.k_dir, p)
    v = None if u is None else w - G @ u
    un, vs, xi = cone_gap(G.T, piece.k_normal.negate(), piece.d_normal, q)
    us = None if vs is None else xi - G.T @ vs
    if v is not None:
        vn = vec_norm(v, p)
    if us is not None:
        un = vec_norm(us, q)
    return PieceResult(idx, vn, u, v, un, vs, us)


def piece_table(sys: ConstraintSystem, cfg: SolverConfig | None = None) -> list[PieceResult]:
    cfg = cfg or SolverConfig()
    cache = sys.__dict__.setdefault("_piece_tables", {})
    key = str(sys.norm)
    if key in cache:
        return cache[key]
    pieces = enumerate_pieces(sys)
    jobs = list(enumerate(pieces))
    if cfg.threads and cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
            table = list(ex.map(lambda ij: _solve_piece(sys, *ij), jobs))
    else:
        table = [_solve_piece(sys, i, pc) for i, pc in jobs]
    cache[key] = table
    return table


def _best(table, key):
    best = None
    for r in table:
        if not r.finite:
            continue
        val = key(r)
        if best is None or val < best[0] - 1e-15:
            best = (val, r)
    return best


def compute_rg(sys: ConstraintSystem, cfg: SolverConfig | None = None) -> tuple[float, Witness | None]:
    best = _best(piece_table(sys, cfg), lambda r: r.max_obj)
    if best is None:
        return INF, None
    return best[0], best[1].witness(sys.norm)


def compute_rg_over(sys: ConstraintSystem, cfg: SolverConfig | None = None) -> tuple[float, Witness | None]:
    best = _best(piece_table(sys, cfg), lambda r: r.sum_obj)
    if best is None:
        return INF, None
    return best[0], best[1].witness(sys.norm)


def _compatible(r: PieceResult, tol: float = 1e-9) -> bool:
    scale = 1.0 + abs(float(r.ustar @ r.u)) + abs(float(r.vstar @ r.v))
    return abs(float(r.ustar @ r.u - r.vstar @ r.v)) <= tol * scale


def compute_rg_diamond(sys: ConstraintSystem, cfg: SolverConfig | None = None) -> tuple[float, Witness | None]:
    """rg restricted to compatible tuples.

    Directional normals of a polyhedral set are orthogonal to the direction,
    so the piecewise minimizers already satisfy u*.u = v*.v; each candidate
    is still checked explicitly and discarded if the identity fails.
    """
    table = [r for r in piece_table(sys, cfg) if r.finite and _compatible(r)]
    best = _best(table, lambda r: r.max_obj)
    if best is None:
        return INF, None
    return best[0], best[1].witness(sys.norm)


def compute_rg_circ(sys: ConstraintSystem, cfg: SolverConfig | None = None) -> tuple[float, float, Witness | None]:
    cfg = cfg or SolverConfig()
    rgd, _ = compute_rg_diamond(sys, cfg)
    if not math.isfinite(rgd):
        return INF, INF, None
    table = [r for r in piece_table(sys, cfg) if r.finite and _compatible(r)]
    table.sort(key=lambda r: (r.max_obj, r.index))
    best_up, best_w, best_lo = INF, None, INF
    for r in table[: cfg.pool]:
        w = r.witness(sys.norm)
        B, up, lo = min_opnorm_matrix(w, sys.norm, seed=cfg.seed)
        best_lo = min(best_lo, lo)
        if up < best_up - 1e-15:
            best_up = up
            best_w = Witness(w.u, w.v, w.ustar, w.vstar, B=B, norm=sys.norm, meta=w.meta)
    lower = min(max(rgd, best_lo), best_up)
    return lower, best_up, best_w


# ---------------------------------------------------------------------------
# Euclidean constant: sqrt(||u*||^2 + ||v||^2 - (u*.u)^2)


def cone_sphere_samples(C: ConvexCone, resolution: int, seed: int = 0) -> np.ndarray:
    """Unit vectors of C: a projected sphere grid plus the generators."""
    n = C.dim
    if C.is_zero():
        return np.zeros((0, n))
    if n <= 3:
        S = sphere_points(NormSpec.TWO, n, max(resolution, 4))
    else:
        rng = np.random.default_rng(seed)
        S = rng.normal(size=(resolution * 4, n))
        S /= np.linalg.norm(S, axis=1)[:, None]
    R, Lb = C.v_rep()
    if R.shape[0] == 0:
        # a subspace: orthogonal projection replaces the nonnegative fit
        Q = _subspace_basis(Lb)
        X = (S @ Q) @ Q.T
        nx = np.linalg.norm(X, axis=1)
        pts = list(X[nx > 1e-12] / nx[nx > 1e-12, None])
    else:
        Gm = C.generators()
        pts = []
        for s in S:
            lam, _ = nnls(Gm, s)
            x = Gm @ lam
            nx = np.linalg.norm(x)
            if nx > 1e-12:
                pts.append(x / nx)
    pts.extend(list(R))
    pts.extend(list(Lb))
    pts.extend(list(-Lb))
    P = np.array(pts)
    return np.unique(np.round(P, 13), axis=0)


def _subspace_basis(Lb: np.ndarray) -> np.ndarray:
    if Lb.shape[0] == 0:
        return np.zeros((Lb.shape[1], 0))
    U, sv, _ = np.linalg.svd(Lb.T, full_matrices=False)
    return U[:, sv > 1e-12 * max(1.0, sv.max(initial=0.0))]


def _unit_projector(C: ConvexCone):
    """x -> normalized Euclidean projection of x onto C (None at the apex)."""
    R, Lb = C.v_rep()
    if R.shape[0] == 0:
        Q = _subspace_basis(Lb)

        def fit(x):
            return Q @ (Q.T @ x)
    else:
        Gm = C.generators()

        def fit(x):
            return Gm @ nnls(Gm, x)[0]

    def proj(x):
        y = fit(x)
        ny = np.linalg.norm(y)
        return y / ny if ny > 1e-12 else None

    return proj


def _euclid_distance(C: ConvexCone):
    """x -> Euclidean distance from x to C."""
    R, Lb = C.v_rep()
    if R.shape[0] == 0:
        Q = _subspace_basis(Lb)
        return lambda x: float(np.linalg.norm(x - Q @ (Q.T @ x)))
    return lambda x: min_norm_point(x, C, NormSpec.TWO)[0]


def _dagger_piece(sys: ConstraintSystem, piece, cfg: SolverConfig):
    G = sys.G
    Cu = piece.d_dir
    Cv = piece.k_normal.negate()
    Us = cone_sphere_samples(Cu, cfg.resolution, cfg.seed)
    Vs = cone_sphere_samples(Cv, cfg.resolution, cfg.seed)
    if Us.shape[0] == 0 or Vs.shape[0] == 0:
        return INF, None

    dist_k, dist_d = _euclid_distance(piece.k_dir), _euclid_distance(piece.d_normal)

    def vpart(u):
        return dist_k(G @ u)

    def upart(vs):
        return dist_d(G.T @ vs)

    bv = np.array([vpart(u) for u in Us])
    au = np.array([upart(vs) for vs in Vs])
    cross = (Vs @ G @ Us.T)  # v*.G u, rows v*, cols u
    obj = au[:, None] ** 2 + bv[None, :] ** 2 - cross ** 2
    flat_obj = obj.ravel()
    top = np.argpartition(flat_obj, min(4, flat_obj.size - 1))[:5]
    order = top[np.argsort(flat_obj[top], kind="stable")]
    proj_u, proj_v = _unit_projector(Cu), _unit_projector(Cv)

    def value(u, vs, a=None, b=None):
        a = upart(vs) if a is None else a
        b = vpart(u) if b is None else b
        c = float(vs @ G @ u)
        return a * a + b * b - c * c, a, b

    best_val, best_pair = INF, None
    n, m = sys.n, sys.m
    for flat in order:
        i, j = np.unravel_index(flat, obj.shape)
        vs, u = Vs[i].copy(), Us[j].copy()
        cur = float(obj[i, j])
        a_cur, b_cur = float(au[i]), float(bv[j])
        step = 2.0 * math.pi / max(cfg.resolution, 4)
        while step > cfg.refine_tol * 0.1:
            improved = False
            for which, dim in (("u", n), ("v", m)):
                for k in range(dim):
                    for s in (1.0, -1.0):
                        if which == "u":
                            cand = proj_u(u + s * step * np.eye(n)[k])
                            if cand is None:
                                continue
                            val, _, b = value(cand, vs, a=a_cur)
                            if val < cur - 1e-15:
                                u, cur, b_cur, improved = cand, val, b, True
                        else:
                            cand = proj_v(vs + s * step * np.eye(m)[k])
                            if cand is None:
                                continue
                            val, a, _ = value(u, cand, b=b_cur)
                            if val < cur - 1e-15:
                                vs, cur, a_cur, improved = cand, val, a, True
            if not improved:
                step *= 0.5
        if cur < best_val:
            best_val, best_pair = cur, (u, vs)
    return math.sqrt(max(best_val, 0.0)), best_pair


def compute_rg_dagger(sys: ConstraintSystem, cfg: SolverConfig | None = None) -> tuple[float, Witness | None]:
    cfg = cfg or SolverConfig()
    if sys.norm is not NormSpec.TWO:
        raise ValueError("the Frobenius-type constant is defined for the Euclidean norm only")
    G = sys.G
    best_val, best_w = INF, None
    for piece in enumerate_pieces(sys):
        val, pair = _dagger_piece(sys, piece, cfg)
        if pair is None or val >= best_val:
            continue
        u, vs = pair
        _, w = min_norm_point(G @ u, piece.k_dir, NormSpec.TWO)
        _, xi = min_norm_point(G.T @ vs, piece.d_normal, NormSpec.TWO)
        wit = Witness(u, w - G @ u, xi - G.T @ vs, vs, norm=NormSpec.TWO)
        if not wit.is_compatible:
            continue
        B, fro = frobenius_min_matrix(wit)
        wit.B = B
        best_val, best_w = fro, wit
    return best_val, best_w


# ---------------------------------------------------------------------------
# comparison bounds


def compute_mr_ssr_bounds(sys: ConstraintSystem, cfg: SolverConfig | None = None) -> tuple[float, float]:
    """Limiting-coderivative and graphical-derivative lower bounds on rg."""
    p, q = sys.norm, sys.norm.dual
    G = sys.G
    ND = limiting_normal_cone(sys.D, sys.xbar)
    NK = limiting_normal_cone(sys.K, sys.g.value)
    mr = INF
    for Nk in NK.pieces:
        for Nd in ND.pieces:
            val, _, _ = cone_gap(G.T, Nk.negate(), Nd, q)
            mr = min(mr, val)
    TD = tangent_cone(sys.D, sys.xbar)
    TK = tangent_cone(sys.K, sys.g.value)
    ssr = INF
    for Td in TD.pieces:
        for Tk in TK.pieces:
            val, _, _ = cone_gap(G, Td, Tk, p)
            ssr = min(ssr, val)
    return mr, ssr


# ---------------------------------------------------------------------------
# report


def _num(x: float):
    if x is None:
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


@dataclass
class ConstantsReport:
    norm: NormSpec
    rg: float
    rg_over: float
    rg_diamond: float
    rg_circ_lower: float
    rg_circ_upper: float
    rg_dagger: float | None
    mr_bound: float
    ssr_bound: float
    witnesses: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def chain_violations(self, tol: float = 1e-6, grid_tol: float = 5e-3) -> list[str]:
        """Inequalities between the constants that fail on this report."""
        bad = []

        def le(a, b, name, t=tol):
            if math.isinf(a) and math.isinf(b):
                return
            if a > b + t * max(1.0, abs(b) if math.isfinite(b) else 1.0):
                bad.append(f"{name}: {a} > {b}")

        le(self.rg, self.rg_diamond, "rg <= rg_diamond")
        le(self.rg_diamond, self.rg_circ_lower, "rg_diamond <= rg_circ_lower")
        le(self.rg_circ_lower, self.rg_circ_upper, "rg_circ_lower <= rg_circ_upper")
        le(self.rg, self.rg_over, "rg <= rg_over")
        le(self.rg_over, 2 * self.rg, "rg_over <= 2 rg")
        le(self.mr_bound, self.rg, "mr_bound <= rg")
        le(self.ssr_bound, self.rg, "ssr_bound <= rg")
        if self.rg_dagger is not None:
            le(self.rg_circ_lower, self.rg_dagger, "rg_circ_lower <= rg_dagger", grid_tol)
            le(self.rg_dagger, math.sqrt(2) * self.rg_circ_upper, "rg_dagger <= sqrt2 rg_circ_upper", grid_tol)
        return bad

    def to_dict(self) -> dict:
        return {
            "norm_p": str(self.norm),
            "rg": _num(self.rg),
            "rg_over": _num(self.rg_over),
            "rg_diamond": _num(self.rg_diamond),
            "rg_circ": {"lower": _num(self.rg_circ_lower), "upper": _num(self.rg_circ_upper)},
            "rg_dagger": _num(self.rg_dagger) if self.rg_dagger is not None else None,
            "mr_bound": _num(self.mr_bound),
            "ssr_bound": _num(self.ssr_bound),
            "witnesses": {k: (w.to_dict() if w is not None else None) for k, w in self.witnesses.items()},
            "diagnostics": self.diagnostics,
        }


def compute_constants(sys: ConstraintSystem, cfg: SolverConfig | None = None) -> ConstantsReport:
    cfg = cfg or SolverConfig()
    table = piece_table(sys, cfg)
    rg, w_rg = compute_rg(sys, cfg)
    rgo, w_rgo = compute_rg_over(sys, cfg)
    rgd, w_rgd = compute_rg_diamond(sys, cfg)
    lo, up, w_circ = compute_rg_circ(sys, cfg)
    dag, w_dag = (compute_rg_dagger(sys, cfg) if sys.norm is NormSpec.TWO else (None, None))
    mr, ssr = compute_mr_ssr_bounds(sys, cfg)
    diag = {
        "pieces": len(table),
        "pieces_with_witness": sum(r.finite for r in table),
        "method": "exact (faces)" if sys.norm is NormSpec.TWO else "exact (lp)",
        "dagger_resolution": cfg.resolution if sys.norm is NormSpec.TWO else None,
        "refine_tol": cfg.refine_tol,
        "rg_circ_gap": (up - lo) if math.isfinite(up) else None,
    }
    return ConstantsReport(sys.norm, rg, rgo, rgd, lo, up, dag, mr, ssr,
                           witnesses={"rg": w_rg, "rg_over": w_rgo, "rg_diamond": w_rgd,
                                      "rg_circ": w_circ, "rg_dagger": w_dag},
                           diagnostics=diag)


# ---------------------------------------------------------------------------
# brute-force oracle


def _polytope_vertices(A: np.ndarray, b: np.ndarray, E: np.ndarray, k: int) -> np.ndarray:
    """Vertices of {y : A y <= b, E y = 0} by brute-force active sets."""
    verts = []
    rE = np.linalg.matrix_rank(E) if E.shape[0] else 0
    need = k - rE
    for S in itertools.combinations(range(A.shape[0]), need):
        Mx = np.vstack([E, A[list(S)]]) if E.shape[0] else A[list(S)]
        rhs = np.concatenate([np.zeros(E.shape[0]), b[list(S)]])
        if Mx.shape[0] == 0 or np.linalg.matrix_rank(Mx) < k:
            continue
        y, *_ = np.linalg.lstsq(Mx, rhs, rcond=None)
        if np.all(A @ y <= b + 1e-9) and (not E.shape[0] or np.all(np.abs(E @ y) <= 1e-9)):
            verts.append(y)
    if not verts:
        return np.zeros((1, k))
    return np.unique(np.round(np.array(verts), 12), axis=0)


class _DualDistance:
    """Vectorized d_p(z, C) = max{y.z : y in polar(C), ||y||_q <= 1}."""

    def __init__(self, C: ConvexCone, p: NormSpec):
        self.C = C
        self.p = p
        k = C.dim
        if p is NormSpec.TWO:
            self.Y = None
            return
        R, L = C.v_rep()
        if p is NormSpec.ONE:  # dual ball is the cube
            box = np.vstack([np.eye(k), -np.eye(k)])
            bb = np.ones(2 * k)
        else:  # dual ball is the cross-polytope
            box = np.array(list(itertools.product((1.0, -1.0), repeat=k)))
            bb = np.ones(box.shape[0])
        A = np.vstack([R, box]) if R.shape[0] else box
        b = np.concatenate([np.zeros(R.shape[0]), bb])
        self.Y = _polytope_vertices(A, b, L, k)

    def __call__(self, Z: np.ndarray) -> np.ndarray:
        Z = np.atleast_2d(Z)
        if self.Y is not None:
            return np.maximum(0.0, (Z @ self.Y.T).max(axis=1))
        Gm = self.C.generators()
        out = np.empty(Z.shape[0])
        for i, z in enumerate(Z):
            if Gm.shape[1] == 0:
                out[i] = np.linalg.norm(z)
            else:
                lam, _ = nnls(Gm, z)
                out[i] = np.linalg.norm(Gm @ lam - z)
        return out


def _ray_distance(Z: np.ndarray, d: np.ndarray, p: NormSpec) -> np.ndarray:
    """min over t >= 0 of ||t d - z|| for every row z of Z."""
    if not np.any(d):
        return vec_norms(Z, p)
    if p is NormSpec.TWO:
        t = np.maximum(0.0, Z @ d) / float(d @ d)
        return np.linalg.norm(Z - t[:, None] * d[None, :], axis=1)
    nz = np.abs(d) > 1e-15
    cand = [np.zeros(Z.shape[0])]
    for i in np.nonzero(nz)[0]:
        cand.append(np.maximum(0.0, Z[:, i] / d[i]))
    best = np.full(Z.shape[0], INF)
    for t in cand:
        best = np.minimum(best, vec_norms(Z - t[:, None] * d[None, :], p))
    return best


def _null_basis(M: np.ndarray, dim: int) -> np.ndarray:
    if M.shape[0] == 0:
        return np.eye(dim)
    _, sv, Vt = np.linalg.svd(M)
    rank = int(np.sum(sv > 1e-10 * max(1.0, sv.max())))
    return Vt[rank:].T


def _critical_directions(rows: np.ndarray, dim: int, nrm: NormSpec, res: int) -> np.ndarray:
    """Unit directions on the lower-dimensional sets cut out by the rows.

    A uniform grid misses lines and planes spanned by or orthogonal to
    constraint rows, and constants attained there would be overestimated.
    """
    rows = rows[np.linalg.norm(rows, axis=1) > 1e-12] if rows.size else np.zeros((0, dim))
    subspaces = []
    for k in range(1, min(dim, rows.shape[0]) + 1):
        for S in itertools.combinations(range(rows.shape[0]), k):
            M = rows[list(S)]
            subspaces.append(M.T)                # span of the rows
            subspaces.append(_null_basis(M, dim))  # their orthogonal complement
    out = []
    for B in subspaces:
        if B.shape[1] == 0 or B.shape[1] == dim:
            continue
        Q, _ = np.linalg.qr(B)
        Q = Q[:, : np.linalg.matrix_rank(B)]
        k = Q.shape[1]
        if k == 1:
            pts = np.array([[1.0], [-1.0]])
        elif k == 2:
            ang = np.linspace(0.0, 2 * np.pi, max(res, 8), endpoint=False)
            pts = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        else:
            continue
        X = pts @ Q.T
        out.append(X / vec_norms(X, nrm)[:, None])
    if not out:
        return np.zeros((0, dim))
    return np.vstack(out)


def _all_rows(U: PolyUnion) -> np.ndarray:
    mats = [np.vstack([P.A, P.E]) for P in U.pieces]
    return np.vstack(mats) if mats else np.zeros((0, U.dim))


def _cone_key(C: Cone) -> tuple:
    parts = []
    for P in C.pieces:
        R, L = P.v_rep()
        parts.append((tuple(np.round(R, 9).ravel()), tuple(np.round(np.abs(L), 9).ravel())))
    return tuple(sorted(parts))


@dataclass
class OracleReport:
    rg: float
    rg_over: float
    rg_diamond: float
    rg_dagger: float | None
    grid_error: float
    resolution: int
    witness: Witness | None = None


def brute_force_oracle(sys: ConstraintSystem, cfg: SolverConfig | None = None,
                       resolution: int | None = None) -> OracleReport:
    """Sampled constants straight from the directional normal cones.

    Unit directions u and multipliers v* run over sphere grids.  For each
    pair, min ||u*|| is the distance from G^T v* to the directional normal
    cone of D at u (computed through its polar), and min ||v|| is found by
    scanning rays w of a direction grid with -v* normal to K in direction w.
    """
    cfg = cfg or SolverConfig()
    res = resolution or cfg.oracle_resolution
    if sys.n > 3 or sys.m > 3:
        raise ValueError("the brute-force oracle supports n, m <= 3")
    p, q = sys.norm, sys.norm.dual
    G = sys.G
    U0 = sphere_points(p, sys.n, res)
    VS0 = sphere_points(q, sys.m, res)
    rD, rK = _all_rows(sys.D), _all_rows(sys.K)
    U = np.unique(np.round(np.vstack([U0, _critical_directions(rD, sys.n, p, res)]), 14), axis=0)
    VS = np.unique(np.round(np.vstack([VS0, _critical_directions(rK, sys.m, q, res)]), 14), axis=0)
    Wd = np.vstack([sphere_points(p, sys.m, res), _critical_directions(rK, sys.m, p, res),
                    np.zeros((1, sys.m))])

    # u side: distance of G^T v* to N_D(xbar; u), grouped by equal cones
    ND_key, ND_cls = {}, []
    u_cls = np.empty(U.shape[0], dtype=int)
    for i, u in enumerate(U):
        C = dir_limiting_normal_cone(sys.D, sys.xbar, u)
        key = _cone_key(C)
        if key not in ND_key:
            ND_key[key] = len(ND_cls)
            ND_cls.append(C)
        u_cls[i] = ND_key[key]
    GtV = VS @ G  # rows: G^T v*
    A_cls = np.full((len(ND_cls), VS.shape[0]), INF)
    for c, C in enumerate(ND_cls):
        for P in C.pieces:
            A_cls[c] = np.minimum(A_cls[c], _DualDistance(P, q)(GtV))
    Amat = A_cls[u_cls]  # (|U|, |VS|)

    # v side: rays w with -v* in N_K(g0; w)
    NK_key, NK_cls = {}, []
    w_cls = np.empty(Wd.shape[0], dtype=int)
    for i, d in enumerate(Wd):
        C = dir_limiting_normal_cone(sys.K, sys.g.value, d)
        key = _cone_key(C)
        if key not in NK_key:
            NK_key[key] = len(NK_cls)
            NK_cls.append(C)
        w_cls[i] = NK_key[key]
    GU = U @ G.T
    dist_cls = np.full((U.shape[0], len(NK_cls)), INF)
    arg_cls = np.zeros((U.shape[0], len(NK_cls)), dtype=int)
    for i, d in enumerate(Wd):
        c = w_cls[i]
        dd = _ray_distance(GU, d, p)
        better = dd < dist_cls[:, c]
        dist_cls[better, c] = dd[better]
        arg_cls[better, c] = i
    mask = np.array([C.contains_many(-VS) for C in NK_cls])  # (classes, |VS|)
    Bmat = np.full((U.shape[0], VS.shape[0]), INF)
    for c in range(len(NK_cls)):
        cand = np.where(mask[c][None, :], dist_cls[:, c][:, None], INF)
        Bmat = np.minimum(Bmat, cand)

    with np.errstate(invalid="ignore"):
        mx = np.maximum(Amat, Bmat)
        sm = Amat + Bmat
    rg = float(np.min(mx))
    rgo = float(np.min(sm))

    # explicit witnesses for the best pairs: compatibility and the Euclidean constant
    order = np.argsort(mx, axis=None)[: cfg.pool * 2]
    rgd, dag, best_w = INF, (INF if p is NormSpec.TWO else None), None
    if p is NormSpec.TWO:
        order = np.concatenate([order, np.argsort(Amat ** 2 + Bmat ** 2, axis=None)[: cfg.pool * 2]])
    for flat in order:
        i, j = np.unravel_index(flat, mx.shape)
        if not math.isfinite(mx[i, j]):
            continue
        u, vs = U[i], VS[j]
        ND = dir_limiting_normal_cone(sys.D, sys.xbar, u)
        _, xi = min_norm_point(G.T @ vs, ND, q)
        if xi is None:
            continue
        us = xi - G.T @ vs
        best_v = None
        for c in range(len(NK_cls)):
            if mask[c, j] and (best_v is None or dist_cls[i, c] < best_v[0]):
                best_v = (dist_cls[i, c], Wd[arg_cls[i, c]])
        if best_v is None:
            continue
        d = best_v[1]
        if np.any(d):
            # optimal scaling along the ray
            ts = [0.0] + [max(0.0, (G @ u)[k] / d[k]) for k in range(sys.m) if abs(d[k]) > 1e-15]
            if p is NormSpec.TWO:
                ts.append(max(0.0, float(d @ (G @ u)) / float(d @ d)))
            t = min(ts, key=lambda t: vec_norm(t * d - G @ u, p))
            v = t * d - G @ u
        else:
            v = -G @ u
        w = Witness(u, v, us, vs, norm=p)
        if abs(w.compat_gap) <= 1e-7:
            val = max(w.norm_ustar, w.norm_v)
            if val < rgd:
                rgd, best_w = val, w
            if p is NormSpec.TWO:
                a = float(us @ u)
                dag = min(dag, math.sqrt(max(0.0, us @ us + v @ v - a * a)))

    # grid error: largest nearest-neighbour gap times a Lipschitz bound
    def gap(P, nrm):
        if P.shape[0] < 2:
            return 0.0
        D = np.array([np.sort(vec_norms(P - x, nrm))[1] for x in P])
        return float(D.max())

    h = max(gap(U0, p), gap(VS0, q))
    Lg = max(operator_norm(G, p), operator_norm(G.T, q))
    err = (1.0 + Lg) * h
    return OracleReport(rg, rgo, rgd, dag, err, res, best_w)
