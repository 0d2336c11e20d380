"""Matrices B with B u = v and B^T v* = u* for a witness (u, v, u*, v*)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space, qr
from scipy.optimize import linprog, minimize

from .norms import NormSpec, dual_attainer, frobenius_norm, operator_norm, vec_norm

WITNESS_TOL = 1e-9


class PreconditionError(ValueError):
    pass


@dataclass
class Witness:
    u: np.ndarray
    v: np.ndarray
    ustar: np.ndarray
    vstar: np.ndarray
    B: np.ndarray | None = None
    norm: NormSpec = NormSpec.TWO
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float).ravel()
        self.v = np.asarray(self.v, dtype=float).ravel()
        self.ustar = np.asarray(self.ustar, dtype=float).ravel()
        self.vstar = np.asarray(self.vstar, dtype=float).ravel()
        self.norm = NormSpec.parse(self.norm)
        if self.B is not None:
            self.B = np.atleast_2d(np.asarray(self.B, dtype=float))
        if self.u.size != self.ustar.size or self.v.size != self.vstar.size:
            raise ValueError("u/u* and v/v* must have matching sizes")

    @property
    def n(self) -> int:
        return self.u.size

    @property
    def m(self) -> int:
        return self.v.size

    @property
    def compat_gap(self) -> float:
        return float(self.ustar @ self.u - self.vstar @ self.v)

    @property
    def is_compatible(self) -> bool:
        return abs(self.compat_gap) <= WITNESS_TOL

    def unit_ok(self, tol: float = WITNESS_TOL) -> bool:
        q = self.norm.dual
        return abs(vec_norm(self.u, self.norm) - 1.0) <= tol and abs(vec_norm(self.vstar, q) - 1.0) <= tol

    @property
    def norm_ustar(self) -> float:
        return vec_norm(self.ustar, self.norm.dual)

    @property
    def norm_v(self) -> float:
        return vec_norm(self.v, self.norm)

    def residuals(self, B=None) -> tuple[float, float]:
        """Max-abs residuals of B u = v and B^T v* = u*."""
        B = self.B if B is None else np.atleast_2d(np.asarray(B, dtype=float))
        if B is None:
            raise ValueError("no matrix to check")
        return (float(np.max(np.abs(B @ self.u - self.v), initial=0.0)),
                float(np.max(np.abs(B.T @ self.vstar - self.ustar), initial=0.0)))

    def to_dict(self) -> dict:
        out = {"u": self.u.tolist(), "v": self.v.tolist(), "ustar": self.ustar.tolist(),
               "vstar": self.vstar.tolist(), "norm_p": str(self.norm)}
        if self.B is not None:
            out["B"] = self.B.tolist()
        return out


def _check(w: Witness, euclidean: bool = False) -> None:
    if euclidean and w.norm is not NormSpec.TWO:
        raise PreconditionError("this construction needs the Euclidean norm")
    if not w.unit_ok():
        raise PreconditionError(
            f"unit-sphere condition violated: ||u|| = {vec_norm(w.u, w.norm):.3g}, "
            f"||v*||_* = {vec_norm(w.vstar, w.norm.dual):.3g}")
    if not w.is_compatible:
        raise PreconditionError(f"compatibility u*.u = v*.v violated (gap {w.compat_gap:.3g})")


def compatible_matrix(w: Witness) -> np.ndarray:
    """B = v z*^T + w u*^T - (u*.u) w z*^T with deterministic norm attainers z*, w."""
    _check(w)
    zs = dual_attainer(w.u, w.norm)          # z*.u = ||u|| = 1, ||z*||_* = 1
    ww = dual_attainer(w.vstar, w.norm.dual)  # v*.w = ||v*||_* = 1, ||w|| = 1
    alpha = float(w.ustar @ w.u)
    return np.outer(w.v, zs) + np.outer(ww, w.ustar) - alpha * np.outer(ww, zs)


def frobenius_min_matrix(w: Witness) -> tuple[np.ndarray, float]:
    """Least Frobenius-norm B with B u = v and B^T v* = u* (Euclidean witnesses)."""
    _check(w, euclidean=True)
    alpha = float(w.ustar @ w.u)
    B = np.outer(w.vstar, w.ustar) + np.outer(w.v, w.u) - alpha * np.outer(w.vstar, w.u)
    return B, frobenius_norm(B)


def frobenius_identity(w: Witness) -> float:
    """Closed-form squared Frobenius norm of the minimizer."""
    alpha = float(w.ustar @ w.u)
    return float(w.ustar @ w.ustar + w.v @ w.v - alpha * alpha)


def _constraints(w: Witness) -> tuple[np.ndarray, np.ndarray]:
    """Independent rows of the linear system on vec(B) (row-major)."""
    m, n = w.m, w.n
    C = np.zeros((m + n, m * n))
    rhs = np.concatenate([w.v, w.ustar])
    for i in range(m):
        C[i, i * n:(i + 1) * n] = w.u
    for j in range(n):
        C[m + j, j::n] = w.vstar
    # drop dependent equations by pivoted QR on C^T
    _, R, piv = qr(C.T, pivoting=True, mode="economic")
    diag = np.abs(np.diag(R))
    r = int(np.sum(diag > 1e-10 * max(1.0, diag[0] if diag.size else 0.0)))
    keep = np.sort(piv[:r])
    return C[keep], rhs[keep]


def _affine_parametrization(w: Witness, B0: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    C, rhs = _constraints(w)
    N = null_space(C, rcond=1e-12)
    return C, rhs, N


def _repair(B: np.ndarray, C: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    b = B.ravel()
    delta, *_ = np.linalg.lstsq(C, rhs - C @ b, rcond=None)
    return (b + delta).reshape(B.shape)


def _complete_basis(x: np.ndarray) -> np.ndarray:
    x = x / np.linalg.norm(x)
    rest = null_space(x[None, :])
    return np.column_stack([x, rest])


def _parrott(w: Witness) -> np.ndarray:
    # rotate so that u and v* are the first basis vectors; only the block
    # orthogonal to both is free, and its optimal choice is rank one
    U = _complete_basis(w.u)
    V = _complete_basis(w.vstar)
    alpha = float(w.ustar @ w.u)
    b = U[:, 1:].T @ w.ustar
    c = V[:, 1:].T @ w.v
    mu = max(float(np.linalg.norm(w.ustar)), float(np.linalg.norm(w.v)))
    M = np.zeros((w.m, w.n))
    M[0, 0] = alpha
    M[0, 1:] = b
    M[1:, 0] = c
    gap = mu * mu - alpha * alpha
    if gap > 1e-300 and w.m > 1 and w.n > 1:
        M[1:, 1:] = -alpha * np.outer(c, b) / gap
    return V @ M @ U.T


def _lp_opnorm(w: Witness, p: NormSpec, C: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    m, n = w.m, w.n
    k = m * n
    # variables: vec(B) (k), S (k) with |B| <= S, t
    c = np.zeros(2 * k + 1)
    c[-1] = 1.0
    I = np.eye(k)
    rows = [np.hstack([I, -I, np.zeros((k, 1))]), np.hstack([-I, -I, np.zeros((k, 1))])]
    rhs_ub = [np.zeros(k), np.zeros(k)]
    if p is NormSpec.INF:
        for i in range(m):
            r = np.zeros(2 * k + 1)
            r[k + i * n:k + (i + 1) * n] = 1.0
            r[-1] = -1.0
            rows.append(r[None, :])
            rhs_ub.append(np.zeros(1))
    else:
        for j in range(n):
            r = np.zeros(2 * k + 1)
            r[k + j:2 * k:n] = 1.0
            r[-1] = -1.0
            rows.append(r[None, :])
            rhs_ub.append(np.zeros(1))
    A_eq = np.hstack([C, np.zeros((C.shape[0], k + 1))])
    res = linprog(c, A_ub=np.vstack(rows), b_ub=np.concatenate(rhs_ub), A_eq=A_eq, b_eq=rhs,
                  bounds=[(None, None)] * k + [(0.0, None)] * (k + 1), method="highs",
                  options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        raise RuntimeError(f"operator-norm LP failed: {res.message}")
    return res.x[:k].reshape(m, n)


def search_min_matrix(w: Witness, objective, starts: int = 8, seed: int = 0,
                      B0: np.ndarray | None = None) -> tuple[np.ndarray, float]:
    """Multi-start local search over the feasible affine set.

    ``objective`` is ``"frobenius"``, a NormSpec (operator norm) or a
    callable on matrices.  Starts are the given/compatible matrix plus
    seeded random offsets along the null space.
    """
    if B0 is None:
        B0 = compatible_matrix(w)
    C, rhs, N = _affine_parametrization(w, B0)
    shape = B0.shape
    b0 = B0.ravel()
    if objective == "frobenius":
        def f(cv):
            b = b0 + N @ cv
            return float(b @ b), 2.0 * (N.T @ b)
        jac = True
        method = "L-BFGS-B"
        opts = {"gtol": 1e-14, "ftol": 1e-16, "maxiter": 2000}
    else:
        if callable(objective):
            obj = objective
        else:
            pn = NormSpec.parse(objective)
            obj = lambda B: operator_norm(B, pn)  # noqa: E731

        def f(cv):
            return obj((b0 + N @ cv).reshape(shape))
        jac = False
        method = "Nelder-Mead"
        opts = {"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000, "adaptive": True}
    if N.shape[1] == 0:
        B = _repair(B0, C, rhs)
        val = f(np.zeros(0))[0] if jac else f(np.zeros(0))
        return B, float(math.sqrt(val) if objective == "frobenius" else val)
    rng = np.random.default_rng(seed)
    scale = 1.0 + float(np.max(np.abs(b0)))
    best_val, best_c = math.inf, None
    for s in range(starts):
        c0 = np.zeros(N.shape[1]) if s == 0 else rng.normal(scale=scale, size=N.shape[1])
        res = minimize(f, c0, jac=jac, method=method, options=opts)
        val = float(res.fun)
        if val < best_val - 1e-15 or (abs(val - best_val) <= 1e-15 and best_c is not None
                                      and tuple(res.x) < tuple(best_c)):
            best_val, best_c = val, res.x
    B = _repair((b0 + N @ best_c).reshape(shape), C, rhs)
    if objective == "frobenius":
        return B, frobenius_norm(B)
    return B, float(f(best_c) if not jac else best_val)


def min_opnorm_matrix(w: Witness, p=None, starts: int = 4, seed: int = 0) -> tuple[np.ndarray, float, float]:
    """Feasible B of small operator norm with the certified lower bound.

    Returns ``(B, upper, lower)`` where ``upper = ||B||`` and ``lower =
    max(||v||, ||u*||_*)``.  For p = 2 the optimum is attained by a rank-one
    completion in rotated coordinates and equals the lower bound; for
    p in {1, inf} the operator norm is piecewise linear in B and the
    problem is solved as a linear program.  A short local search from the
    returned matrix guards against solver slack.
    """
    p = NormSpec.parse(p if p is not None else w.norm)
    wp = Witness(w.u, w.v, w.ustar, w.vstar, norm=p)
    _check(wp)
    lower = max(vec_norm(w.v, p), vec_norm(w.ustar, p.dual))
    if lower == 0.0:
        Z = np.zeros((w.m, w.n))
        return Z, 0.0, 0.0
    C, rhs = _constraints(wp)
    if p is NormSpec.TWO:
        B = _parrott(wp)
    else:
        B = _lp_opnorm(wp, p, C, rhs)
    B = _repair(B, C, rhs)
    upper = operator_norm(B, p)
    if upper > lower * (1 + 1e-9) and starts > 0:
        Bs, val = search_min_matrix(wp, p, starts=starts, seed=seed, B0=B)
        if val < upper:
            B, upper = Bs, operator_norm(Bs, p)
    return B, max(upper, lower), lower
