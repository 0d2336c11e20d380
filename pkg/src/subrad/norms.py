"""lp norms for p in {1, 2, inf}, their duals, induced operator norms and sphere grids."""

from __future__ import annotations

import enum
import math

import numpy as np


class NormSpec(enum.Enum):
    ONE = "1"
    TWO = "2"
    INF = "inf"

    @classmethod
    def parse(cls, p) -> "NormSpec":
        if isinstance(p, NormSpec):
            return p
        if isinstance(p, str):
            key = p.strip().lower()
            if key in ("inf", "infinity", "oo"):
                return cls.INF
            try:
                p = float(key)
            except ValueError:
                raise ValueError(f"unsupported norm exponent {p!r}; use 1, 2 or inf") from None
        if p == 1:
            return cls.ONE
        if p == 2:
            return cls.TWO
        if p == math.inf:
            return cls.INF
        raise ValueError(f"unsupported norm exponent {p!r}; use 1, 2 or inf")

    @property
    def dual(self) -> "NormSpec":
        return dual_exponent(self)

    @property
    def ord(self) -> float:
        return {"1": 1.0, "2": 2.0, "inf": math.inf}[self.value]

    def __str__(self) -> str:
        return self.value


def dual_exponent(p) -> NormSpec:
    p = NormSpec.parse(p)
    return {NormSpec.ONE: NormSpec.INF, NormSpec.TWO: NormSpec.TWO, NormSpec.INF: NormSpec.ONE}[p]


def vec_norm(x, p) -> float:
    p = NormSpec.parse(p)
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        return 0.0
    if p is NormSpec.ONE:
        return float(np.abs(x).sum())
    if p is NormSpec.INF:
        return float(np.abs(x).max())
    return float(np.linalg.norm(x))


def vec_norms(X, p) -> np.ndarray:
    """Row-wise norms of a 2-D array."""
    p = NormSpec.parse(p)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] == 0:
        return np.zeros(X.shape[0])
    if p is NormSpec.ONE:
        return np.abs(X).sum(axis=1)
    if p is NormSpec.INF:
        return np.abs(X).max(axis=1)
    return np.linalg.norm(X, axis=1)


def dual_attainer(x, p) -> np.ndarray:
    """Return y with dual norm 1 and y.x = ||x||_p (lowest index wins ties)."""
    p = NormSpec.parse(p)
    x = np.asarray(x, dtype=float).ravel()
    nx = vec_norm(x, p)
    y = np.zeros_like(x)
    if nx == 0.0:
        if x.size:
            y[0] = 1.0
        return y
    if p is NormSpec.TWO:
        return x / nx
    if p is NormSpec.ONE:
        y = np.sign(x)
        return y
    i = int(np.argmax(np.abs(x)))
    y[i] = np.sign(x[i])
    return y


def _spectral_norm(M: np.ndarray, tol: float = 1e-12, max_iter: int = 10_000) -> float:
    # power iteration on M^T M from the normalized all-ones vector
    n = M.shape[1]
    if n == 0 or M.shape[0] == 0 or not np.any(M):
        return 0.0
    S = M.T @ M
    x = np.ones(n) / math.sqrt(n)
    lam = float(x @ S @ x)
    for _ in range(max_iter):
        y = S @ x
        ny = np.linalg.norm(y)
        if ny == 0.0:
            # start vector in the null space; restart from a basis vector
            x = np.zeros(n)
            x[int(np.argmax(np.abs(S).sum(axis=0)))] = 1.0
            y = S @ x
            ny = np.linalg.norm(y)
            if ny == 0.0:
                return 0.0
        x_new = y / ny
        lam_new = float(x_new @ S @ x_new)
        if abs(lam_new - lam) <= tol * max(lam_new, 1e-300):
            lam = lam_new
            break
        x, lam = x_new, lam_new
    return math.sqrt(max(lam, 0.0))


def operator_norm(M, p) -> float:
    """Induced p -> p matrix norm."""
    p = NormSpec.parse(p)
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0.0
    if p is NormSpec.ONE:
        return float(np.abs(M).sum(axis=0).max())
    if p is NormSpec.INF:
        return float(np.abs(M).sum(axis=1).max())
    sigma = _spectral_norm(M)
    # the all-ones start can be orthogonal to the top singular vector;
    # guard against that stall with a dense SVD
    ref = float(np.linalg.norm(M, 2))
    if abs(sigma - ref) > 1e-9 * max(ref, 1.0):
        return ref
    return sigma


def frobenius_norm(M) -> float:
    M = np.asarray(M, dtype=float)
    return float(math.sqrt(np.sum(M * M)))


def _square_boundary(count: int) -> np.ndarray:
    # evenly spaced by arclength along the boundary of [-1,1]^2, starting at (1,0)
    s = np.arange(count) * 8.0 / count
    pts = np.empty((count, 2))
    for i, t in enumerate(s):
        t = (t + 1.0) % 8.0  # measured from the corner (1,-1)
        if t < 2:
            pts[i] = (1.0, -1.0 + t)
        elif t < 4:
            pts[i] = (1.0 - (t - 2), 1.0)
        elif t < 6:
            pts[i] = (-1.0, 1.0 - (t - 4))
        else:
            pts[i] = (-1.0 + (t - 6), -1.0)
    return pts


def _diamond_boundary(count: int) -> np.ndarray:
    s = np.arange(count) * 4.0 / count
    pts = np.empty((count, 2))
    for i, t in enumerate(s):
        k, f = int(t), t - int(t)
        corners = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0), (1.0, 0.0)]
        a, b = np.array(corners[k]), np.array(corners[k + 1])
        pts[i] = (1 - f) * a + f * b
    return pts


def _normalize_rows(X: np.ndarray, p: NormSpec) -> np.ndarray:
    return X / vec_norms(X, p)[:, None]


def sphere_points(p, dim: int, resolution: int) -> np.ndarray:
    """Evenly spread unit vectors of the p-norm sphere, one per row.

    The ± coordinate vectors are always included.  In two dimensions the
    grid has ``resolution`` points (rounded up to a multiple of 8 so that
    the diagonals are hit as well); in three dimensions ``resolution`` is
    the approximate number of points, laid out on the faces of a cube.
    """
    p = NormSpec.parse(p)
    if resolution < 4:
        raise ValueError("resolution must be at least 4")
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        count = int(math.ceil(resolution / 8.0) * 8)
        if p is NormSpec.TWO:
            ang = 2.0 * math.pi * np.arange(count) / count
            pts = np.column_stack([np.cos(ang), np.sin(ang)])
            # snap the exact axis/diagonal points
            pts[np.abs(pts) < 1e-15] = 0.0
        elif p is NormSpec.INF:
            pts = _square_boundary(count)
        else:
            pts = _diamond_boundary(count)
        return _normalize_rows(pts, p)
    if dim == 3:
        k = max(3, int(math.ceil(math.sqrt(resolution / 6.0))))
        if k % 2 == 0:
            k += 1
        g = np.linspace(-1.0, 1.0, k)
        A, B = np.meshgrid(g, g, indexing="ij")
        A, B = A.ravel(), B.ravel()
        faces = []
        for axis in range(3):
            others = [i for i in range(3) if i != axis]
            for sgn in (1.0, -1.0):
                P = np.empty((A.size, 3))
                P[:, axis] = sgn
                P[:, others[0]] = A
                P[:, others[1]] = B
                faces.append(P)
        pts = np.unique(np.round(np.vstack(faces), 14), axis=0)
        return _normalize_rows(pts, p)
    raise ValueError(f"sphere_points supports dim 1, 2 or 3, got {dim}")
