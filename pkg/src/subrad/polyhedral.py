"""Cone calculus for finite unions of convex polyhedra.

Sets are stored in H-representation.  Cones are kept in whichever
representation they were born in (inequalities or generators) and converted
on demand by brute-force extreme-ray enumeration, which is fine in the
small dimensions this package targets.

Directional limiting normal cones are computed exactly from the sign cells
(faces) of the arrangement of hyperplanes that are active at the base point.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog, nnls

from .norms import NormSpec

logger = logging.getLogger(__name__)

TOL = 1e-9
MAX_HYPERPLANES = 12
MAX_DIM = 6


def _as_matrix(M, ncols: int) -> np.ndarray:
    if M is None:
        return np.zeros((0, ncols))
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return np.zeros((0, ncols))
    return np.atleast_2d(M).reshape(-1, ncols)


def _rank(M: np.ndarray, tol: float = 1e-10) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def _unit_rows(M: np.ndarray) -> np.ndarray:
    if M.shape[0] == 0:
        return M
    nrm = np.linalg.norm(M, axis=1)
    keep = nrm > 1e-14
    return M[keep] / nrm[keep][:, None]


def _dedupe_rows(M: np.ndarray, signed: bool = True, tol: float = 1e-9) -> np.ndarray:
    """Drop repeated unit rows; with ``signed=False`` also drop negatives."""
    out: list[np.ndarray] = []
    for r in M:
        dup = False
        for q in out:
            if np.max(np.abs(r - q)) <= tol or (not signed and np.max(np.abs(r + q)) <= tol):
                dup = True
                break
        if not dup:
            out.append(r)
    if not out:
        return np.zeros((0, M.shape[1]))
    return np.array(out)


def _orth(M: np.ndarray, n: int) -> np.ndarray:
    """Orthonormal basis (as columns) of the row space of M."""
    if M.shape[0] == 0:
        return np.zeros((n, 0))
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    r = int(np.sum(s > 1e-10 * max(1.0, s[0] if s.size else 0.0)))
    return Vt[:r].T


# ---------------------------------------------------------------------------
# convex polyhedra and their unions


@dataclass
class ConvexPoly:
    """{x : A x <= b, E x = d}."""

    A: np.ndarray
    b: np.ndarray
    E: np.ndarray | None = None
    d: np.ndarray | None = None
    dim: int | None = None

    def __post_init__(self):
        if self.dim is None:
            for M in (self.A, self.E):
                if M is not None and np.asarray(M).size:
                    self.dim = np.atleast_2d(np.asarray(M)).shape[1]
                    break
        if self.dim is None:
            raise ValueError("cannot infer the dimension of a polyhedron with no rows; pass dim")
        n = self.dim
        self.A = _as_matrix(self.A, n)
        self.b = np.asarray(self.b if self.b is not None else [], dtype=float).ravel()
        self.E = _as_matrix(self.E, n)
        self.d = np.asarray(self.d if self.d is not None else np.zeros(self.E.shape[0]), dtype=float).ravel()
        if self.b.shape[0] != self.A.shape[0]:
            raise ValueError(f"A has {self.A.shape[0]} rows but b has {self.b.shape[0]} entries")
        if self.d.shape[0] != self.E.shape[0]:
            raise ValueError(f"E has {self.E.shape[0]} rows but d has {self.d.shape[0]} entries")
        for name, M in (("A", self.A), ("b", self.b), ("E", self.E), ("d", self.d)):
            if not np.all(np.isfinite(M)):
                raise ValueError(f"non-finite entry in {name}")

    @classmethod
    def whole_space(cls, n: int) -> "ConvexPoly":
        return cls(np.zeros((0, n)), np.zeros(0), dim=n)

    def contains(self, x, tol: float = TOL) -> bool:
        x = np.asarray(x, dtype=float).ravel()
        scale = 1.0 + float(np.max(np.abs(x))) if x.size else 1.0
        if self.A.shape[0]:
            rn = np.linalg.norm(self.A, axis=1)
            if np.any(self.A @ x - self.b > tol * scale * np.maximum(rn, 1.0)):
                return False
        if self.E.shape[0]:
            rn = np.linalg.norm(self.E, axis=1)
            if np.any(np.abs(self.E @ x - self.d) > tol * scale * np.maximum(rn, 1.0)):
                return False
        return True

    def active_rows(self, x, tol: float = TOL) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        if not self.A.shape[0]:
            return np.zeros(0, dtype=int)
        scale = 1.0 + float(np.max(np.abs(x)))
        rn = np.maximum(np.linalg.norm(self.A, axis=1), 1.0)
        return np.nonzero(np.abs(self.A @ x - self.b) <= tol * scale * rn)[0]

    def tangent_cone(self, x) -> "ConvexCone":
        act = self.active_rows(x)
        return ConvexCone(self.dim, ineq=self.A[act], eq=self.E)

    def shifted(self, c) -> "ConvexPoly":
        """The translate {y + c : y in self}."""
        c = np.asarray(c, dtype=float).ravel()
        return ConvexPoly(self.A, self.b + self.A @ c, self.E, self.d + self.E @ c, dim=self.dim)


@dataclass
class PolyUnion:
    pieces: list[ConvexPoly]
    dim: int | None = None
    _arrangements: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.dim is None:
            if not self.pieces:
                raise ValueError("an empty union needs an explicit dim")
            self.dim = self.pieces[0].dim
        for P in self.pieces:
            if P.dim != self.dim:
                raise ValueError("all pieces must live in the same space")

    @property
    def is_empty_union(self) -> bool:
        return not self.pieces

    def contains(self, x, tol: float = TOL) -> bool:
        return any(P.contains(x, tol) for P in self.pieces)

    def pieces_at(self, x, tol: float = TOL) -> list[ConvexPoly]:
        return [P for P in self.pieces if P.contains(x, tol)]

    def arrangement(self, xbar) -> "LocalArrangement":
        xbar = np.asarray(xbar, dtype=float).ravel()
        key = xbar.round(12).tobytes()
        arr = self._arrangements.get(key)
        if arr is None:
            arr = LocalArrangement(self, xbar)
            self._arrangements[key] = arr
        return arr


def contains(U, x, tol: float = TOL) -> bool:
    return U.contains(x, tol)


# ---------------------------------------------------------------------------
# cones


def _h_to_v(M: np.ndarray, E: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Extreme rays and a lineality basis of {x : M x <= 0, E x = 0}."""
    A = np.vstack([M, E]) if (M.shape[0] or E.shape[0]) else np.zeros((0, n))
    lines = (null_space(A, rcond=1e-10).T if A.shape[0] else np.eye(n))
    if lines.shape[0] == n:
        return np.zeros((0, n)), lines
    Eq = np.vstack([E, lines]) if lines.shape[0] else E
    r = _rank(Eq)
    rays: list[np.ndarray] = []
    if r < n:
        k = n - 1 - r
        if k <= M.shape[0]:
            for S in itertools.combinations(range(M.shape[0]), k):
                AS = np.vstack([Eq, M[list(S)]]) if k else Eq
                if AS.shape[0] == 0:
                    continue
                ns = null_space(AS, rcond=1e-10)
                if ns.shape[1] != 1:
                    continue
                x = ns[:, 0]
                for s in (1.0, -1.0):
                    y = s * x
                    if M.shape[0] == 0 or np.all(M @ y <= 1e-9):
                        rays.append(y / np.linalg.norm(y))
    R = _dedupe_rows(np.array(rays)) if rays else np.zeros((0, n))
    return R, lines


class ConvexCone:
    """A closed convex polyhedral cone, either {x : M x <= 0, E x = 0} or
    cone(rays) + span(lines).  Missing representations are computed lazily."""

    def __init__(self, dim: int, ineq=None, eq=None, rays=None, lines=None):
        self.dim = int(dim)
        self._M = self._E = self._R = self._L = None
        if rays is not None or lines is not None:
            self._R = _dedupe_rows(_unit_rows(_as_matrix(rays, dim)))
            self._L = _unit_rows(_as_matrix(lines, dim))
        if ineq is not None or eq is not None or self._R is None:
            self._M = _dedupe_rows(_unit_rows(_as_matrix(ineq, dim)))
            self._E = _unit_rows(_as_matrix(eq, dim))

    # representations -------------------------------------------------------
    def h_rep(self) -> tuple[np.ndarray, np.ndarray]:
        if self._M is None:
            # bipolar: H-rep of C is the V-rep of its polar
            PR, PL = _h_to_v(self._R, self._L, self.dim)
            self._M, self._E = PR, PL
        return self._M, self._E

    def v_rep(self) -> tuple[np.ndarray, np.ndarray]:
        if self._R is None:
            self._R, self._L = _h_to_v(self._M, self._E, self.dim)
        return self._R, self._L

    @property
    def ineq(self) -> np.ndarray:
        return self.h_rep()[0]

    @property
    def eq(self) -> np.ndarray:
        return self.h_rep()[1]

    @property
    def rays(self) -> np.ndarray:
        return self.v_rep()[0]

    @property
    def lines(self) -> np.ndarray:
        return self.v_rep()[1]

    def generators(self) -> np.ndarray:
        """Columns generating the cone with nonnegative weights."""
        R, L = self.v_rep()
        return np.vstack([R, L, -L]).T if (R.shape[0] or L.shape[0]) else np.zeros((self.dim, 0))

    # predicates ------------------------------------------------------------
    def contains(self, x, tol: float = TOL) -> bool:
        x = np.asarray(x, dtype=float).ravel()
        M, E = self.h_rep()
        scale = tol * max(1.0, float(np.max(np.abs(x))) if x.size else 1.0)
        if M.shape[0] and np.any(M @ x > scale):
            return False
        if E.shape[0] and np.any(np.abs(E @ x) > scale):
            return False
        return True

    def contains_many(self, X, tol: float = TOL) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        M, E = self.h_rep()
        scale = tol * np.maximum(1.0, np.abs(X).max(axis=1))
        ok = np.ones(X.shape[0], dtype=bool)
        if M.shape[0]:
            ok &= np.all(X @ M.T <= scale[:, None], axis=1)
        if E.shape[0]:
            ok &= np.all(np.abs(X @ E.T) <= scale[:, None], axis=1)
        return ok

    def is_zero(self) -> bool:
        R, L = self.v_rep()
        return R.shape[0] == 0 and L.shape[0] == 0

    def span_basis(self) -> np.ndarray:
        R, L = self.v_rep()
        return _orth(np.vstack([R, L]), self.dim)

    def subset_of(self, other: "ConvexCone", tol: float = TOL) -> bool:
        R, L = self.v_rep()
        gens = np.vstack([R, L, -L])
        return all(other.contains(g, tol) for g in gens)

    def equals(self, other: "ConvexCone", tol: float = TOL) -> bool:
        return self.subset_of(other, tol) and other.subset_of(self, tol)

    # operations ------------------------------------------------------------
    def polar(self) -> "ConvexCone":
        if self._M is not None:
            return ConvexCone(self.dim, rays=self._M, lines=self._E)
        return ConvexCone(self.dim, ineq=self._R, eq=self._L)

    def intersect(self, other: "ConvexCone") -> "ConvexCone":
        M1, E1 = self.h_rep()
        M2, E2 = other.h_rep()
        return ConvexCone(self.dim, ineq=np.vstack([M1, M2]), eq=np.vstack([E1, E2]))

    def negate(self) -> "ConvexCone":
        if self._R is not None:
            return ConvexCone(self.dim, rays=-self._R, lines=self._L)
        return ConvexCone(self.dim, ineq=-self._M, eq=self._E)

    def faces(self) -> list["ConvexCone"]:
        """All nonempty faces, each returned in generator form."""
        R, L = self.v_rep()
        M, _ = self.h_rep()
        nr = R.shape[0]
        if M.shape[0] == 0 or nr == 0:
            act_sets = []
        else:
            act = np.abs(M @ R.T) <= 1e-9
            act_sets = [frozenset(np.nonzero(row)[0]) for row in act]
        full = frozenset(range(nr))
        seen = {full}
        queue = [full]
        while queue:
            f = queue.pop()
            for a in act_sets:
                g = f & a
                if g not in seen:
                    seen.add(g)
                    queue.append(g)
        out = []
        for f in sorted(seen, key=lambda s: (-len(s), sorted(s))):
            idx = sorted(f)
            out.append(ConvexCone(self.dim, rays=R[idx] if idx else np.zeros((0, self.dim)), lines=L))
        return out

    def __repr__(self) -> str:
        if self._R is not None:
            return f"ConvexCone(dim={self.dim}, rays={self._R.tolist()}, lines={self._L.tolist()})"
        return f"ConvexCone(dim={self.dim}, ineq={self._M.tolist()}, eq={self._E.tolist()})"

    @classmethod
    def zero(cls, n: int) -> "ConvexCone":
        return cls(n, rays=np.zeros((0, n)), lines=np.zeros((0, n)))

    @classmethod
    def whole(cls, n: int) -> "ConvexCone":
        return cls(n, rays=np.zeros((0, n)), lines=np.eye(n))


class Cone:
    """Finite union of convex cones.  No pieces means the empty set."""

    def __init__(self, dim: int, pieces: list[ConvexCone] | None = None):
        self.dim = int(dim)
        self.pieces: list[ConvexCone] = []
        for P in pieces or []:
            if not any(P.equals(Q) for Q in self.pieces):
                self.pieces.append(P)

    @classmethod
    def empty(cls, dim: int) -> "Cone":
        return cls(dim, [])

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    @property
    def is_convex(self) -> bool:
        return len(self.pieces) == 1

    def contains(self, x, tol: float = TOL) -> bool:
        return any(P.contains(x, tol) for P in self.pieces)

    def contains_many(self, X, tol: float = TOL) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        ok = np.zeros(X.shape[0], dtype=bool)
        for P in self.pieces:
            ok |= P.contains_many(X, tol)
        return ok

    def equals(self, other: "Cone", tol: float = TOL) -> bool:
        """Set equality of unions, checked piecewise by double inclusion."""
        def covered(A: "Cone", B: "Cone") -> bool:
            return all(any(P.subset_of(Q, tol) for Q in B.pieces) for P in A.pieces)
        return covered(self, other) and covered(other, self)

    def __repr__(self) -> str:
        if self.is_empty:
            return f"Cone.empty({self.dim})"
        return f"Cone(dim={self.dim}, pieces={self.pieces!r})"


def polar(C) -> ConvexCone:
    if isinstance(C, Cone):
        if C.is_empty:
            return ConvexCone.whole(C.dim)
        if not C.is_convex:
            raise ValueError("polar of a non-convex union is not supported")
        C = C.pieces[0]
    return C.polar()


def tangent_cone(U: PolyUnion, xbar, tol: float = TOL) -> Cone:
    pcs = U.pieces_at(xbar, tol)
    return Cone(U.dim, [P.tangent_cone(xbar) for P in pcs])


def frechet_normal_cone(U: PolyUnion, x, tol: float = TOL) -> Cone:
    pcs = U.pieces_at(x, tol)
    if not pcs:
        return Cone.empty(U.dim)
    N = pcs[0].tangent_cone(x).polar()
    for P in pcs[1:]:
        N = N.intersect(P.tangent_cone(x).polar())
    return Cone(U.dim, [N])


# ---------------------------------------------------------------------------
# sign-cell arrangement at a point


@dataclass
class CellClass:
    """A relatively open face of the local arrangement lying inside the set."""

    signs: tuple[int, ...]
    closure: ConvexCone
    normal: ConvexCone
    point: np.ndarray


def _face_point(H: np.ndarray, signs: tuple[int, ...], n: int) -> np.ndarray | None:
    """A point of the relatively open face with the given signs, or None."""
    strict = [j for j, s in enumerate(signs) if s != 0]
    zero = [j for j, s in enumerate(signs) if s == 0]
    if not strict:
        return np.zeros(n)
    # maximize slack s subject to sign constraints, box on x
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.zeros((len(strict), n + 1))
    for i, j in enumerate(strict):
        A_ub[i, :n] = -signs[j] * H[j]
        A_ub[i, -1] = 1.0
    A_eq = None
    b_eq = None
    if zero:
        A_eq = np.zeros((len(zero), n + 1))
        A_eq[:, :n] = H[zero]
        b_eq = np.zeros(len(zero))
    bounds = [(-1.0, 1.0)] * n + [(0.0, 1.0)]
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(len(strict)), A_eq=A_eq, b_eq=b_eq,
                  bounds=bounds, method="highs")
    if res.status != 0 or -res.fun <= 1e-9:
        return None
    return res.x[:n]


class LocalArrangement:
    """Faces of the arrangement of hyperplanes active at ``xbar``.

    Near ``xbar`` the union coincides with ``xbar + T`` where T is its
    tangent cone, so everything is computed for the homogeneous cone T.
    """

    def __init__(self, U: PolyUnion, xbar: np.ndarray, tol: float = TOL):
        self.dim = n = U.dim
        if n > MAX_DIM:
            raise ValueError(f"sign-cell enumeration supports dimension <= {MAX_DIM}, got {n}")
        self.xbar = xbar
        self.pieces = U.pieces_at(xbar, tol)
        # each piece: list of (hyperplane index, orientation) for inequality and equality rows
        hyper: list[np.ndarray] = []

        def locate(row: np.ndarray) -> tuple[int, float]:
            nr = np.linalg.norm(row)
            h = row / nr
            for j, q in enumerate(hyper):
                if np.max(np.abs(h - q)) <= 1e-9:
                    return j, 1.0
                if np.max(np.abs(h + q)) <= 1e-9:
                    return j, -1.0
            hyper.append(h)
            return len(hyper) - 1, 1.0

        self.piece_rows: list[tuple[list[tuple[int, float]], list[int]]] = []
        for P in self.pieces:
            ineq = []
            for i in P.active_rows(xbar, tol):
                if np.linalg.norm(P.A[i]) > 1e-14:
                    ineq.append(locate(P.A[i]))
            eqs = []
            for e in P.E:
                if np.linalg.norm(e) > 1e-14:
                    eqs.append(locate(e)[0])
            self.piece_rows.append((ineq, eqs))
        if len(hyper) > MAX_HYPERPLANES:
            raise ValueError(
                f"{len(hyper)} hyperplanes at the base point exceed the enumeration cap {MAX_HYPERPLANES}")
        self.H = np.array(hyper) if hyper else np.zeros((0, n))
        self.cells = self._enumerate()

    def _enumerate(self) -> list[CellClass]:
        n = self.dim
        faces: list[tuple[tuple[int, ...], np.ndarray]] = [((), np.zeros(n))]
        for j in range(self.H.shape[0]):
            nxt = []
            Hj = self.H[: j + 1]
            for signs, pt in faces:
                val = float(self.H[j] @ pt)
                for s in (-1, 0, 1):
                    cand = signs + (s,)
                    if s != 0 and abs(val) > 1e-7 and np.sign(val) == s:
                        nxt.append((cand, pt))
                        continue
                    q = _face_point(Hj, cand, n)
                    if q is not None:
                        nxt.append((cand, q))
            faces = nxt
        cells = []
        for signs, pt in faces:
            holders = [k for k in range(len(self.pieces)) if self._piece_holds(k, signs)]
            if not holders:
                continue
            normal = None
            for k in holders:
                ineq, eqs = self.piece_rows[k]
                act = [o * self.H[j] for j, o in ineq if signs[j] == 0]
                Nk = ConvexCone(n, rays=np.array(act) if act else np.zeros((0, n)),
                                lines=self.H[eqs] if eqs else np.zeros((0, n)))
                normal = Nk if normal is None else normal.intersect(Nk)
            closure = self._closure(signs)
            cells.append(CellClass(signs, closure, normal, pt))
        return cells

    def _piece_holds(self, k: int, signs: tuple[int, ...]) -> bool:
        ineq, eqs = self.piece_rows[k]
        if any(o * signs[j] > 0 for j, o in ineq):
            return False
        return all(signs[j] == 0 for j in eqs)

    def _closure(self, signs: tuple[int, ...]) -> ConvexCone:
        n = self.dim
        ineq = [-s * self.H[j] for j, s in enumerate(signs) if s != 0]
        eq = [self.H[j] for j, s in enumerate(signs) if s == 0]
        return ConvexCone(n, ineq=np.array(ineq) if ineq else np.zeros((0, n)),
                          eq=np.array(eq) if eq else np.zeros((0, n)))

    def in_tangent(self, u, tol: float = TOL) -> bool:
        u = np.asarray(u, dtype=float).ravel()
        return any(c.closure.contains(u, tol) for c in self.cells)

    def cells_reaching(self, u, tol: float = TOL) -> list[CellClass]:
        """Cells whose closure contains the direction u."""
        u = np.asarray(u, dtype=float).ravel()
        nu = float(np.max(np.abs(u))) if u.size else 0.0
        if nu == 0.0:
            return list(self.cells)
        u = u / nu
        return [c for c in self.cells if c.closure.contains(u, tol)]

    def tangent(self) -> Cone:
        return Cone(self.dim, [P.tangent_cone(self.xbar) for P in self.pieces])


def dir_limiting_normal_cone(U: PolyUnion, xbar, u, tol: float = TOL) -> Cone:
    """Directional limiting normal cone of U at xbar in direction u."""
    xbar = np.asarray(xbar, dtype=float).ravel()
    if not U.contains(xbar, tol):
        return Cone.empty(U.dim)
    arr = U.arrangement(xbar)
    cells = arr.cells_reaching(u, tol)
    return Cone(U.dim, [c.normal for c in cells])


def limiting_normal_cone(U: PolyUnion, xbar, tol: float = TOL) -> Cone:
    xbar = np.asarray(xbar, dtype=float).ravel()
    if not U.contains(xbar, tol):
        return Cone.empty(U.dim)
    arr = U.arrangement(xbar)
    return Cone(U.dim, [c.normal for c in arr.cells])


# ---------------------------------------------------------------------------
# distances


def _lp_distance(z: np.ndarray, A: np.ndarray, b: np.ndarray, E: np.ndarray, d: np.ndarray,
                 p: NormSpec) -> tuple[float, np.ndarray | None]:
    n = z.size
    if p is NormSpec.ONE:
        nt = n
    else:
        nt = 1
    c = np.concatenate([np.zeros(n), np.ones(nt)])
    # x - z <= t and z - x <= t
    I = np.eye(n)
    T = -np.eye(n) if nt == n else -np.ones((n, 1))
    rows = [np.hstack([I, T]), np.hstack([-I, T])]
    rhs = [z, -z]
    if A.shape[0]:
        rows.append(np.hstack([A, np.zeros((A.shape[0], nt))]))
        rhs.append(b)
    A_ub = np.vstack(rows)
    b_ub = np.concatenate(rhs)
    A_eq = b_eq = None
    if E.shape[0]:
        A_eq = np.hstack([E, np.zeros((E.shape[0], nt))])
        b_eq = d
    bounds = [(None, None)] * n + [(0.0, None)] * nt
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status == 2:
        return math.inf, None
    if res.status != 0:
        raise RuntimeError(f"distance LP failed: {res.message}")
    x = res.x[:n]
    return float(np.max(np.abs(x - z)) if p is NormSpec.INF else np.abs(x - z).sum()), x


def _project_affine(z: np.ndarray, C: np.ndarray, c: np.ndarray) -> np.ndarray | None:
    if C.shape[0] == 0:
        return z.copy()
    delta, *_ = np.linalg.lstsq(C, c - C @ z, rcond=None)
    x = z + delta
    if np.max(np.abs(C @ x - c)) > 1e-8 * (1.0 + np.max(np.abs(c))):
        return None
    return x


def _euclid_poly_projection(z: np.ndarray, P: ConvexPoly) -> tuple[float, np.ndarray | None]:
    # enumerate candidate active sets; the projection is the closest feasible candidate
    n = z.size
    if P.contains(z, 0.0):
        return 0.0, z.copy()
    rE = _rank(P.E)
    best, arg = math.inf, None
    m = P.A.shape[0]
    for k in range(0, min(m, n - rE) + 1):
        for S in itertools.combinations(range(m), k):
            S = list(S)
            C = np.vstack([P.E, P.A[S]])
            c = np.concatenate([P.d, P.b[S]])
            x = _project_affine(z, C, c)
            if x is None or not P.contains(x, 1e-9):
                continue
            dist = float(np.linalg.norm(x - z))
            if dist < best - 1e-15:
                best, arg = dist, x
    return best, arg


def min_norm_point(z, C, p) -> tuple[float, np.ndarray | None]:
    """Distance from z to C in the p-norm and a nearest point.

    C may be a ConvexCone, Cone, ConvexPoly or PolyUnion.  Empty sets give
    ``(inf, None)``.
    """
    p = NormSpec.parse(p)
    z = np.asarray(z, dtype=float).ravel()
    if isinstance(C, (Cone, PolyUnion)):
        pieces = C.pieces
        best, arg = math.inf, None
        for P in pieces:
            dist, x = min_norm_point(z, P, p)
            if dist < best:
                best, arg = dist, x
        return best, arg
    if isinstance(C, ConvexCone):
        if p is NormSpec.TWO:
            Gm = C.generators()
            if Gm.shape[1] == 0:
                return float(np.linalg.norm(z)), np.zeros_like(z)
            lam, _ = nnls(Gm, z)
            x = Gm @ lam
            return float(np.linalg.norm(z - x)), x
        M, E = C.h_rep()
        return _lp_distance(z, M, np.zeros(M.shape[0]), E, np.zeros(E.shape[0]), p)
    if isinstance(C, ConvexPoly):
        if p is NormSpec.TWO:
            return _euclid_poly_projection(z, C)
        return _lp_distance(z, C.A, C.b, C.E, C.d, p)
    raise TypeError(f"unsupported set type {type(C).__name__}")
