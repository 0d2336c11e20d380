"""Command-line front end: problem loading, dispatch and report output."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .constants import SolverConfig, brute_force_oracle, compute_constants, _num
from .matrices import Witness, frobenius_identity, frobenius_min_matrix, search_min_matrix
from .norms import NormSpec, vec_norm
from .perturbations import (
    PerturbationSpec,
    StaircaseSpec,
    ZigzagSpec,
    lip_estimate,
    linear_perturbation,
    piecewise_random,
    quadratic,
    staircase_f,
    zigzag_eval,
)
from .polyhedral import ConvexPoly, PolyUnion
from .radii import eckart_young, radius_report
from .system import ConstraintSystem, InfeasibleBasePoint, LocalMap, subreg_ratio

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2, 3

FIXTURES = ("cone_p1", "cone_p2", "cone_pinf", "zero_map", "linear_A", "staircase")

_matrix = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
_vector = {"type": "array", "items": {"type": "number"}}
_union = {
    "type": "object",
    "required": ["pieces"],
    "properties": {
        "pieces": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["A", "b"],
                "properties": {"A": _matrix, "b": _vector, "E": _matrix, "d": _vector},
                "additionalProperties": False,
            },
        }
    },
}
_norm = {"oneOf": [{"enum": ["1", "2", "inf"]}, {"enum": [1, 2]}]}

SYSTEM_SCHEMA = {
    "type": "object",
    "required": ["n", "m", "xbar", "norm_p", "D", "K", "g"],
    "properties": {
        "name": {"type": "string"},
        "n": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 1},
        "xbar": _vector,
        "norm_p": _norm,
        "D": _union,
        "K": _union,
        "g": {
            "type": "object",
            "required": ["value", "jacobian"],
            "properties": {"value": _vector, "jacobian": _matrix, "affine": {"type": "boolean"}},
        },
        "perturbation": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["linear", "quadratic", "piecewise_random"]},
                "B": _matrix,
                "coef": {"type": "number"},
                "lip": {"type": "number", "minimum": 0},
                "seed": {"type": "integer"},
            },
        },
        "solver": {"type": "object"},
        "radii": _vector,
    },
}

STAIRCASE_SCHEMA = {
    "type": "object",
    "required": ["staircase"],
    "properties": {
        "name": {"type": "string"},
        "norm_p": _norm,
        "staircase": {
            "type": "object",
            "properties": {
                "scale": {"type": "number", "exclusiveMinimum": 0},
                "ratio": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "index": {"type": "integer", "minimum": 2},
            },
        },
        "radii": _vector,
    },
}


class InputError(ValueError):
    pass


@dataclass
class Problem:
    name: str
    system: ConstraintSystem
    perturbation: PerturbationSpec | None
    solver: dict
    radii: list[float]
    raw: dict


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("subrad") / "fixtures" / f"{name}.json"))


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    stem = p.stem if p.suffix == ".json" else p.name
    if stem in FIXTURES:
        return fixture_path(stem)
    raise InputError(f"{path}: no such file or bundled fixture")


def _field(err: jsonschema.ValidationError) -> str:
    return "/" + "/".join(str(x) for x in err.absolute_path)


def _validate(data, schema) -> None:
    v = jsonschema.Draft202012Validator(schema)
    errors = sorted(v.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        e = errors[0]
        raise InputError(f"{_field(e)}: {e.message}")


def _union_from(data: dict, dim: int, where: str) -> PolyUnion:
    pieces = []
    for i, pc in enumerate(data["pieces"]):
        A = np.asarray(pc["A"], dtype=float).reshape(-1, dim) if pc["A"] else np.zeros((0, dim))
        b = np.asarray(pc["b"], dtype=float).ravel()
        E = np.asarray(pc.get("E") or np.zeros((0, dim)), dtype=float).reshape(-1, dim)
        d = np.asarray(pc.get("d") or [], dtype=float).ravel()
        if A.shape[0] != b.size:
            raise InputError(f"/{where}/pieces/{i}/b: expected {A.shape[0]} entries, got {b.size}")
        if E.shape[0] != d.size:
            raise InputError(f"/{where}/pieces/{i}/d: expected {E.shape[0]} entries, got {d.size}")
        pieces.append(ConvexPoly(A, b, E, d, dim=dim))
    return PolyUnion(pieces, dim=dim)


def _check_rows(M, cols: int, where: str) -> None:
    for i, row in enumerate(M):
        if len(row) != cols:
            raise InputError(f"{where}/{i}: expected {cols} columns, got {len(row)}")


def staircase_system(spec: StaircaseSpec, index: int, norm="2") -> ConstraintSystem:
    """The one-dimensional system f(x) - f(a_k) = 0, x in R, at xbar = a_k.

    The jacobian entry is the right derivative of f at a_k.
    """
    f = staircase_f(spec)
    xb = spec.a[index]
    g = LocalMap([0.0], [[f.phi(xb)]], affine=False, fn=lambda x: np.array([f.offset(x, index)]))
    D = PolyUnion([ConvexPoly(np.zeros((0, 1)), [], dim=1)], dim=1)
    K = PolyUnion([ConvexPoly(np.zeros((0, 1)), [], [[1.0]], [0.0], dim=1)], dim=1)
    return ConstraintSystem(D, K, g, [xb], norm)


def build_problem(data: dict, name: str = "problem") -> Problem:
    if "staircase" in data:
        _validate(data, STAIRCASE_SCHEMA)
        st = data["staircase"]
        spec = StaircaseSpec(st.get("scale", 1.0), st.get("ratio", 0.5))
        k = int(st.get("index", 3))
        sys_ = staircase_system(spec, k, str(data.get("norm_p", "2")))
        return Problem(data.get("name", name), sys_, None, {}, list(data.get("radii", [])), data)
    _validate(data, SYSTEM_SCHEMA)
    n, m = data["n"], data["m"]
    if len(data["xbar"]) != n:
        raise InputError(f"/xbar: expected {n} entries, got {len(data['xbar'])}")
    for key, dim in (("D", n), ("K", m)):
        for i, pc in enumerate(data[key]["pieces"]):
            _check_rows(pc["A"], dim, f"/{key}/pieces/{i}/A")
            _check_rows(pc.get("E") or [], dim, f"/{key}/pieces/{i}/E")
    g = data["g"]
    if len(g["value"]) != m:
        raise InputError(f"/g/value: expected {m} entries, got {len(g['value'])}")
    if len(g["jacobian"]) != m:
        raise InputError(f"/g/jacobian: expected {m} rows, got {len(g['jacobian'])}")
    _check_rows(g["jacobian"], n, "/g/jacobian")
    D = _union_from(data["D"], n, "D")
    K = _union_from(data["K"], m, "K")
    lm = LocalMap(g["value"], g["jacobian"], affine=g.get("affine", True))
    try:
        sys_ = ConstraintSystem(D, K, lm, data["xbar"], str(data["norm_p"]))
    except InfeasibleBasePoint:
        raise
    except ValueError as exc:
        raise InputError(f"/: {exc}") from exc
    pert = None
    if "perturbation" in data:
        pd = data["perturbation"]
        kind = pd["kind"]
        if kind == "linear":
            if "B" not in pd:
                raise InputError("/perturbation/B: required for a linear perturbation")
            _check_rows(pd["B"], n, "/perturbation/B")
            pert = linear_perturbation(pd["B"], sys_.xbar, sys_.norm)
        elif kind == "quadratic":
            if n != 1 or m != 1:
                raise InputError("/perturbation/kind: quadratic needs n = m = 1")
            pert = quadratic(pd.get("coef", 1.0), float(sys_.xbar[0]))
        else:
            pert = piecewise_random(n, m, pd.get("lip", 1.0), pd.get("seed", 0), sys_.norm, xbar=sys_.xbar)
    return Problem(data.get("name", name), sys_, pert, dict(data.get("solver", {})),
                   list(data.get("radii", [])), data)


def load_problem(path: str) -> Problem:
    p = _resolve(path)
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{p}: invalid JSON ({exc})") from exc
    return build_problem(data, p.stem)


# ---------------------------------------------------------------------------
# output


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        return _num(float(x))
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, NormSpec):
        return str(x)
    return x


def _flatten(d, prefix=""):
    rows = []
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            rows.extend(_flatten(v, key + "."))
        elif isinstance(v, list):
            rows.append((key, json.dumps(v)))
        else:
            rows.append((key, v))
    return rows


def render(report: dict, fmt: str) -> str:
    report = _jsonable(report)
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if "table" in report and isinstance(report["table"], list) and report["table"]:
        cols = list(report["table"][0].keys())
        w.writerow(cols)
        for row in report["table"]:
            w.writerow([row.get(c) for c in cols])
    else:
        w.writerow(["key", "value"])
        for k, v in _flatten(report):
            w.writerow([k, v])
    return buf.getvalue()


def emit(report: dict, args) -> None:
    text = render(report, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# verification suites


def random_witness(rng: np.random.Generator, n: int, m: int, p="2") -> Witness:
    """Compatible witness with unit u and v*."""
    p = NormSpec.parse(p)
    u = rng.normal(size=n)
    u /= vec_norm(u, p)
    vs = rng.normal(size=m)
    vs /= vec_norm(vs, p.dual)
    us = rng.normal(size=n)
    v = rng.normal(size=m)
    alpha = float(us @ u)
    v += (alpha - float(vs @ v)) * vs / float(vs @ vs)
    return Witness(u, v, us, vs, norm=p)


def verify_frobenius(trials: int = 1000, seed: int = 7, starts: int = 2) -> dict:
    rng = np.random.default_rng(seed)
    worst = {"identity": 0.0, "residual": 0.0, "beaten_by": 0.0}
    for t in range(trials):
        n, m = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        w = random_witness(rng, n, m)
        B, fro = frobenius_min_matrix(w)
        ident = abs(fro ** 2 - frobenius_identity(w))
        res = max(w.residuals(B))
        _, found = search_min_matrix(w, "frobenius", starts=starts, seed=seed + t)
        beat = fro - found
        worst["identity"] = max(worst["identity"], ident)
        worst["residual"] = max(worst["residual"], res)
        worst["beaten_by"] = max(worst["beaten_by"], beat)
        if ident > 1e-10 or res > 1e-10 or beat > 1e-8:
            return {"suite": "frobenius", "passed": False, "trials": t + 1, "worst": worst,
                    "counterexample": {**w.to_dict(), "B_closed": B.tolist(), "search_value": found}}
    return {"suite": "frobenius", "passed": True, "trials": trials, "worst": worst}


def linear_system(A, norm="2") -> ConstraintSystem:
    """x in R^n, A x in {0}: the linear equation with nonsingularity as subregularity."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape
    D = PolyUnion([ConvexPoly(np.zeros((0, n)), [], dim=n)], dim=n)
    K = PolyUnion([ConvexPoly(np.zeros((0, m)), [], np.eye(m), np.zeros(m), dim=m)], dim=m)
    return ConstraintSystem(D, K, LocalMap(np.zeros(m), A), np.zeros(n), norm)


def verify_eckart_young(trials: int = 100, seed: int = 0, dim: int = 5, system_checks: int | None = None) -> dict:
    rng = np.random.default_rng(seed)
    worst = {"det_residual": 0.0, "norm_error": 0.0, "radius_error": 0.0}
    checks = trials if system_checks is None else system_checks
    for t in range(trials):
        A = rng.normal(size=(dim, dim))
        smin, B = eckart_young(A)
        inv_norm = np.linalg.norm(np.linalg.inv(A), 2)
        det_res = abs(np.linalg.det(A + B)) / abs(np.linalg.det(A))
        norm_err = abs(np.linalg.norm(B, 2) - 1.0 / inv_norm)
        rad_err = 0.0
        if t < checks:
            rep = radius_report(linear_system(A))
            rad_err = max(abs(rep.rad_lip_lower - smin), abs(rep.rad_lip_upper - smin))
        worst["det_residual"] = max(worst["det_residual"], det_res)
        worst["norm_error"] = max(worst["norm_error"], norm_err)
        worst["radius_error"] = max(worst["radius_error"], rad_err)
        if det_res > 1e-8 or norm_err > 1e-10 or rad_err > 5e-3:
            return {"suite": "eckart-young", "passed": False, "trials": t + 1, "worst": worst,
                    "counterexample": {"A": A.tolist(), "B": B.tolist()}}
    return {"suite": "eckart-young", "passed": True, "trials": trials, "worst": worst}


def verify_zigzag(kmax: int = 30, n_samples: int = 1000, seed: int = 0) -> dict:
    spec = ZigzagSpec(1.0, 0.5)
    bad = []
    for k in range(1, kmax + 1):
        tk = spec.tau_k(k)
        chi = zigzag_eval(spec, tk)
        if not (tk > chi > tk * (1 - 1 / (k + 1))):
            bad.append({"k": k, "tau": tk, "chi": chi})
    est = lip_estimate(lambda x: [zigzag_eval(spec, x[0])], [0.0], spec.tau_k(1), n_samples, seed)
    ok = not bad and 0.9 < est <= 1.0 and spec.check_order()
    out = {"suite": "zigzag", "passed": ok, "kmax": kmax, "lip_estimate": est}
    if bad:
        out["counterexample"] = bad[0]
    return out


def random_polyhedral_system(rng: np.random.Generator, n: int = 2, m: int = 2) -> ConstraintSystem:
    """Unions of random polyhedral cones through the origin, random jacobian and norm."""

    def union(dim):
        pieces = []
        for _ in range(int(rng.integers(1, 3))):
            kind = rng.integers(0, 4)
            if kind == 0:
                pieces.append(ConvexPoly(np.zeros((0, dim)), [], dim=dim))
            elif kind == 1:
                E = rng.integers(-2, 3, size=(1, dim)).astype(float)
                if not E.any():
                    E[0, 0] = 1.0
                pieces.append(ConvexPoly(np.zeros((0, dim)), [], E, [0.0], dim=dim))
            else:
                A = rng.integers(-2, 3, size=(int(kind), dim)).astype(float)
                A = A[np.any(A != 0, axis=1)]
                pieces.append(ConvexPoly(A, np.zeros(A.shape[0]), dim=dim))
        return PolyUnion(pieces, dim=dim)

    G = np.round(rng.normal(size=(m, n)), 2)
    p = ["1", "2", "inf"][int(rng.integers(0, 3))]
    return ConstraintSystem(union(n), union(m), LocalMap(np.zeros(m), G), np.zeros(n), p)


def chain_check(sys_: ConstraintSystem, cfg: SolverConfig | None = None) -> list[str]:
    rep = radius_report(sys_, cfg)
    return rep.constants.chain_violations() + rep.violations()


def verify_chain(random_systems: int = 50, seed: int = 0, cfg: SolverConfig | None = None) -> dict:
    cases = []
    for name in FIXTURES:
        prob = load_problem(name)
        if prob.system.g.fn is None:
            cases.append((name, prob.system))
    rng = np.random.default_rng(seed)
    for i in range(random_systems):
        cases.append((f"random_{i}", random_polyhedral_system(rng)))
    for name, s in cases:
        bad = chain_check(s, cfg)
        if bad:
            return {"suite": "chain", "passed": False, "cases": len(cases),
                    "counterexample": {"case": name, "violations": bad}}
    return {"suite": "chain", "passed": True, "cases": len(cases)}


def oracle_comparison(sys_: ConstraintSystem, cfg: SolverConfig | None = None,
                      resolution: int | None = None) -> dict:
    rep = compute_constants(sys_, cfg)
    orc = brute_force_oracle(sys_, cfg, resolution)
    rows = {}
    for key in ("rg", "rg_over", "rg_diamond", "rg_dagger"):
        a, b = getattr(rep, key), getattr(orc, key)
        if a is None or b is None:
            continue
        diff = 0.0 if (math.isinf(a) and math.isinf(b)) else abs(a - b)
        rows[key] = {"solver": a, "oracle": b, "diff": diff}
    bound = 2 * orc.grid_error
    return {"rows": rows, "grid_error": orc.grid_error, "bound": bound,
            "passed": all(r["diff"] <= bound for r in rows.values())}


def staircase_table(spec: StaircaseSpec, index: int, radii, n_samples: int = 2000, seed: int = 0) -> list[dict]:
    s = staircase_system(spec, index)
    return [{"radius": r, "ratio": subreg_ratio(s, None, r, n_samples, seed)} for r in radii]


def quadratic_table(radii, coef: float = 1.0, n_samples: int = 2000, seed: int = 0) -> list[dict]:
    s = linear_system([[0.0]])
    h = quadratic(coef)
    return [{"radius": r, "ratio": subreg_ratio(s, h, r, n_samples, seed)} for r in radii]


def diverges(table: list[dict], factor: float = 5.0) -> bool:
    vals = [row["ratio"] for row in table]
    return all(b >= factor * a > 0 for a, b in zip(vals, vals[1:]))


# ---------------------------------------------------------------------------
# commands


def _cfg(args, prob: Problem | None = None) -> SolverConfig:
    d = dict(prob.solver) if prob else {}
    if getattr(args, "resolution", None) is not None:
        d["resolution"] = args.resolution
    if getattr(args, "seed", None) is not None:
        d["seed"] = args.seed
    d["threads"] = _threads(args)
    return SolverConfig.from_dict(d)


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return int(args.threads)
    env = os.environ.get("SUBRAD_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _system(args) -> tuple[Problem, ConstraintSystem]:
    prob = load_problem(args.path)
    s = prob.system
    if args.p is not None:
        s = s.with_norm(args.p)
    return prob, s


def cmd_constants(args) -> int:
    prob, s = _system(args)
    if s.g.fn is not None:
        raise InputError("/g: constants need affine data")
    rep = compute_constants(s, _cfg(args, prob))
    emit({"problem": prob.name, **rep.to_dict()}, args)
    return EXIT_OK


def cmd_radii(args) -> int:
    prob, s = _system(args)
    if s.g.fn is not None:
        raise InputError("/g: radii need affine data")
    rep = radius_report(s, _cfg(args, prob))
    emit({"problem": prob.name, **rep.to_dict()}, args)
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else 0
    if args.suite == "frobenius":
        out = verify_frobenius(args.trials or 1000, seed)
    elif args.suite == "eckart-young":
        out = verify_eckart_young(args.trials or 100, seed)
    elif args.suite == "zigzag":
        out = verify_zigzag()
    else:
        out = verify_chain(args.trials if args.trials is not None else 50, seed, _cfg(args))
    emit(out, args)
    return EXIT_OK if out["passed"] else EXIT_FAIL


_CONE_EXPECTED = {"1": 0.5, "2": 2 ** -0.5, "inf": 1.0}


def cmd_example(args) -> int:
    if args.name == "cone":
        p = str(NormSpec.parse(args.p or "2"))
        prob = load_problem(f"cone_{'p' + p if p != 'inf' else 'pinf'}")
        rep = radius_report(prob.system, _cfg(args, prob))
        c = rep.constants
        exp = _CONE_EXPECTED[p]
        tol = 1e-3 if p == "2" else 1e-6
        rows = [
            {"quantity": "rg", "expected": exp, "computed": c.rg},
            {"quantity": "rg_diamond", "expected": exp, "computed": c.rg_diamond},
            {"quantity": "rg_circ_lower", "expected": exp, "computed": c.rg_circ_lower},
            {"quantity": "rg_circ_upper", "expected": exp, "computed": c.rg_circ_upper},
            {"quantity": "rad_ss", "expected": exp, "computed": rep.rad_ss},
            {"quantity": "rad_c1", "expected": exp, "computed": rep.rad_c1},
        ]
        if c.rg_dagger is not None:
            rows.append({"quantity": "rg_dagger", "expected": exp, "computed": c.rg_dagger})
    elif args.name == "zero":
        prob = load_problem("zero_map")
        rep = radius_report(prob.system, _cfg(args, prob))
        c = rep.constants
        tol = 1e-12
        rows = [{"quantity": q, "expected": 0.0, "computed": v} for q, v in (
            ("rg", c.rg), ("rg_over", c.rg_over), ("rg_circ_upper", c.rg_circ_upper),
            ("rad_lip_upper", rep.rad_lip_upper), ("rad_ss", rep.rad_ss))]
    else:
        spec = StaircaseSpec()
        f = staircase_f(spec)
        table = []
        # f is only defined on (-a_1, a_1), so the top breakpoint is skipped
        for k in range(2, 6):
            radii = [r for r in (1e-2, 1e-3, 1e-4, 1e-5) if r < spec.b[k - 1] - spec.a[k]]
            t = staircase_table(spec, k, radii)
            table.append({"index": k, "a_k": spec.a[k], "f(a_k)": f(spec.a[k]),
                          "ratios": [row["ratio"] for row in t], "diverges": diverges(t)})
        out = {"example": "staircase", "table": table}
        emit(out, args)
        return EXIT_OK if all(r["diverges"] for r in table) else EXIT_FAIL
    for row in rows:
        row["ok"] = abs(row["computed"] - row["expected"]) <= tol
    emit({"example": args.name, "norm_p": str(prob.system.norm), "tolerance": tol, "table": rows}, args)
    return EXIT_OK if all(r["ok"] for r in rows) else EXIT_FAIL


def cmd_perturb_check(args) -> int:
    prob = load_problem(args.path)
    s = prob.system
    radii = prob.radii or [1e-1, 1e-2, 1e-3, 1e-4]
    seed = args.seed if args.seed is not None else 0
    out = {"problem": prob.name}
    if prob.perturbation is not None:
        h = prob.perturbation
        rmax = max(radii)
        est = lip_estimate(h, s.xbar, rmax, 1000, seed, s.norm)
        out["perturbation"] = h.to_dict()
        out["lip_estimate"] = est
        out["modulus_bound"] = h.modulus_bound(rmax)
        out["modulus_ok"] = est <= h.modulus_bound(rmax) * (1 + 1e-9) + 1e-12
    else:
        out["modulus_ok"] = True
    table = [{"radius": r, "ratio": subreg_ratio(s, prob.perturbation, r, 2000, seed)} for r in radii]
    out["table"] = table
    out["diverges"] = diverges(table)
    emit(out, args)
    return EXIT_OK if out["modulus_ok"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="subrad", description="Regularity constants and radii of subregularity")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--p", choices=["1", "2", "inf"], help="override the norm")
    common.add_argument("--resolution", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int, help="worker threads (default: SUBRAD_THREADS or all cores)")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in (("constants", cmd_constants), ("radii", cmd_radii)):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("path", help="problem JSON file or bundled fixture name")
        sp.set_defaults(func=fn)
    sp = sub.add_parser("verify", parents=[common])
    sp.add_argument("suite", choices=["frobenius", "eckart-young", "zigzag", "chain"])
    sp.add_argument("--trials", type=int)
    sp.set_defaults(func=cmd_verify)
    sp = sub.add_parser("example", parents=[common])
    sp.add_argument("name", choices=["cone", "zero", "staircase"])
    sp.set_defaults(func=cmd_example)
    sp = sub.add_parser("perturb-check", parents=[common])
    sp.add_argument("path")
    sp.set_defaults(func=cmd_perturb_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleBasePoint as exc:
        print(f"infeasible base point: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
