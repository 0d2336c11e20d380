"""Radius bounds assembled from the regularity constants, plus the
Eckart-Young distance to singularity as a linear baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import ConstantsReport, SolverConfig, compute_constants, _num
from .norms import NormSpec
from .system import ConstraintSystem


@dataclass
class RadiusReport:
    norm: NormSpec
    rad_lip_lower: float
    rad_lip_upper: float
    rad_ss: float
    rad_ss_interval: tuple[float, float]
    rad_c1: float
    euclidean: dict | None
    provenance: dict = field(default_factory=dict)
    constants: ConstantsReport | None = None

    @property
    def rad_ss_upper(self) -> float:
        return self.rad_ss_interval[1]

    def violations(self, tol: float = 1e-6) -> list[str]:
        bad = []
        lo, up, ss_up = self.rad_lip_lower, self.rad_lip_upper, self.rad_ss_upper
        if math.isfinite(up) and lo > up + tol:
            bad.append(f"rad_lip_lower {lo} > rad_lip_upper {up}")
        if math.isfinite(ss_up) and up > ss_up + tol:
            bad.append(f"rad_lip_upper {up} > rad_ss upper {ss_up}")
        if math.isfinite(up) and lo > 0 and up / lo > 2 + tol:
            bad.append(f"Lipschitz bounds differ by more than a factor 2 ({up / lo})")
        return bad

    def to_dict(self) -> dict:
        return {
            "norm_p": str(self.norm),
            "rad_lip": {"lower": _num(self.rad_lip_lower), "upper": _num(self.rad_lip_upper),
                        "note": "interval: the exact Lipschitz radius lies between these bounds"},
            "rad_ss": _num(self.rad_ss),
            "rad_c1": _num(self.rad_c1),
            "rad_ss_interval": [_num(self.rad_ss_interval[0]), _num(self.rad_ss_interval[1])],
            "euclidean": ({k: _num(v) for k, v in self.euclidean.items()} if self.euclidean else None),
            "provenance": self.provenance,
        }


def radius_report(sys: ConstraintSystem, cfg: SolverConfig | None = None,
                  constants: ConstantsReport | None = None) -> RadiusReport:
    c = constants or compute_constants(sys, cfg)
    lo = c.rg
    if c.rg_over <= c.rg_circ_upper:
        up, up_src = c.rg_over, "rg_over"
    else:
        up, up_src = c.rg_circ_upper, "rg_circ_upper"
    interval = (c.rg_circ_lower, c.rg_circ_upper)
    if math.isinf(interval[1]):
        mid = math.inf if math.isinf(interval[0]) else interval[0]
    else:
        mid = 0.5 * (interval[0] + interval[1])
    eu = None
    if sys.norm is NormSpec.TWO and c.rg_dagger is not None:
        eu = {"rg_dagger": c.rg_dagger, "rad_ss_lower": c.rg_circ_lower,
              "rad_ss_upper_via_dagger": c.rg_dagger,
              "rad_ss_lower_via_dagger": c.rg_dagger / math.sqrt(2)}
    prov = {
        "rad_lip_lower": "rg",
        "rad_lip_upper": up_src,
        "rad_ss": "rg_circ interval midpoint",
        "rad_c1": "rg_circ interval midpoint",
    }
    return RadiusReport(sys.norm, lo, up, mid, interval, mid, eu, prov, c)


def eckart_young(A, tol: float = 1e-12) -> tuple[float, np.ndarray]:
    """Distance (spectral norm) from A to the singular matrices and a
    rank-one perturbation B with A + B singular and ||B|| equal to it."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] != A.shape[1]:
        raise ValueError("Eckart-Young radius needs a square matrix")
    U, s, Vt = np.linalg.svd(A)
    smin = float(s[-1])
    if smin <= tol * max(1.0, float(s[0])):
        return 0.0, np.zeros_like(A)
    B = -smin * np.outer(U[:, -1], Vt[-1])
    return smin, B
