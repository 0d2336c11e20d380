"""Bounds on radii of metric subregularity for polyhedral constraint systems."""

from .norms import NormSpec
from .polyhedral import Cone, ConvexCone, ConvexPoly, PolyUnion
from .system import ConstraintSystem, LocalMap
from .matrices import Witness
from .constants import ConstantsReport, SolverConfig, compute_constants
from .radii import RadiusReport, radius_report, eckart_young

__all__ = [
    "NormSpec",
    "Cone",
    "ConvexCone",
    "ConvexPoly",
    "PolyUnion",
    "ConstraintSystem",
    "LocalMap",
    "Witness",
    "ConstantsReport",
    "SolverConfig",
    "compute_constants",
    "RadiusReport",
    "radius_report",
    "eckart_young",
]

__version__ = "0.1.0"
