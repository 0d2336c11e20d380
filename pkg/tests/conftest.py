import math

import numpy as np
import pytest

from subrad.cli import linear_system, load_problem
from subrad.constants import SolverConfig
from subrad.matrices import Witness

S2 = 1 / math.sqrt(2)


def cone(p):
    name = {"1": "cone_p1", "2": "cone_p2", "inf": "cone_pinf"}[str(p)]
    return load_problem(name).system


@pytest.fixture(scope="session")
def cone_systems():
    return {p: cone(p) for p in ("1", "2", "inf")}


@pytest.fixture(scope="session")
def zero_system():
    return load_problem("zero_map").system


@pytest.fixture
def cfg():
    return SolverConfig(threads=1)


@pytest.fixture
def diag_witness():
    return Witness([S2, S2], [0.0, -S2], [-0.5, -0.5], [0.0, 1.0], norm="2")


def identity_full_space(n=2):
    """g = id with D = K = R^n: no unit multiplier is normal to K."""
    from subrad.polyhedral import ConvexPoly, PolyUnion
    from subrad.system import ConstraintSystem, LocalMap

    U = PolyUnion([ConvexPoly.whole_space(n)], dim=n)
    return ConstraintSystem(U, U, LocalMap(np.zeros(n), np.eye(n)), np.zeros(n), "2")


__all__ = ["cone", "linear_system", "identity_full_space", "S2"]
