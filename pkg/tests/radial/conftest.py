# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------

import numpy as np
import pytest

from src.grid.config import make_params
from src.radial.mesh import RadialMesh, radial_profile
from src.radial.operators import RadialOperators


# -------------------------------------------------------------------
# Fixtures
# -------------------------------------------------------------------

@pytest.fixture
def iso_params(base_params):
    """
    Isotropic-limit parameters: m = 1, γ = 2 and a wide box.

    The wide box keeps the taper out of the manufactured-solution range.
    """
    return make_params(**{**base_params, "L": 10.0})


@pytest.fixture
def make_ops(iso_params):
    """
    Factory of operators on (0, 6] for the untapered profile ρ̃ = 1 + s²/2.

    Returns
    -------
    callable
        ``make_ops(Ns)`` builds ``RadialOperators`` with μ = 0.1.
    """

    def build(Ns: int) -> RadialOperators:
        mesh = RadialMesh(Ns, 6.0)
        return RadialOperators(radial_profile(iso_params, mesh, tapered=False), mu=0.1)

    return build


@pytest.fixture
def ops(make_ops) -> RadialOperators:
    """Operators on a 40-node mesh of the manufactured case."""
    return make_ops(40)


@pytest.fixture
def gaussian_r(ops) -> np.ndarray:
    """r = e^{-s²} at the nodes of ``ops``."""
    return np.exp(-ops.mesh.nodes**2)
