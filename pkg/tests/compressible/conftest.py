# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------

import numpy as np
import pytest

from src.eos.potential import Potential
from src.eos.static import solve_static
from src.grid.fields import make_state
from src.harness.presets import lift_initial, preset_data


# -------------------------------------------------------------------
# Fixtures
# -------------------------------------------------------------------

@pytest.fixture
def rotating_profile(params, grid, ws):
    """Static profile balancing the tapered centrifugal potential."""
    return solve_static(params, Potential.centrifugal(grid), ws)


@pytest.fixture
def rest_state(rotating_profile):
    """
    The static state itself: ρ = ρ̃ and zero momentum.

    Returns
    -------
    FluidState
        Exact equilibrium of the discrete system.
    """
    grid = rotating_profile.grid
    return make_state(grid, rotating_profile.rho_tilde.values.copy(), np.zeros((3,) + grid.shape))


@pytest.fixture
def vortex_state(flat_profile, params, ws):
    """
    Small Taylor–Green vortex on the uniform background.

    Returns
    -------
    FluidState
        ρ ≡ 1 and a divergence-free horizontal velocity of amplitude 0.1.
    """
    data = preset_data("vortex", flat_profile, ws, amplitude=0.1)
    return lift_initial(data, flat_profile, params)
