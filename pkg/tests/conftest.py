# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------

import os
import sys

import numpy as np
import pytest


# -------------------------------------------------------------------
# Path shim (so `import src...` works)
# -------------------------------------------------------------------

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.eos.potential import Potential  # noqa: E402
from src.eos.static import solve_static  # noqa: E402
from src.grid.config import SimParams, make_params  # noqa: E402
from src.grid.fields import SlabGrid, make_grid  # noqa: E402
from src.spectral.workspace import SpectralWorkspace  # noqa: E402


# -------------------------------------------------------------------
# Fixtures
# -------------------------------------------------------------------

@pytest.fixture
def base_params() -> dict:
    """
    Keyword arguments of a small, cheap simulation.

    Returns
    -------
    dict
        ε = 0.5, m = 1, γ = 2, μ = 0.1 on a 16 × 16 × 4 grid of half-width π,
        dt = 0.01 and T_end = 0.05.
    """
    return dict(
        epsilon=0.5,
        m=1.0,
        gamma=2.0,
        mu=0.1,
        L=float(np.pi),
        Nx=16,
        Ny=16,
        Nz=4,
        dt=0.01,
        T_end=0.05,
    )


@pytest.fixture
def params(base_params) -> SimParams:
    """Validated ``SimParams`` built from ``base_params``."""
    return make_params(**base_params)


@pytest.fixture
def grid(params) -> SlabGrid:
    """Slab grid of ``params``."""
    return make_grid(params)


@pytest.fixture
def ws(grid) -> SpectralWorkspace:
    """Spectral workspace of ``grid``."""
    return SpectralWorkspace(grid)


@pytest.fixture
def flat_profile(params, grid, ws):
    """
    Static profile with the potential switched off.

    Returns
    -------
    StaticProfile
        ρ̃ ≡ 1 on the grid, P'(ρ̃) ≡ γ.
    """
    return solve_static(params, Potential.zero(grid), ws)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for reproducible random fields."""
    return np.random.default_rng(1234)
