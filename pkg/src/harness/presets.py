# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.eos.static import StaticProfile
from src.grid.config import SimParams
from src.grid.fields import FluidState, SlabGrid, make_state
from src.spectral.operators import random_field
from src.spectral.workspace import SpectralWorkspace


# -------------------------------------------------------------------
# Initial data
# -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class InitialData:
    """
    Planar preset data before lifting to the slab.

    ``r0`` has shape ``(Nx, Ny)`` and ``U0h`` shape ``(2, Nx, Ny)``; both
    are x₃-independent and the vertical velocity is zero.
    """

    r0: np.ndarray
    U0h: np.ndarray


def bump_width(grid: SlabGrid) -> float:
    """Width of the Gaussian density bump: a quarter of the half-width."""
    return 0.25 * grid.L


def _vortex(grid: SlabGrid, amplitude: float) -> InitialData:
    k = np.pi / grid.L
    X, Y = grid.mesh_h
    U = amplitude * np.stack([np.sin(k * X) * np.cos(k * Y), -np.cos(k * X) * np.sin(k * Y)])
    return InitialData(np.zeros(grid.shape_h), U)


def _gaussian_r0(grid: SlabGrid, amplitude: float) -> np.ndarray:
    return amplitude * np.exp(-((grid.radius / bump_width(grid)) ** 2))


def preset_data(
    name: str,
    profile: StaticProfile,
    ws: SpectralWorkspace,
    amplitude: float,
) -> InitialData:
    """
    Planar data of a named preset.

    - ``vortex``: Taylor–Green velocity of one box wavelength, r₀ = 0.
    - ``balanced-radial``: Gaussian r₀ with U₀ = ∇^⊥(P'(ρ̃)r₀).
    - ``unbalanced``: the same r₀ at rest, which excites acoustic waves.
    """
    grid = profile.grid
    if name == "vortex":
        return _vortex(grid, amplitude)
    r0 = _gaussian_r0(grid, amplitude)
    if name == "balanced-radial":
        return InitialData(r0, ws.grad_perp_h(profile.Pp_h * r0))
    if name == "unbalanced":
        return InitialData(r0, np.zeros((2,) + grid.shape_h))
    raise ValueError(f"unknown preset '{name}'")


def lift_initial(data: InitialData, profile: StaticProfile, params: SimParams) -> FluidState:
    """ρ₀ = ρ̃ + ε^m r₀, (ρu)₀ = ρ₀(U₀ₕ, 0), both constant in x₃."""
    grid = profile.grid
    rho0 = profile.rho_tilde.values + params.mach * data.r0[:, :, None]
    mom = np.zeros((3,) + grid.shape)
    mom[0] = rho0 * data.U0h[0][:, :, None]
    mom[1] = rho0 * data.U0h[1][:, :, None]
    return make_state(grid, rho0, mom)


# -------------------------------------------------------------------
# Acoustic study data
# -------------------------------------------------------------------

def _windowed_noise(ws: SpectralWorkspace, rng: np.random.Generator, width: float) -> np.ndarray:
    grid = ws.grid
    planar = np.mean(random_field(ws, rng, "even", slope=2.0).values, axis=-1)
    window = np.exp(-0.5 * (grid.radius / width) ** 2)
    data = window * planar
    # zero mean while staying localized
    data = data - window**2 * (np.sum(data) / np.sum(window**2))
    norm = np.sqrt(grid.integrate_h(data**2))
    data = data / norm if norm > 0 else data
    return np.repeat(data[:, :, None], grid.Nz, axis=2)


def acoustic_data(
    ws: SpectralWorkspace,
    rng: np.random.Generator,
    width: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Localized zero-mean random (S₀, Ψ₀), band-limited and x₃-independent.

    Both have unit horizontal L² norm per unit height.
    """
    return _windowed_noise(ws, rng, width), _windowed_noise(ws, rng, width)
