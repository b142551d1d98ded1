# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

from typing import Dict, Optional, Tuple

import numpy as np

from src.eos.static import StaticProfile
from src.grid.config import SimParams
from src.grid.fields import FluidState
from src.spectral.workspace import SpectralWorkspace, perp


# -------------------------------------------------------------------
# Helpers
# -------------------------------------------------------------------

def l2_on_region(values: np.ndarray, grid, mask: np.ndarray) -> float:
    """L² norm over the masked horizontal region; ``values`` may be stacked."""
    sq = np.sum(values**2, axis=0) if values.ndim == 3 else values**2
    return float(np.sqrt(grid.integrate_h(sq, mask)))


def averaged_velocity_h(state: FluidState) -> np.ndarray:
    """⟨u_h⟩ of shape ``(2, Nx, Ny)``."""
    u = state.velocity()
    return np.mean(u[:2], axis=-1)


def averaged_r(state: FluidState, profile: StaticProfile, params: SimParams) -> np.ndarray:
    """⟨r_ε⟩ = ⟨(ρ - ρ̃)/ε^m⟩ on the horizontal grid."""
    return np.mean(state.r_eps(profile.rho_tilde, params), axis=-1)


# -------------------------------------------------------------------
# Geostrophic balance
# -------------------------------------------------------------------

def diagnostics_geostrophic(
    state: FluidState,
    profile: StaticProfile,
    params: SimParams,
    ws: Optional[SpectralWorkspace] = None,
    fraction: float = 0.8,
) -> Tuple[float, float]:
    """
    Balance residuals on K = {|x_h| <= fraction·L}.

    Returns
    -------
    tuple of float
        ``(‖∇_h R_ε + ⟨u_h⟩^⊥‖_{L²(K)}, ‖div_h(ρ̃⟨u_h⟩)‖_{L²(K)})`` with
        R_ε = P'(ρ̃)⟨r_ε⟩ and r_ε = (ρ - ρ̃)/ε^m. Meaningful for m = 1.
    """
    grid = state.grid
    ws = ws or SpectralWorkspace(grid)
    mask = grid.analysis_mask(fraction)
    return geostrophic_residuals(averaged_r(state, profile, params), averaged_velocity_h(state), profile, ws, mask)


def geostrophic_residuals(
    r: np.ndarray,
    U: np.ndarray,
    profile: StaticProfile,
    ws: SpectralWorkspace,
    mask: np.ndarray,
) -> Tuple[float, float]:
    """Balance residuals of given planar fields ⟨r⟩ and ⟨u_h⟩, e.g. time means."""
    geo = ws.grad_h(profile.Pp_h * r) + perp(U)
    div = ws.div_h(profile.rho_h[None] * U)
    return l2_on_region(geo, ws.grid, mask), l2_on_region(div, ws.grid, mask)


# -------------------------------------------------------------------
# Uniform-bound monitors
# -------------------------------------------------------------------

def uniform_bounds_report(
    state: FluidState,
    profile: StaticProfile,
    params: SimParams,
    radius: Optional[float] = None,
) -> Dict[str, float]:
    """
    Essential/residual split of the density on the ball B_r.

    The essential set is where 1/2 < ρ < 2; the residual set is its
    complement. Reported quantities are runtime monitors only.
    """
    grid = state.grid
    radius = 0.8 * grid.L if radius is None else radius
    ball = (grid.radius <= radius)[:, :, None]
    rho = state.rho.values
    essential = (rho > 0.5) & (rho < 2.0)
    r = state.r_eps(profile.rho_tilde, params)

    ess_r = np.where(essential & ball, r, 0.0)
    res_pow = np.where(~essential & ball, rho**params.gamma, 0.0)
    mom = state.mom.stack()
    return {
        "r_essential_l2": float(np.sqrt(grid.integrate(ess_r**2))),
        "rho_residual_gamma": grid.integrate(res_pow),
        "residual_measure": grid.integrate((~essential & ball).astype(float)),
        "sqrt_rho_u_l2": float(np.sqrt(grid.integrate(np.sum(mom**2, axis=0) / rho))),
    }


def vorticity_balance(
    state: FluidState,
    profile: StaticProfile,
    params: SimParams,
    ws: Optional[SpectralWorkspace] = None,
) -> np.ndarray:
    """q_ε = curl_h⟨ρu_h⟩ - ⟨r_ε⟩ on the horizontal grid."""
    ws = ws or SpectralWorkspace(state.grid)
    mom_h = np.mean(state.mom.stack()[:2], axis=-1)
    return ws.curl_h(mom_h) - averaged_r(state, profile, params)


def check_initial_data(
    r0: np.ndarray,
    u0: np.ndarray,
    profile: StaticProfile,
    params: SimParams,
) -> Dict[str, float]:
    """
    Norms entering the hypotheses on ill-prepared initial data.

    Parameters
    ----------
    r0 : numpy.ndarray
        Density fluctuation, shape ``(Nx, Ny, Nz)``.
    u0 : numpy.ndarray
        Velocity, shape ``(3, Nx, Ny, Nz)``.
    """
    grid = profile.grid
    rt = profile.rho_tilde.values
    return {
        "weighted_r0_l2": float(np.sqrt(grid.integrate(rt ** (params.gamma - 2.0) * r0**2))),
        "r0_sup": float(np.max(np.abs(r0))),
        "sqrt_rho_u0_l2": float(np.sqrt(grid.integrate(rt * np.sum(u0**2, axis=0)))),
        "mass_defect": grid.integrate(r0) * params.mach,
    }
