# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np
import pandas as pd

from src.grid.errors import ConfigError, SolverError
from src.grid.fields import VectorField
from src.spectral.workspace import SpectralWorkspace


# -------------------------------------------------------------------
# Logger setup
# -------------------------------------------------------------------

logger = logging.getLogger("limit-2dns")

DIAGNOSTIC_COLUMNS = ["time", "energy", "enstrophy"]


# -------------------------------------------------------------------
# Planar state
# -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PlanarState:
    """
    Vorticity of the 2D incompressible limit flow.

    Parameters
    ----------
    omega : numpy.ndarray
        Vorticity on the horizontal grid, shape ``(Nx, Ny)``.
    ws : SpectralWorkspace
        Transform tables of the slab grid the flow lives on.
    time : float, default=0.0
        Simulation time.
    """

    omega: np.ndarray
    ws: SpectralWorkspace
    time: float = 0.0

    @property
    def psi(self) -> np.ndarray:
        """Zero-mean streamfunction, Δ_h ψ = ω."""
        return self.ws.inverse_laplacian_h(self.omega)

    @property
    def velocity(self) -> np.ndarray:
        """U_h = ∇^⊥ψ = (-∂2ψ, ∂1ψ), shape ``(2, Nx, Ny)``."""
        return velocity_from_vorticity(self.omega, self.ws)

    def energy(self) -> float:
        """½∫|U_h|² dx."""
        return 0.5 * self.ws.grid.integrate_h(np.sum(self.velocity**2, axis=0))

    def enstrophy(self) -> float:
        """½∫ω² dx."""
        return 0.5 * self.ws.grid.integrate_h(self.omega**2)


def velocity_from_vorticity(omega: np.ndarray, ws: SpectralWorkspace) -> np.ndarray:
    """Divergence-free velocity with curl_h U = ω - mean(ω)."""
    return ws.grad_perp_h(ws.inverse_laplacian_h(omega))


def project_initial(U0: VectorField, ws: SpectralWorkspace) -> PlanarState:
    """
    Initial vorticity of the limit flow from slab data.

    Vertical-average the horizontal components, apply the 2D Leray
    projection and take curl_h.
    """
    mean_h = np.stack([np.mean(U0[i].values, axis=-1) for i in (0, 1)])
    return PlanarState(ws.curl_h(ws.leray_h(mean_h)), ws)


# -------------------------------------------------------------------
# Right-hand side
# -------------------------------------------------------------------

def _advection_hat(omega_hat: np.ndarray, ws: SpectralWorkspace) -> np.ndarray:
    """Transform of -U·∇ω, dealiased; the mean mode is set to zero."""
    w_hat = omega_hat * ws.mask_h
    psi_hat = -w_hat * np.divide(1.0, ws.hsq, out=np.zeros_like(ws.hsq), where=ws.hsq > 0)
    U = ws.ifft2(np.stack([-1j * ws.h2 * psi_hat, 1j * ws.h1 * psi_hat]))
    grad_w = ws.ifft2(np.stack([1j * ws.h1 * w_hat, 1j * ws.h2 * w_hat]))
    out = -ws.fft2(U[0] * grad_w[0] + U[1] * grad_w[1]) * ws.mask_h
    out[0, 0] = 0.0
    return out


def vorticity_rhs(state: PlanarState, mu: float) -> np.ndarray:
    """-U·∇ω + μΔ_hω in physical space."""
    ws = state.ws
    omega_hat = ws.fft2(state.omega)
    return ws.ifft2(_advection_hat(omega_hat, ws) - mu * ws.hsq_full * omega_hat)


# -------------------------------------------------------------------
# Time stepping
# -------------------------------------------------------------------

def cfl_number(state: PlanarState, dt: float) -> float:
    grid = state.ws.grid
    umax = float(np.max(np.sqrt(np.sum(state.velocity**2, axis=0))))
    return umax * abs(dt) / min(grid.dx, grid.dy)


def step2d(state: PlanarState, mu: float, dt: float) -> PlanarState:
    """
    One integrating-factor RK4 step of ∂_tω + U_h·∇_hω = μΔ_hω.

    Diffusion is integrated exactly; negative ``dt`` runs backwards (used
    for reversibility checks at μ = 0).

    Raises
    ------
    SolverError
        If the advective CFL number exceeds 1.
    """
    cfl = cfl_number(state, dt)
    if cfl > 1.0:
        raise SolverError(f"CFL violated by advection: {cfl:.3f} > 1", term="advection", snapshot=state)

    ws = state.ws
    w = ws.fft2(state.omega)
    E = np.exp(-0.5 * mu * ws.hsq_full * dt)
    E2 = E * E

    a = _advection_hat(w, ws)
    b = _advection_hat(E * (w + 0.5 * dt * a), ws)
    c = _advection_hat(E * w + 0.5 * dt * b, ws)
    d = _advection_hat(E2 * w + dt * E * c, ws)
    w_new = E2 * w + dt / 6.0 * (E2 * a + 2.0 * E * (b + c) + d)
    return PlanarState(ws.ifft2(w_new), ws, state.time + dt)


# -------------------------------------------------------------------
# Driver
# -------------------------------------------------------------------

@dataclass(eq=False)
class Trajectory2D:
    """Vorticity snapshots and energy/enstrophy diagnostics."""

    snapshots: List[PlanarState] = field(default_factory=list)
    rows: List[dict] = field(default_factory=list)

    @property
    def diagnostics(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=DIAGNOSTIC_COLUMNS)

    @property
    def final(self) -> PlanarState:
        return self.snapshots[-1]


def run2d(initial: PlanarState, mu: float, T_end: float, dt: float, cadence: int = 1) -> Trajectory2D:
    """
    Iterate :func:`step2d` up to ``T_end``.

    Raises
    ------
    ConfigError
        If ``T_end`` is not a multiple of ``dt`` or ``cadence`` does not
        divide the step count.
    """
    n_steps = int(round(T_end / dt))
    if abs(n_steps * dt - T_end) > 1e-9 * max(1.0, abs(T_end)):
        raise ConfigError(f"T_end={T_end} is not a multiple of dt={dt}", key="T_end")
    if cadence < 1 or (n_steps and n_steps % cadence):
        raise ConfigError(f"cadence={cadence} must divide the step count {n_steps}", key="cadence")

    traj = Trajectory2D()

    def record(s: PlanarState) -> None:
        traj.snapshots.append(s)
        traj.rows.append({"time": s.time, "energy": s.energy(), "enstrophy": s.enstrophy()})

    state = initial
    record(state)
    for n in range(1, n_steps + 1):
        state = step2d(state, mu, dt)
        if n % cadence == 0:
            record(state)
    logger.info("2D run done: %d steps, t=%.6g, energy=%.6g", n_steps, state.time, state.energy())
    return traj


def taylor_green_vorticity(ws: SpectralWorkspace, amplitude: float = 1.0) -> np.ndarray:
    """
    Vorticity of U = A(sin kx cos ky, -cos kx sin ky) with k = π/L.

    On [-π, π)² this is 2A sin x sin y, decaying as e^{-2μt}.
    """
    k = np.pi / ws.grid.L
    X, Y = ws.grid.mesh_h
    return 2.0 * amplitude * k * np.sin(k * X) * np.sin(k * Y)


def taylor_green_velocity(ws: SpectralWorkspace, amplitude: float = 1.0) -> np.ndarray:
    k = np.pi / ws.grid.L
    X, Y = ws.grid.mesh_h
    return amplitude * np.stack([np.sin(k * X) * np.cos(k * Y), -np.cos(k * X) * np.sin(k * Y)])
