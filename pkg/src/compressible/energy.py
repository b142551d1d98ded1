# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rhs import SolverContext


# -------------------------------------------------------------------
# Energy report
# -------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyReport:
    """
    Discrete energy balance at one time.

    Parameters
    ----------
    time : float
        Simulation time.
    kinetic : float
        ∫½|m|²/ρ dx.
    entropy : float
        ε^{-2m}∫E(ρ, ρ̃) dx.
    cumulative_dissipation : float
        ∫₀^t∫S(∇u):∇u dx dt' (trapezoid rule in time).
    """

    time: float
    kinetic: float
    entropy: float
    cumulative_dissipation: float

    @property
    def total(self) -> float:
        return self.kinetic + self.entropy + self.cumulative_dissipation


def kinetic_energy(ctx: SolverContext, rho: np.ndarray, mom: np.ndarray) -> float:
    return ctx.ws.grid.integrate(0.5 * np.sum(mom**2, axis=0) / rho)


def entropy_energy(ctx: SolverContext, rho: np.ndarray) -> float:
    e = np.asarray(ctx.law.relative_entropy(rho, ctx.rho_t))
    return ctx.inv_mach2 * ctx.ws.grid.integrate(e)


def dissipation_rate(ctx: SolverContext, rho: np.ndarray, mom: np.ndarray) -> float:
    """
    ∫S(∇u):∇u dx = ∫ μ/2|∇u + ∇uᵀ|² - (2/3)μ(div u)² dx (>= 0).
    """
    ws = ctx.ws
    _, u_hat = ctx.velocity_hat(rho, mom)
    k = (ws.k1, ws.k2, ws.k3)
    grad_u = ws.ifft(np.stack([np.stack([1j * k[j] * u_hat[i] for j in range(3)]) for i in range(3)]))
    sym = grad_u + np.swapaxes(grad_u, 0, 1)
    div_u = grad_u[0, 0] + grad_u[1, 1] + grad_u[2, 2]
    mu = ctx.params.mu
    density = 0.5 * mu * np.sum(sym**2, axis=(0, 1)) - (2.0 / 3.0) * mu * div_u**2
    return max(ws.grid.integrate(density), 0.0)
