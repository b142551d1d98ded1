# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from src.grid.fields import SlabGrid
from src.spectral.workspace import SpectralWorkspace

from .mesh import RadialField
from .sampling import radial_spline


# -------------------------------------------------------------------
# Geostrophic velocity
# -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RadialVelocity:
    """
    U_h = ∇_h^⊥R for radial R, i.e. U_h = g(s)(-x₂, x₁) with g = R'(s)/s.

    ``spline`` interpolates R on the even extension, so g is smooth through
    the axis where it takes the value R''(0).
    """

    spline: CubicSpline
    s_max: float

    def g(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        d1 = self.spline.derivative(1)
        safe = np.where(s > 0, s, 1.0)
        return np.where(s > 0, d1(safe) / safe, self.spline.derivative(2)(0.0))

    def g_prime(self, s: np.ndarray) -> np.ndarray:
        """(R''s - R')/s², with limit 0 on the axis (R is even)."""
        s = np.asarray(s, dtype=float)
        safe = np.where(s > 0, s, 1.0)
        d1, d2 = self.spline.derivative(1)(safe), self.spline.derivative(2)(safe)
        return np.where(s > 0, (d2 * safe - d1) / safe**2, 0.0)

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        s = np.hypot(x, y)
        g = np.where(s <= self.s_max, self.g(np.minimum(s, self.s_max)), 0.0)
        return np.stack([-g * y, g * x])

    def speed(self, s: np.ndarray) -> np.ndarray:
        """|U_h| = |R'(s)| on the circle of radius s."""
        return np.abs(self.spline.derivative(1)(np.asarray(s, dtype=float)))


def radial_velocity(field: RadialField) -> RadialVelocity:
    return RadialVelocity(radial_spline(field.R, field.mesh), field.mesh.s_max)


def reconstruct_velocity(field: RadialField, grid: SlabGrid) -> np.ndarray:
    """
    Geostrophic velocity ∇_h^⊥(P'(ρ̃)r) on the horizontal grid.

    Azimuthal with magnitude |∂_sR|; zero outside S_max. Shape ``(2, Nx, Ny)``.
    """
    X, Y = grid.mesh_h
    return radial_velocity(field)(X, Y)


# -------------------------------------------------------------------
# Invariants of the geostrophic velocity
# -------------------------------------------------------------------

def geostrophic_invariants(
    velocity: RadialVelocity,
    grid: SlabGrid,
    ws: Optional[SpectralWorkspace] = None,
    grad_rho: Optional[np.ndarray] = None,
    n_circles: int = 16,
    n_angles: int = 128,
) -> Dict[str, float]:
    """
    Structural checks on a reconstructed geostrophic velocity.

    Returns
    -------
    dict
        ``tangency``: max |U·x|/(|U||x|).
        ``circle_spread``: max over circles of the spread of |U| relative to max |U|.
        ``divergence_chain``: max |div_h U| through the radial chain rule.
        ``divergence_spectral``: L² norm of the spectral div_h U on |x| <= S_max/2.
        ``grad_rho_dot_u``: max |∇ρ̃·U| when ``grad_rho`` (2, Nx, Ny) is given, else NaN.
    """
    X, Y = grid.mesh_h
    s = np.hypot(X, Y)
    U = velocity(X, Y)
    speed = np.hypot(U[0], U[1])
    peak = float(np.max(speed))
    inside = (s > 0) & (s <= velocity.s_max) & (speed > 1e-14 * max(peak, 1e-300))

    if np.any(inside):
        tangency = float(np.max(np.abs(U[0] * X + U[1] * Y)[inside] / (speed * s)[inside]))
    else:
        tangency = 0.0

    radii = (np.arange(n_circles) + 0.5) * velocity.s_max / n_circles
    theta = np.linspace(0.0, 2.0 * np.pi, n_angles, endpoint=False)
    cx, cy = radii[:, None] * np.cos(theta), radii[:, None] * np.sin(theta)
    ring = velocity(cx, cy)
    ring_speed = np.hypot(ring[0], ring[1])
    spread = float(np.max(ring_speed.max(axis=1) - ring_speed.min(axis=1)))
    circle_spread = spread / peak if peak > 0 else 0.0

    safe = np.where(s > 0, s, 1.0)
    gp = np.where(s <= velocity.s_max, velocity.g_prime(np.minimum(s, velocity.s_max)), 0.0)
    d1 = -Y * gp * X / safe
    d2 = X * gp * Y / safe
    divergence_chain = float(np.max(np.abs(d1 + d2)))

    ws = ws or SpectralWorkspace(grid)
    inner = s <= 0.5 * velocity.s_max
    div = ws.div_h(U)
    divergence_spectral = float(np.sqrt(grid.integrate_h(div**2, inner)))

    grad_rho_dot_u = float("nan")
    if grad_rho is not None:
        grad_rho_dot_u = float(np.max(np.abs(grad_rho[0] * U[0] + grad_rho[1] * U[1])[s <= velocity.s_max]))

    return {
        "tangency": tangency,
        "circle_spread": circle_spread,
        "divergence_chain": divergence_chain,
        "divergence_spectral": divergence_spectral,
        "grad_rho_dot_u": grad_rho_dot_u,
    }
