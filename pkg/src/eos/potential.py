# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.grid.fields import SlabGrid


# Taper is 1 below TAPER_START·L and 0 above TAPER_END·L.
TAPER_START = 0.8
TAPER_END = 0.95


# -------------------------------------------------------------------
# C^∞ radial taper
# -------------------------------------------------------------------

def _bump_tail(t: np.ndarray) -> np.ndarray:
    """f(t) = exp(-1/t) for t > 0, else 0."""
    safe = np.where(t > 0, t, 1.0)
    return np.where(t > 0, np.exp(-1.0 / safe), 0.0)


def _bump_tail_prime(t: np.ndarray) -> np.ndarray:
    safe = np.where(t > 0, t, 1.0)
    return np.where(t > 0, np.exp(-1.0 / safe) / safe**2, 0.0)


def _transition(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Smooth step ψ(t) from 0 (t <= 0) to 1 (t >= 1) and its derivative."""
    a, b = _bump_tail(t), _bump_tail(1.0 - t)
    da, db = _bump_tail_prime(t), -_bump_tail_prime(1.0 - t)
    denom = a + b
    psi = a / denom
    dpsi = (da * b - a * db) / denom**2
    return psi, dpsi


def taper(s: np.ndarray, L: float) -> tuple[np.ndarray, np.ndarray]:
    """Taper T(s) and T'(s)."""
    width = (TAPER_END - TAPER_START) * L
    psi, dpsi = _transition((np.asarray(s, dtype=float) - TAPER_START * L) / width)
    return 1.0 - psi, -dpsi / width


def g_radial(s: np.ndarray, L: float, tapered: bool = True) -> np.ndarray:
    """
    Radial centrifugal potential g(s) = s²·T(s).

    Parameters
    ----------
    s : numpy.ndarray
        Radii |x_h| >= 0.
    L : float
        Box half-width setting the taper radii.
    tapered : bool, default=True
        When False, the plain g(s) = s² is returned.
    """
    s = np.asarray(s, dtype=float)
    if not tapered:
        return s**2
    t, _ = taper(s, L)
    return s**2 * t


def g_radial_prime(s: np.ndarray, L: float, tapered: bool = True) -> np.ndarray:
    """g'(s) = 2sT + s²T'."""
    s = np.asarray(s, dtype=float)
    if not tapered:
        return 2.0 * s
    t, dt = taper(s, L)
    return 2.0 * s * t + s**2 * dt


# -------------------------------------------------------------------
# Potential on the grid
# -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Potential:
    """
    Centrifugal potential G(x_h) sampled on the horizontal grid.

    Parameters
    ----------
    grid : SlabGrid
        Supporting grid.
    values : numpy.ndarray
        G on the horizontal nodes, shape ``(Nx, Ny)``.
    gradient : numpy.ndarray
        Analytic ∇G, shape ``(2, Nx, Ny)``.
    tapered : bool
        Whether the taper is applied (False only for analytic checks).
    kind : str
        ``"centrifugal"`` or ``"zero"``.
    """

    grid: SlabGrid
    values: np.ndarray
    gradient: np.ndarray
    tapered: bool = True
    kind: str = "centrifugal"

    @classmethod
    def centrifugal(cls, grid: SlabGrid, tapered: bool = True) -> "Potential":
        """G = |x_h|² times the smooth taper."""
        X, Y = grid.mesh_h
        s = grid.radius
        values = g_radial(s, grid.L, tapered)
        if tapered:
            t, dt = taper(s, grid.L)
            factor = 2.0 * t + s * dt
        else:
            factor = 2.0 * np.ones_like(s)
        return cls(grid, values, np.stack([factor * X, factor * Y]), tapered, "centrifugal")

    @classmethod
    def zero(cls, grid: SlabGrid) -> "Potential":
        return cls(grid, np.zeros(grid.shape_h), np.zeros((2,) + grid.shape_h), False, "zero")

    def radial(self, s: np.ndarray) -> np.ndarray:
        """The same potential as a function of radius."""
        if self.kind == "zero":
            return np.zeros_like(np.asarray(s, dtype=float))
        return g_radial(s, self.grid.L, self.tapered)

    def radial_prime(self, s: np.ndarray) -> np.ndarray:
        if self.kind == "zero":
            return np.zeros_like(np.asarray(s, dtype=float))
        return g_radial_prime(s, self.grid.L, self.tapered)
