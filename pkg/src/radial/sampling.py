# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from src.grid.fields import SlabGrid

from .mesh import RadialMesh


# -------------------------------------------------------------------
# Planar -> radial
# -------------------------------------------------------------------

def spectral_sample(values2d: np.ndarray, x: np.ndarray, y: np.ndarray, grid: SlabGrid) -> np.ndarray:
    """
    Evaluate the trigonometric interpolant of a periodic planar field at
    arbitrary points; exact at the grid nodes.
    """
    nx, ny = grid.shape_h
    fh = np.fft.fft2(values2d) / (nx * ny)
    px = np.ravel(x) + grid.L
    py = np.ravel(y) + grid.L
    E1 = np.exp(1j * np.outer(px, grid.xi1))
    E2 = np.exp(1j * np.outer(py, grid.xi2))
    out = np.real(np.sum((E1 @ fh) * E2, axis=1))
    return out.reshape(np.shape(x))


def circle_average(
    values2d: np.ndarray,
    mesh: RadialMesh,
    grid: SlabGrid,
    n_angles: Optional[int] = None,
) -> np.ndarray:
    """
    (1/2πs)∫_{|x_h|=s} f dS at every mesh node.

    Midpoint rule in angle on the spectral interpolant; ``n_angles``
    defaults to twice the larger horizontal resolution.
    """
    n_angles = n_angles or 2 * max(grid.Nx, grid.Ny)
    theta = (np.arange(n_angles) + 0.5) * (2.0 * np.pi / n_angles)
    s = mesh.nodes[:, None]
    samples = spectral_sample(values2d, s * np.cos(theta)[None], s * np.sin(theta)[None], grid)
    return samples.mean(axis=1)


# -------------------------------------------------------------------
# Radial -> planar
# -------------------------------------------------------------------

def radial_spline(values: np.ndarray, mesh: RadialMesh, boundary_value: float = 0.0) -> CubicSpline:
    """Cubic spline through the nodes, extended evenly to negative s, pinned at ±S_max."""
    s = np.concatenate([[-mesh.s_max], -mesh.nodes[::-1], mesh.nodes, [mesh.s_max]])
    v = np.concatenate([[boundary_value], values[::-1], values, [boundary_value]])
    return CubicSpline(s, v)


def to_planar(values: np.ndarray, mesh: RadialMesh, grid: SlabGrid) -> np.ndarray:
    """Resample a radial profile on the horizontal grid; zero beyond S_max."""
    spline = radial_spline(values, mesh)
    s = grid.radius
    return np.where(s <= mesh.s_max, spline(np.minimum(s, mesh.s_max)), 0.0)
