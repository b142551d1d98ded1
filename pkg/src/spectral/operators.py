# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

import logging
from typing import Tuple

import numpy as np

from src.grid.errors import ConfigError
from src.grid.fields import Parity, ScalarField, SlabGrid, VectorField, enforce_parity

from .workspace import SpectralWorkspace


# -------------------------------------------------------------------
# Logger setup
# -------------------------------------------------------------------

logger = logging.getLogger("spectral-ops")

_FLIP = {"even": "odd", "odd": "even"}


def _flip(parity: Parity) -> Parity:
    return _FLIP[parity]  # type: ignore[return-value]


# -------------------------------------------------------------------
# Derivatives and projections
# -------------------------------------------------------------------

def grad(v: ScalarField, ws: SpectralWorkspace) -> VectorField:
    """
    Spectral gradient (iξ1, iξ2, iκ) v̂.

    The vertical derivative flips the parity, so an even field yields the
    (even, even, odd) layout of the symmetry class.
    """
    g = ws.grad(v.values)
    return VectorField.from_arrays(v.grid, g, (v.parity, v.parity, _flip(v.parity)))


def divergence(v: VectorField, ws: SpectralWorkspace) -> ScalarField:
    """div v; parity taken from the first component."""
    return ScalarField(v.grid, ws.div(v.stack()), v.parities[0])


def helmholtz_project(v: VectorField, ws: SpectralWorkspace) -> VectorField:
    """
    Projection H[v] onto solenoidal fields.

    Parameters
    ----------
    v : VectorField
        Field on ``ws.grid``.
    ws : SpectralWorkspace
        Transform tables.

    Returns
    -------
    VectorField
        H[v] with the parities of ``v``; the mean mode passes through and
        div H[v] = 0 to round-off.
    """
    out = ws.ifft(ws.project_hat(ws.fft(v.stack())))
    return VectorField.from_arrays(v.grid, out, v.parities)


def helmholtz_complement(v: VectorField, ws: SpectralWorkspace) -> VectorField:
    """H^⊥[v] = v - H[v], a gradient field."""
    return VectorField.from_arrays(v.grid, v.stack() - helmholtz_project(v, ws).stack(), v.parities)


def potential_of(v: VectorField, ws: SpectralWorkspace) -> ScalarField:
    """Zero-mean Ψ with ∇Ψ = H^⊥[v]."""
    psi = ws.ifft(ws.potential_hat(ws.fft(v.stack())))
    return ScalarField(v.grid, psi, v.parities[0])


# -------------------------------------------------------------------
# Vertical operators
# -------------------------------------------------------------------

def vertical_average(v: ScalarField) -> np.ndarray:
    """⟨v⟩(x_h) = (1/|T¹|)∫ v dx3, i.e. the κ = 0 vertical mode."""
    return np.mean(v.values, axis=-1)


def vertical_primitive(v: ScalarField, ws: SpectralWorkspace) -> ScalarField:
    """
    Zero-mean primitive I[v] with ∂3 I[v] = v - ⟨v⟩.

    Computed by dividing the nonzero vertical modes by iκ; the vertical
    Nyquist mode has no real primitive on the grid and is dropped.

    Examples
    --------
    cos(πx3) maps to sin(πx3)/π.
    """
    hat = np.fft.fft(v.values, axis=-1)
    k3 = ws.k3[0, 0]
    inv = np.divide(1.0, 1j * k3, out=np.zeros(k3.shape, dtype=complex), where=k3 != 0)
    values = np.fft.ifft(hat * inv, axis=-1).real
    return ScalarField(v.grid, values, _flip(v.parity))


# -------------------------------------------------------------------
# Smoothing and localization
# -------------------------------------------------------------------

def mollify(v: ScalarField, delta: float, ws: SpectralWorkspace) -> ScalarField:
    """Gaussian mollifier: multiply v̂ by exp(-δ²(|ξ|² + κ²)/2)."""
    if delta <= 0:
        raise ConfigError(f"mollification scale must be > 0, got {delta}", key="delta")
    values = ws.ifft(ws.fft(v.values) * np.exp(-0.5 * delta**2 * ws.ksq_full))
    return v.like(values)


def smoothstep5(t: np.ndarray) -> np.ndarray:
    """C² ramp 6t⁵ - 15t⁴ + 10t³ on [0, 1], clamped outside."""
    t = np.clip(t, 0.0, 1.0)
    return t**3 * (t * (6.0 * t - 15.0) + 10.0)


def smoothstep5_prime(t: np.ndarray) -> np.ndarray:
    inside = (t > 0.0) & (t < 1.0)
    tc = np.clip(t, 0.0, 1.0)
    return np.where(inside, 30.0 * tc**2 * (tc - 1.0) ** 2, 0.0)


def _chi_radius(eps: float, alpha: float, grid: SlabGrid) -> float:
    if eps <= 0 or alpha < 0:
        raise ConfigError(f"cut-off needs eps > 0 and alpha >= 0, got eps={eps}, alpha={alpha}")
    r1 = eps ** (-alpha)
    if 2.0 * r1 > 0.95 * grid.L:
        raise ConfigError(
            f"cut-off radius 2*eps^-alpha = {2.0 * r1:.4g} exceeds 0.95*L = {0.95 * grid.L:.4g}",
            key="alpha",
        )
    if r1 < 2.0 * grid.dx:
        logger.warning("cut-off ramp width %.3g spans fewer than two cells (dx=%.3g)", r1, grid.dx)
    logger.debug("cut-off radii %.4g and %.4g for eps=%.4g, alpha=%.4g", r1, 2.0 * r1, eps, alpha)
    return r1


def cutoff_chi(eps: float, alpha: float, grid: SlabGrid) -> np.ndarray:
    """
    Radial cut-off χ_ε on the horizontal grid.

    Equal to 1 on |x_h| <= ε^{-α}, 0 on |x_h| >= 2ε^{-α}; the ramp is the
    quintic smoothstep, so |∇χ_ε| <= 1.875 ε^α.

    Raises
    ------
    ConfigError
        If 2ε^{-α} does not fit inside 0.95·L.
    """
    r1 = _chi_radius(eps, alpha, grid)
    return 1.0 - smoothstep5((grid.radius - r1) / r1)


def cutoff_chi_gradient(eps: float, alpha: float, grid: SlabGrid) -> np.ndarray:
    """Analytic ∇χ_ε, shape ``(2, Nx, Ny)``."""
    r1 = _chi_radius(eps, alpha, grid)
    s = grid.radius
    X, Y = grid.mesh_h
    dchi_ds = -smoothstep5_prime((s - r1) / r1) / r1
    safe = np.where(s > 0, s, 1.0)
    return np.stack([dchi_ds * X / safe, dchi_ds * Y / safe])


# -------------------------------------------------------------------
# Random band-limited fields
# -------------------------------------------------------------------

def random_field(
    ws: SpectralWorkspace,
    rng: np.random.Generator,
    parity: Parity = "even",
    slope: float = 1.0,
) -> ScalarField:
    """
    Random real field, band-limited by the 2/3 mask, with exact parity.

    Parameters
    ----------
    ws : SpectralWorkspace
        Transform tables.
    rng : numpy.random.Generator
        Source of randomness.
    parity : {"even", "odd"}, default="even"
        Vertical parity of the result.
    slope : float, default=1.0
        Spectral envelope (1 + |k|²)^(-slope/2).

    Returns
    -------
    ScalarField
        Field with unit root-mean-square value (zero if the mask leaves
        nothing of the requested parity).
    """
    noise = rng.standard_normal(ws.grid.shape)
    hat = ws.fft(noise) * ws.mask * (1.0 + ws.ksq_full) ** (-0.5 * slope)
    field = enforce_parity(ScalarField(ws.grid, ws.ifft(hat), parity))
    rms = float(np.sqrt(np.mean(field.values**2)))
    return field.like(field.values / rms) if rms > 0 else field


def random_vector_field(ws: SpectralWorkspace, rng: np.random.Generator, slope: float = 1.0) -> VectorField:
    """Random band-limited vector field in the (even, even, odd) class."""
    comps: Tuple[ScalarField, ...] = tuple(
        random_field(ws, rng, p, slope) for p in ("even", "even", "odd")
    )
    return VectorField(comps)  # type: ignore[arg-type]


def l2_inner(a: np.ndarray, b: np.ndarray, grid: SlabGrid) -> float:
    """⟨a, b⟩_{L²} over the slab for stacked or scalar arrays."""
    return grid.integrate(np.sum(a * b, axis=0) if a.ndim == 4 else a * b)
