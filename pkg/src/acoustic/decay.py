# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

import logging
from typing import Optional, Tuple

import numpy as np

from src.grid.config import SimParams
from src.grid.fields import SlabGrid
from src.spectral.workspace import SpectralWorkspace

from .waves import FieldLike, field_values, forced_path_hat, propagate_hat, sound_speed_sq


# -------------------------------------------------------------------
# Logger setup
# -------------------------------------------------------------------

logger = logging.getLogger("acoustic-waves")


# -------------------------------------------------------------------
# Localization
# -------------------------------------------------------------------

def bump(grid: SlabGrid, radius: float) -> np.ndarray:
    """Smooth bump φ = exp(1 - 1/(1 - (s/K)²)) supported in |x_h| < K; φ(0) = 1."""
    t = (grid.radius / radius) ** 2
    inside = t < 1.0
    safe = np.where(inside, 1.0 - t, 1.0)
    return np.where(inside, np.exp(1.0 - 1.0 / safe), 0.0)


def wrap_time(grid: SlabGrid, params: SimParams, radius: float, data_radius: float) -> float:
    """
    Fast time τ after which a front leaving the data can re-enter the bump
    through the periodic boundary: (2L - K - R_data)/c.
    """
    c = np.sqrt(sound_speed_sq(params))
    return float((2.0 * grid.L - radius - data_radius) / c)


def alpha_window(m: float) -> Tuple[float, float]:
    """Cut-off exponent window (1 + m/2, 3(m - 2)/4); empty unless m > 10."""
    low, high = 1.0 + 0.5 * m, 0.75 * (m - 2.0)
    return low, high


def check_alpha(params: SimParams) -> bool:
    """Log whether ``params.alpha`` lies inside the window; never raises."""
    low, high = alpha_window(params.m)
    ok = low < params.alpha < high
    if not ok:
        logger.warning(
            "alpha=%.4g outside the window (%.4g, %.4g) for m=%.4g; decay is measured anyway",
            params.alpha,
            low,
            high,
            params.m,
        )
    return ok


# -------------------------------------------------------------------
# Local energy
# -------------------------------------------------------------------

def _local_density(S_hat: np.ndarray, Psi_hat: np.ndarray, a: float, phi_sq: np.ndarray, ws: SpectralWorkspace) -> float:
    S = ws.ifft(S_hat)
    grad_psi = ws.ifft(ws.grad_hat(Psi_hat))
    density = a * S**2 + np.sum(grad_psi**2, axis=0)
    return ws.grid.integrate(phi_sq[:, :, None] * density)


def local_energy(
    S0: FieldLike,
    Psi0: FieldLike,
    radius: float,
    T: float,
    params: SimParams,
    ws: SpectralWorkspace,
    n_samples: int = 256,
) -> float:
    """
    Time-integrated localized energy of freely propagating acoustic data.

    Computes ∫₀ᵀ∫φ²(p'(1)S² + |∇Ψ|²) dx dt with φ the bump of ``radius`` and
    the trapezoid rule over ``n_samples`` equally spaced times.

    Returns
    -------
    float
        Zero for zero data; scales like ε^m once T/ε^m exceeds the time the
        waves need to leave the bump.
    """
    a = sound_speed_sq(params)
    phi_sq = bump(ws.grid, radius) ** 2
    S_hat0, Psi_hat0 = ws.fft(field_values(S0)), ws.fft(field_values(Psi0))
    times = np.linspace(0.0, T, n_samples)
    samples = np.array(
        [_local_density(*propagate_hat(S_hat0, Psi_hat0, t, params, ws), a, phi_sq, ws) for t in times]
    )
    return float(np.trapezoid(samples, times))


def pulse(s: np.ndarray | float, duration: float) -> np.ndarray:
    """Raised-cosine envelope (2/d)sin²(πs/d) on [0, d], zero after; unit integral."""
    s = np.asarray(s, dtype=float)
    return np.where((s >= 0) & (s <= duration), 2.0 / duration * np.sin(np.pi * s / duration) ** 2, 0.0)


def focusing_source_hat(
    gS_hat: np.ndarray,
    gPsi_hat: np.ndarray,
    s: float,
    focus: float,
    duration: float,
    params: SimParams,
    ws: SpectralWorkspace,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Source h(s)·exp((s - t*)A)[g] in transform space.

    The carrier is the free wave that converges onto the data ``g`` at the
    focus time t*, so the source oscillates at the acoustic frequencies
    |k|√p'(1)/ε^m; h is :func:`pulse`. The response from rest is
    H(t)·exp((t - t*)A)[g] with H the primitive of h.
    """
    weight = float(pulse(s, duration))
    if weight == 0.0:
        return np.zeros_like(gS_hat), np.zeros_like(gPsi_hat)
    S_hat, Psi_hat = propagate_hat(gS_hat, gPsi_hat, s - focus, params, ws)
    return weight * S_hat, weight * Psi_hat


def forced_local_response(
    gS: FieldLike,
    gPsi: FieldLike,
    radius: float,
    T: float,
    params: SimParams,
    ws: SpectralWorkspace,
    n_samples: int = 256,
    focus: Optional[float] = None,
    duration: Optional[float] = None,
) -> float:
    """
    Localized L²-time energy of the response to an oscillating source.

    The source is :func:`focusing_source_hat` with focus t* (default T/2)
    and a pulse of ``duration`` (default T/8), so its L²((0,T) × Ω) norm
    does not depend on ε. The response is integrated from rest with
    :func:`forced_path_hat` on ``n_samples`` equally spaced times.

    Returns
    -------
    float
        Zero for a zero source; scales like ε^m once the waves leave the
        bump within the time left after the pulse.
    """
    focus = 0.5 * T if focus is None else focus
    duration = 0.125 * T if duration is None else duration
    a = sound_speed_sq(params)
    phi_sq = bump(ws.grid, radius) ** 2
    gS_hat, gPsi_hat = ws.fft(field_values(gS)), ws.fft(field_values(gPsi))
    times = np.linspace(0.0, T, n_samples)
    forcing = (focusing_source_hat(gS_hat, gPsi_hat, s, focus, duration, params, ws) for s in times)
    rest = np.zeros_like(gS_hat)
    path = forced_path_hat(rest, rest, forcing, times, params, ws)
    samples = np.array([_local_density(S_hat, Psi_hat, a, phi_sq, ws) for S_hat, Psi_hat in path])
    return float(np.trapezoid(samples, times))


def fit_slope(epsilons: np.ndarray, values: np.ndarray) -> float:
    """Least-squares slope of log(values) against log(epsilons)."""
    slope, _ = np.polyfit(np.log(np.asarray(epsilons)), np.log(np.asarray(values)), 1)
    return float(slope)
