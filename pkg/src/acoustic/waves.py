# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from src.eos.pressure import PressureLaw
from src.eos.static import StaticProfile
from src.grid.config import SimParams
from src.grid.fields import FluidState, ScalarField, VectorField
from src.spectral.operators import cutoff_chi, helmholtz_project, potential_of
from src.spectral.workspace import SpectralWorkspace


# -------------------------------------------------------------------
# Logger setup
# -------------------------------------------------------------------

logger = logging.getLogger("acoustic-waves")

FieldLike = Union[ScalarField, np.ndarray]

# Below this |z| the φ-functions use their Taylor series.
_PHI_SERIES = 1e-3


def field_values(f: FieldLike) -> np.ndarray:
    return f.values if isinstance(f, ScalarField) else np.asarray(f, dtype=float)


def sound_speed_sq(params: SimParams) -> float:
    """p'(1) = γ for the unit γ-law."""
    return float(PressureLaw(params.gamma).dpressure(1.0))


# -------------------------------------------------------------------
# Acoustic state
# -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AcousticState:
    """
    Localized acoustic variables.

    Parameters
    ----------
    S : ScalarField
        χ_ε(ρ - ρ̃)/ε^m.
    Psi : ScalarField
        Zero-mean potential with ∇Ψ = H^⊥[χ_ε ρu].
    Y : VectorField
        Solenoidal part H[χ_ε ρu].
    """

    S: ScalarField
    Psi: ScalarField
    Y: VectorField


def extract_acoustic(
    state: FluidState,
    profile: StaticProfile,
    params: SimParams,
    ws: Optional[SpectralWorkspace] = None,
) -> AcousticState:
    """
    Split the localized momentum into its solenoidal and gradient parts.

    Raises
    ------
    ConfigError
        If the cut-off radii do not fit the box.
    """
    grid = state.grid
    ws = ws or SpectralWorkspace(grid)
    chi = cutoff_chi(params.epsilon, params.alpha, grid)[:, :, None]
    S = ScalarField(grid, chi * state.r_eps(profile.rho_tilde, params), "even")
    m_loc = VectorField.from_arrays(grid, chi[None] * state.mom.stack())
    return AcousticState(S=S, Psi=potential_of(m_loc, ws), Y=helmholtz_project(m_loc, ws))


# -------------------------------------------------------------------
# Free propagation
# -------------------------------------------------------------------

def _rotation(ws: SpectralWorkspace, a: float, tau: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """cos(λτ), (|k|²/λ)sin(λτ), (a/λ)sin(λτ) with λ = √a|k|."""
    ksq = ws.ksq
    lam = np.sqrt(a * ksq)
    c = np.cos(lam * tau)
    safe = np.where(lam > 0, lam, 1.0)
    sinc = np.where(lam > 0, np.sin(lam * tau) / safe, tau)
    return c, ksq * sinc, a * sinc


def propagate_hat(
    S_hat: np.ndarray,
    Psi_hat: np.ndarray,
    t: float,
    params: SimParams,
    ws: SpectralWorkspace,
) -> Tuple[np.ndarray, np.ndarray]:
    """Transform-side solution of ε^m S_t + ΔΨ = 0, ε^m Ψ_t + p'(1)S = 0."""
    a = sound_speed_sq(params)
    c, s_k, s_a = _rotation(ws, a, t / params.mach)
    return c * S_hat + s_k * Psi_hat, c * Psi_hat - s_a * S_hat


def wave_propagate(
    S0: FieldLike,
    Psi0: FieldLike,
    t: float,
    params: SimParams,
    ws: SpectralWorkspace,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exact acoustic propagation over time ``t``.

    Per mode, with λ = √(p'(1))|k| and τ = t/ε^m:

        Ŝ(t) = cos(λτ)Ŝ₀ + (|k|²/λ)sin(λτ)Ψ̂₀
        Ψ̂(t) = cos(λτ)Ψ̂₀ - (p'(1)/λ)sin(λτ)Ŝ₀

    At |k| = 0 the mean of S is constant and the mean of Ψ drifts by
    -p'(1)τŜ₀. Returns arrays ``(S, Psi)``.
    """
    S_hat, Psi_hat = propagate_hat(ws.fft(field_values(S0)), ws.fft(field_values(Psi0)), t, params, ws)
    return ws.ifft(S_hat), ws.ifft(Psi_hat)


def acoustic_energy(S: FieldLike, Psi: FieldLike, params: SimParams, ws: SpectralWorkspace) -> float:
    """p'(1)‖S‖² + ‖∇Ψ‖², evaluated with Parseval on the derivative wavenumbers."""
    return acoustic_energy_hat(ws.fft(field_values(S)), ws.fft(field_values(Psi)), params, ws)


def acoustic_energy_hat(S_hat: np.ndarray, Psi_hat: np.ndarray, params: SimParams, ws: SpectralWorkspace) -> float:
    a = sound_speed_sq(params)
    grid = ws.grid
    n = grid.Nx * grid.Ny * grid.Nz
    total = np.sum(a * np.abs(S_hat) ** 2 + ws.ksq * np.abs(Psi_hat) ** 2)
    return float(total * grid.cell_volume / n)


# -------------------------------------------------------------------
# Forced propagation
# -------------------------------------------------------------------

def phi_functions(z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """φ1(z) = (e^z - 1)/z and φ2(z) = (e^z - 1 - z)/z², series near 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < _PHI_SERIES
    safe = np.where(small, 1.0, z)
    phi1 = np.where(small, 1 + z / 2 + z**2 / 6 + z**3 / 24 + z**4 / 120, np.expm1(safe) / safe)
    phi2 = np.where(
        small,
        0.5 + z / 6 + z**2 / 24 + z**3 / 120 + z**4 / 720,
        (np.expm1(safe) - safe) / safe**2,
    )
    return phi1, phi2


def _linear_source_step(z: np.ndarray, x: np.ndarray, h: float, g0: np.ndarray, g1: np.ndarray) -> np.ndarray:
    """Exact step of z' = (x/h)z + g for g linear between g0 and g1."""
    phi1, phi2 = phi_functions(x)
    return np.exp(x) * z + h * ((phi1 - phi2) * g0 + phi2 * g1)


class _Diagonal:
    """z± = √a Ŝ ± i|k|Ψ̂ with z±' = ∓iω z± + g±, ω = √a|k|/ε^m."""

    def __init__(self, params: SimParams, ws: SpectralWorkspace):
        self.a = sound_speed_sq(params)
        self.k = np.sqrt(ws.ksq)
        self.omega = np.sqrt(self.a) * self.k / params.mach
        self.zero = self.k == 0
        self._safe_k = np.where(self.zero, 1.0, self.k)
        self.drift = self.a / params.mach

    def mean_S(self, zp: np.ndarray, zm: np.ndarray) -> np.ndarray:
        """Ŝ recovered from z± (used on the zero modes)."""
        return (zp + zm) / (2.0 * np.sqrt(self.a))

    def to_z(self, S_hat: np.ndarray, Psi_hat: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        ra = np.sqrt(self.a)
        return ra * S_hat + 1j * self.k * Psi_hat, ra * S_hat - 1j * self.k * Psi_hat

    def from_z(self, zp: np.ndarray, zm: np.ndarray, psi_zero: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        S_hat = (zp + zm) / (2.0 * np.sqrt(self.a))
        Psi_hat = np.where(self.zero, psi_zero, (zp - zm) / (2j * self._safe_k))
        return S_hat, Psi_hat


def forced_path_hat(
    S_hat0: np.ndarray,
    Psi_hat0: np.ndarray,
    forcing_hat: Iterable[Tuple[np.ndarray, np.ndarray]],
    times: Sequence[float],
    params: SimParams,
    ws: SpectralWorkspace,
) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """
    Transform-side forced propagation, yielding ``(Ŝ, Ψ̂)`` at every time.

    ``forcing_hat`` is consumed lazily, one transformed sample per entry of
    ``times``, so sources may be generated on the fly.
    """
    times = np.asarray(times, dtype=float)
    diag = _Diagonal(params, ws)
    zp, zm = diag.to_z(S_hat0, Psi_hat0)
    psi_zero = np.asarray(Psi_hat0).copy()
    samples = iter(forcing_hat)

    def sources(pair: Tuple[np.ndarray, np.ndarray]):
        return (*diag.to_z(*pair), pair[1])

    gp0, gm0, gz0 = sources(next(samples))
    yield diag.from_z(zp, zm, psi_zero)
    for n in range(1, len(times)):
        h = times[n] - times[n - 1]
        gp1, gm1, gz1 = sources(next(samples))
        # Zero modes: S is quadratic in time over the step, Ψ integrates it.
        s_start = diag.mean_S(zp, zm)
        s_integral = s_start * h + diag.mean_S(gp0, gm0) * h**2 / 2 + diag.mean_S(gp1 - gp0, gm1 - gm0) * h**2 / 6
        psi_zero = psi_zero + 0.5 * h * (gz0 + gz1) - diag.drift * s_integral
        zp = _linear_source_step(zp, -1j * diag.omega * h, h, gp0, gp1)
        zm = _linear_source_step(zm, 1j * diag.omega * h, h, gm0, gm1)
        gp0, gm0, gz0 = gp1, gm1, gz1
        yield diag.from_z(zp, zm, psi_zero)


def wave_propagate_forced(
    S0: FieldLike,
    Psi0: FieldLike,
    forcing: Sequence[Tuple[FieldLike, FieldLike]],
    times: Sequence[float],
    params: SimParams,
    ws: SpectralWorkspace,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Propagate with source terms: S_t = -ΔΨ/ε^m + g_S, Ψ_t = -p'(1)S/ε^m + g_Ψ.

    Parameters
    ----------
    S0, Psi0 : ScalarField or numpy.ndarray
        Initial data.
    forcing : sequence of (g_S, g_Ψ)
        Source samples at ``times``.
    times : sequence of float
        Increasing sample times starting at 0; the result is at ``times[-1]``.
    params : SimParams
        Scaling parameters.
    ws : SpectralWorkspace
        Transform tables.

    Notes
    -----
    The homogeneous rotation is exact; the Duhamel integral is exact for
    sources varying linearly between samples (φ-function quadrature),
    which reduces to the trapezoidal rule when the propagator is frozen.
    """
    if len(forcing) != len(times):
        raise ValueError(f"{len(forcing)} forcing samples for {len(times)} times")
    forcing_hat = ((ws.fft(field_values(gs)), ws.fft(field_values(gp))) for gs, gp in forcing)
    S_hat0, Psi_hat0 = ws.fft(field_values(S0)), ws.fft(field_values(Psi0))
    *_, (S_hat, Psi_hat) = forced_path_hat(S_hat0, Psi_hat0, forcing_hat, times, params, ws)
    return ws.ifft(S_hat), ws.ifft(Psi_hat)


def duhamel_constant_hat(
    gS_hat: np.ndarray,
    gPsi_hat: np.ndarray,
    t: float,
    params: SimParams,
    ws: SpectralWorkspace,
) -> Tuple[np.ndarray, np.ndarray]:
    """Closed-form response at time ``t`` to a time-constant source from rest."""
    diag = _Diagonal(params, ws)
    gp, gm = diag.to_z(gS_hat, gPsi_hat)
    phi_p, _ = phi_functions(-1j * diag.omega * t)
    phi_m, _ = phi_functions(1j * diag.omega * t)
    psi_zero = t * gPsi_hat - diag.drift * gS_hat * t**2 / 2
    return diag.from_z(t * phi_p * gp, t * phi_m * gm, psi_zero)
