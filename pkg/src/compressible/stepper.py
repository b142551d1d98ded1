# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import FrozenSet, Optional, Tuple

import numpy as np

from src.eos.static import StaticProfile
from src.grid.config import SimParams
from src.grid.errors import SolverError
from src.grid.fields import FluidState, project_arrays
from src.spectral.workspace import SpectralWorkspace

from .rhs import ALL_TERMS, SolverContext, continuity_hat, momentum_terms_hat, state_from_perturbation


# -------------------------------------------------------------------
# Logger setup
# -------------------------------------------------------------------

logger = logging.getLogger("compressible-solver")

CFL_FRACTION = 0.5


# -------------------------------------------------------------------
# Exact linear propagator
# -------------------------------------------------------------------

class LinearPropagator:
    """
    Exact per-mode flow of the stiff linear subsystem

        σ' = -div m,
        m' = -ε^{-1} b × m - ε^{-2m} c0² ∇σ.

    Parameters
    ----------
    ctx : SolverContext
        Shared tables (wavenumbers, c0², scalings).
    h : float
        Time span of one application.

    Notes
    -----
    With q = (c0 ε^{-m} σ̂, m̂) the generator is skew-Hermitian per mode;
    its exponential is built from a batched Hermitian eigendecomposition.
    The mean mode of σ is held fixed exactly, so mass is conserved to
    round-off.
    """

    def __init__(self, ctx: SolverContext, h: float):
        ws = ctx.ws
        shape = ws.grid.shape
        a = np.sqrt(ctx.c0sq) * ctx.params.epsilon ** (-ctx.params.m) if ctx.acoustic else 0.0
        f = ctx.inv_eps if ctx.rotation else 0.0

        gen = np.zeros(shape + (4, 4), dtype=complex)
        for i, k in enumerate((ws.k1, ws.k2, ws.k3), start=1):
            kk = np.broadcast_to(k, shape)
            gen[..., 0, i] = -1j * a * kk
            gen[..., i, 0] = -1j * a * kk
        gen[..., 1, 2] = f
        gen[..., 2, 1] = -f

        # exp(G h) = exp(-i (iG) h) with iG Hermitian.
        w, v = np.linalg.eigh(1j * gen)
        phase = np.exp(-1j * w * h)
        pq = np.einsum("...ij,...j,...kj->...ik", v, phase, v.conj())

        scale = np.array([a if a > 0 else 1.0, 1.0, 1.0, 1.0])
        self.matrix = pq * scale[None, :] / scale[:, None]
        self.matrix[0, 0, 0, 0, :] = (1.0, 0.0, 0.0, 0.0)
        self.matrix[0, 0, 0, :, 0] = (1.0, 0.0, 0.0, 0.0)
        self.h = h

    def apply_hat(self, stacked_hat: np.ndarray) -> np.ndarray:
        """Propagate transforms of shape ``(4, Nx, Ny, Nz)``."""
        return np.einsum("xyzij,jxyz->ixyz", self.matrix, stacked_hat)


# -------------------------------------------------------------------
# CFL
# -------------------------------------------------------------------

@dataclass(frozen=True)
class CflLimits:
    """Admissible time steps for the explicit part."""

    advection: float
    acoustic_remainder: float
    viscous: float

    @property
    def dt_max(self) -> float:
        return CFL_FRACTION * min(self.advective_total, self.viscous)

    @property
    def advective_total(self) -> float:
        rate = 0.0
        for limit in (self.advection, self.acoustic_remainder):
            rate += 0.0 if np.isinf(limit) else 1.0 / limit
        return np.inf if rate == 0 else 1.0 / rate

    @property
    def limiting_term(self) -> str:
        if self.viscous <= self.advective_total:
            return "viscous"
        return "advection" if self.advection <= self.acoustic_remainder else "acoustic-remainder"


def cfl_limits(ctx: SolverContext, sigma: np.ndarray, mom: np.ndarray) -> CflLimits:
    """
    Limits Δx/|u|max, Δx ε^m/c_rem and Δx²/(4μ).

    c_rem = sqrt(max|p'(ρ) - c0²|) measures the acoustic speed left to the
    explicit remainder after the exact propagator took c0.
    """
    grid = ctx.ws.grid
    dx = min(grid.dx, grid.dy, grid.dz)
    rho = ctx.density(sigma)
    umax = float(np.max(np.sqrt(np.sum((mom / rho[None]) ** 2, axis=0))))
    c_rem = float(np.sqrt(np.max(np.abs(np.asarray(ctx.law.dpressure(rho)) - ctx.c0sq))))
    c_rem_scaled = c_rem * ctx.params.epsilon ** (-ctx.params.m) if ctx.acoustic else 0.0
    return CflLimits(
        advection=dx / umax if umax > 0 else np.inf,
        acoustic_remainder=dx / c_rem_scaled if c_rem_scaled > 0 else np.inf,
        viscous=dx**2 / (4.0 * ctx.params.mu),
    )


# -------------------------------------------------------------------
# Strang splitting stepper
# -------------------------------------------------------------------

_PARITIES = ("even", "even", "odd")


class Stepper:
    """
    Strang splitting L(dt/2) N(dt) L(dt/2).

    L is :class:`LinearPropagator`; N is classical RK4 on convection,
    viscous stress, the variable-coefficient pressure remainder and the
    centrifugal perturbation. σ is frozen during N unless pressure is
    excluded, in which case L carries no continuity and N integrates
    σ' = -div m alongside the momentum. Build once per run and reuse.

    Parameters
    ----------
    profile : StaticProfile
        Static state.
    params : SimParams
        Parameters; ``params.dt`` is the step.
    ws : SpectralWorkspace, optional
        Workspace; built on demand.
    include : frozenset of str, optional
        Physical terms to keep.
    """

    def __init__(
        self,
        profile: StaticProfile,
        params: SimParams,
        ws: Optional[SpectralWorkspace] = None,
        include: FrozenSet[str] = ALL_TERMS,
    ):
        self.ctx = SolverContext(ws or SpectralWorkspace(profile.grid), profile, params, frozenset(include))
        self.dt = params.dt
        self.half = LinearPropagator(self.ctx, 0.5 * self.dt)
        self._cfl_logged = False

    def _explicit(self, sigma: np.ndarray, mom: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Rates (σ', m') of the explicit stage."""
        ws = self.ctx.ws
        hats = momentum_terms_hat(self.ctx, sigma, mom, linear=False)
        dmom = ws.ifft(sum(hats.values())) if hats else np.zeros_like(mom)
        if self.ctx.acoustic:
            return np.zeros_like(sigma), dmom
        # Without pressure the propagator leaves σ alone; continuity lives here.
        return ws.ifft(continuity_hat(self.ctx, mom)), dmom

    def _linear(self, sigma: np.ndarray, mom: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        ws = self.ctx.ws
        stacked = np.concatenate([sigma[None], mom])
        out = ws.ifft(self.half.apply_hat(ws.fft(stacked)))
        return out[0], out[1:]

    def check_cfl(self, sigma: np.ndarray, mom: np.ndarray) -> CflLimits:
        limits = cfl_limits(self.ctx, sigma, mom)
        if not self._cfl_logged:
            logger.info(
                "CFL limits: advection=%.3e acoustic-remainder=%.3e viscous=%.3e (dt=%.3e)",
                limits.advection,
                limits.acoustic_remainder,
                limits.viscous,
                self.dt,
            )
            self._cfl_logged = True
        if self.dt > limits.dt_max:
            raise SolverError(
                f"CFL violated by {limits.limiting_term}: dt={self.dt:.3e} > {limits.dt_max:.3e}",
                term=limits.limiting_term,
            )
        return limits

    def advance(self, sigma: np.ndarray, mom: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """One step on the perturbation variables (σ, m)."""
        self.check_cfl(sigma, mom)
        dt = self.dt
        sigma, mom = self._linear(sigma, mom)

        s1, k1 = self._explicit(sigma, mom)
        s2, k2 = self._explicit(sigma + 0.5 * dt * s1, mom + 0.5 * dt * k1)
        s3, k3 = self._explicit(sigma + 0.5 * dt * s2, mom + 0.5 * dt * k2)
        s4, k4 = self._explicit(sigma + dt * s3, mom + dt * k3)
        sigma = sigma + dt / 6.0 * (s1 + 2.0 * s2 + 2.0 * s3 + s4)
        mom = mom + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        sigma, mom = self._linear(sigma, mom)
        sigma = project_arrays(sigma[None], ("even",))[0]
        mom = project_arrays(mom, _PARITIES)
        self.ctx.density(sigma)
        return sigma, mom

    def step_state(self, state: FluidState) -> FluidState:
        sigma = state.rho.values - self.ctx.rho_t
        try:
            sigma, mom = self.advance(sigma, state.mom.stack())
        except SolverError as exc:
            raise SolverError(str(exc), term=exc.term, snapshot=state) from exc
        return state_from_perturbation(self.ctx, sigma, mom, state.time + self.dt)


def step(
    state: FluidState,
    profile: StaticProfile,
    params: SimParams,
    ws: Optional[SpectralWorkspace] = None,
    include: FrozenSet[str] = ALL_TERMS,
) -> FluidState:
    """
    Advance ``state`` by ``params.dt``.

    Builds a :class:`Stepper` on every call; loops should hold a Stepper.

    Raises
    ------
    SolverError
        On CFL violation (``term`` names the limiting term) or loss of
        density positivity.
    """
    return Stepper(profile, params, ws, include).step_state(state)
