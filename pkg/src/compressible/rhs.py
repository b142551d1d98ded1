# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional, Tuple

import numpy as np

from src.eos.static import StaticProfile
from src.grid.config import SimParams
from src.grid.errors import SolverError
from src.grid.fields import RHO_FLOOR, FluidState, ScalarField, VectorField, make_state, project_arrays
from src.spectral.workspace import SpectralWorkspace


# -------------------------------------------------------------------
# Logger setup
# -------------------------------------------------------------------

logger = logging.getLogger("compressible-solver")

ALL_TERMS: FrozenSet[str] = frozenset({"convection", "coriolis", "pressure", "viscous", "centrifugal"})
_MOM_PARITIES = ("even", "even", "odd")


# -------------------------------------------------------------------
# Solver context
# -------------------------------------------------------------------

@dataclass(eq=False)
class SolverContext:
    """
    Precomputed quantities shared by right-hand side, stepper and energy.

    Parameters
    ----------
    ws : SpectralWorkspace
        Transform tables of the slab grid.
    profile : StaticProfile
        Static state the dynamics are measured against.
    params : SimParams
        Scaling and numerical parameters.
    include : frozenset of str, optional
        Physical terms kept in the momentum equation; defaults to all of
        convection, coriolis, pressure, viscous, centrifugal.

    Notes
    -----
    ``c0sq`` is p'(ρ̄) with ρ̄ the horizontal mean of ρ̃; it sets the
    constant-coefficient acoustic part that the stepper propagates exactly.
    ``grad_P_t`` is the collocation gradient of P(ρ̃); pressure and
    centrifugal forces are built from it so that the static state is an
    exact discrete equilibrium.
    """

    ws: SpectralWorkspace
    profile: StaticProfile
    params: SimParams
    include: FrozenSet[str] = ALL_TERMS
    c0sq: float = field(init=False)

    def __post_init__(self) -> None:
        unknown = set(self.include) - ALL_TERMS
        if unknown:
            raise ValueError(f"unknown rhs terms: {sorted(unknown)}")
        law = self.profile.law
        self.rho_t = self.profile.rho_tilde.values
        self.c0sq = float(law.dpressure(float(np.mean(self.profile.rho_h))))
        self.grad_P_t = self.ws.grad(np.asarray(law.pressure_potential(self.rho_t)))
        self.rho_grad_P_t = self.rho_t[None] * self.grad_P_t
        eps, m = self.params.epsilon, self.params.m
        self.inv_mach2 = eps ** (-2.0 * m)
        self.inv_eps = 1.0 / eps

    @property
    def law(self):
        return self.profile.law

    @property
    def rotation(self) -> bool:
        return "coriolis" in self.include

    @property
    def acoustic(self) -> bool:
        return "pressure" in self.include

    def density(self, sigma: np.ndarray) -> np.ndarray:
        """ρ = ρ̃ + σ with the floor check."""
        rho = self.rho_t + sigma
        rho_min = float(np.min(rho))
        if rho_min < RHO_FLOOR:
            raise SolverError(f"density floor violated: min rho = {rho_min:.3e}")
        return rho

    def velocity_hat(self, rho: np.ndarray, mom: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """u = mom/ρ pointwise and its transform."""
        u = mom / rho[None]
        return u, self.ws.fft(u)


# -------------------------------------------------------------------
# Right-hand side (transform side)
# -------------------------------------------------------------------

def momentum_terms_hat(
    ctx: SolverContext,
    sigma: np.ndarray,
    mom: np.ndarray,
    linear: bool = True,
) -> Dict[str, np.ndarray]:
    """
    Transforms of the momentum forces, keyed by term name.

    Parameters
    ----------
    ctx : SolverContext
        Shared tables.
    sigma : numpy.ndarray
        Density perturbation ρ - ρ̃.
    mom : numpy.ndarray
        Momentum, shape ``(3, Nx, Ny, Nz)``.
    linear : bool, default=True
        When False, the parts propagated exactly by the stepper are left
        out: the Coriolis force and the constant-coefficient acoustic
        pressure -ε^{-2m} c0² ∇σ.

    Notes
    -----
    Products are collocated, and every form is chosen so that summation by
    parts against the skew derivative closes the discrete energy balance:

    - convection -½[∇·(m⊗u) + (m·∇)u + u div m];
    - pressure -ε^{-2m}[ρ∇P(ρ) - ρ̃∇P(ρ̃)];
    - centrifugal ε^{-2m}σ∇P(ρ̃), which is ε^{-2}σ∇G on the static balance.

    Pressure plus centrifugal is -ε^{-2m}ρ∇(P(ρ) - P(ρ̃)) and vanishes
    identically at ρ = ρ̃.
    """
    ws = ctx.ws
    k = (ws.k1, ws.k2, ws.k3)
    rho = ctx.density(sigma)
    out: Dict[str, np.ndarray] = {}

    u, u_hat = ctx.velocity_hat(rho, mom)

    if "convection" in ctx.include:
        flux_hat = ws.fft(mom[:, None] * u[None, :])
        grad_u = ws.ifft(np.stack([np.stack([1j * k[j] * u_hat[i] for j in range(3)]) for i in range(3)]))
        transport = np.einsum("jxyz,ijxyz->ixyz", mom, grad_u) + u * ws.div(mom)[None]
        divergence_hat = 1j * (k[0] * flux_hat[0] + k[1] * flux_hat[1] + k[2] * flux_hat[2])
        out["convection"] = -0.5 * (divergence_hat + ws.fft(transport))

    if "viscous" in ctx.include:
        kdotu = k[0] * u_hat[0] + k[1] * u_hat[1] + k[2] * u_hat[2]
        mu = ctx.params.mu
        out["viscous"] = np.stack([mu * (-ws.ksq_full * u_hat[i] - k[i] * kdotu / 3.0) for i in range(3)])

    if "pressure" in ctx.include:
        grad_P = ws.grad(np.asarray(ctx.law.pressure_potential(rho)))
        force_hat = ws.fft(ctx.rho_grad_P_t - rho[None] * grad_P)
        if not linear:
            force_hat = force_hat + ctx.c0sq * ws.grad_hat(ws.fft(sigma))
        out["pressure"] = ctx.inv_mach2 * force_hat

    if "centrifugal" in ctx.include:
        out["centrifugal"] = ctx.inv_mach2 * ws.fft(sigma[None] * ctx.grad_P_t)

    if linear and "coriolis" in ctx.include:
        m_hat = ws.fft(mom)
        out["coriolis"] = ctx.inv_eps * np.stack([m_hat[1], -m_hat[0], np.zeros_like(m_hat[2])])

    return out


def continuity_hat(ctx: SolverContext, mom: np.ndarray) -> np.ndarray:
    """Transform of -div(ρu); its mean mode is exactly zero."""
    return -ctx.ws.div_hat(ctx.ws.fft(mom))


# -------------------------------------------------------------------
# Public bundle
# -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RhsBundle:
    """
    Time derivatives of the state plus the momentum forces by term.

    ``terms`` maps each included term name to its force in physical space.
    The "pressure" and "centrifugal" entries are relative to the static
    state: -ε^{-2m}[ρ∇P(ρ) - ρ̃∇P(ρ̃)] and ε^{-2m}(ρ - ρ̃)∇P(ρ̃). Each
    vanishes at ρ = ρ̃, so neither is the full pressure gradient or the
    full centrifugal force.
    """

    drho_dt: ScalarField
    dmom_dt: VectorField
    terms: Dict[str, np.ndarray]


def eval_rhs(
    state: FluidState,
    profile: StaticProfile,
    params: SimParams,
    ws: Optional[SpectralWorkspace] = None,
    include: FrozenSet[str] = ALL_TERMS,
) -> RhsBundle:
    """
    Right-hand side of the scaled compressible rotating system.

    Parameters
    ----------
    state : FluidState
        Density and momentum in the parity class, ρ > 0.
    profile : StaticProfile
        Static profile; pressure and centrifugal terms are taken relative to it.
    params : SimParams
        Scaling parameters.
    ws : SpectralWorkspace, optional
        Workspace of the state grid; built on demand.
    include : frozenset of str, optional
        Subset of terms to evaluate.

    Returns
    -------
    RhsBundle
        ``drho_dt = -div(ρu)`` and ``dmom_dt`` = convection + Coriolis +
        pressure + viscous + centrifugal, each reprojected onto the parity
        class. ``terms`` holds each force in physical space, with pressure
        and centrifugal taken relative to the static state.

    Raises
    ------
    SolverError
        If the density drops below the floor; the state is attached.
    """
    ctx = SolverContext(ws or SpectralWorkspace(state.grid), profile, params, frozenset(include))
    sigma = state.rho.values - ctx.rho_t
    mom = state.mom.stack()
    try:
        hats = momentum_terms_hat(ctx, sigma, mom, linear=True)
    except SolverError as exc:
        raise SolverError(str(exc), snapshot=state) from exc

    terms = {name: project_arrays(ctx.ws.ifft(h), _MOM_PARITIES) for name, h in hats.items()}
    total = sum(terms.values()) if terms else np.zeros_like(mom)
    drho = project_arrays(ctx.ws.ifft(continuity_hat(ctx, mom))[None], ("even",))[0]

    grid = state.grid
    return RhsBundle(
        drho_dt=ScalarField(grid, drho, "even"),
        dmom_dt=VectorField.from_arrays(grid, total),
        terms=terms,
    )


def state_from_perturbation(ctx: SolverContext, sigma: np.ndarray, mom: np.ndarray, time: float) -> FluidState:
    """Rebuild a ``FluidState`` from the evolved perturbation variables."""
    return make_state(ctx.ws.grid, ctx.rho_t + sigma, mom, time)
