# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, FrozenSet, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.eos.static import StaticProfile
from src.grid.config import SimParams
from src.grid.errors import ConfigError, SolverError
from src.grid.fields import FluidState
from src.spectral.workspace import SpectralWorkspace

from .diagnostics import diagnostics_geostrophic
from .energy import EnergyReport, dissipation_rate, entropy_energy, kinetic_energy
from .rhs import ALL_TERMS, state_from_perturbation
from .stepper import Stepper


# -------------------------------------------------------------------
# Logger setup
# -------------------------------------------------------------------

logger = logging.getLogger("compressible-solver")

DIAGNOSTIC_COLUMNS = [
    "time",
    "kinetic",
    "entropy",
    "dissipation",
    "total",
    "mass_defect",
    "geo_residual",
    "div_residual",
]

Observer = Callable[[FluidState, EnergyReport], None]
StepHook = Callable[[FluidState], None]


# -------------------------------------------------------------------
# Trajectory
# -------------------------------------------------------------------

@dataclass(eq=False)
class Trajectory:
    """Snapshots, energy reports and the diagnostics table of one run."""

    snapshots: List[FluidState] = field(default_factory=list)
    reports: List[EnergyReport] = field(default_factory=list)
    rows: List[dict] = field(default_factory=list)

    @property
    def diagnostics(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=DIAGNOSTIC_COLUMNS)

    @property
    def final(self) -> FluidState:
        return self.snapshots[-1]

    def energy_drift(self) -> float:
        """Largest relative increase of the total energy over the first report."""
        if not self.reports:
            return 0.0
        e0 = self.reports[0].total
        worst = max(r.total - e0 for r in self.reports)
        return max(worst, 0.0) / e0 if e0 > 0 else max(worst, 0.0)


def step_count(params: SimParams, t_end: Optional[float] = None) -> int:
    """Number of steps to reach ``t_end`` (default ``params.T_end``) exactly."""
    t_end = params.T_end if t_end is None else t_end
    n = int(round(t_end / params.dt))
    if abs(n * params.dt - t_end) > 1e-9 * max(1.0, t_end):
        raise ConfigError(f"T_end={t_end} is not a multiple of dt={params.dt}", key="T_end")
    return n


# -------------------------------------------------------------------
# Driver
# -------------------------------------------------------------------

def run(
    initial: FluidState,
    profile: StaticProfile,
    params: SimParams,
    observers: Sequence[Observer] = (),
    cadence: int = 1,
    ws: Optional[SpectralWorkspace] = None,
    include: FrozenSet[str] = ALL_TERMS,
    t_end: Optional[float] = None,
    on_step: Optional[StepHook] = None,
) -> Trajectory:
    """
    Integrate the compressible system and monitor the energy inequality.

    Parameters
    ----------
    initial : FluidState
        Initial data in the parity class.
    profile : StaticProfile
        Static state.
    params : SimParams
        Parameters (``dt``, ``T_end``).
    observers : sequence of callables, optional
        Called as ``observer(state, report)`` at every output time.
    cadence : int, default=1
        Steps between outputs; must divide the total number of steps.
    ws : SpectralWorkspace, optional
        Workspace; built on demand.
    include : frozenset of str, optional
        Physical terms to keep.
    t_end : float, optional
        Overrides ``params.T_end``.
    on_step : callable, optional
        Called as ``on_step(state)`` on the initial state and after every
        step, independent of the cadence; nothing is stored for it.

    Returns
    -------
    Trajectory
        Snapshots, energy reports and diagnostics rows at output times.

    Raises
    ------
    ConfigError
        If the cadence does not divide the step count.
    SolverError
        Propagated from the stepper, with the last recorded state attached.
    """
    n_steps = step_count(params, t_end)
    if cadence < 1 or n_steps % cadence:
        raise ConfigError(f"cadence={cadence} must divide the step count {n_steps}", key="cadence")

    stepper = Stepper(profile, params, ws, include)
    ctx = stepper.ctx
    grid = ctx.ws.grid
    cell = grid.cell_volume

    sigma = initial.rho.values - ctx.rho_t
    mom = initial.mom.stack()
    time = initial.time
    mass0 = float(np.sum(sigma) * cell)
    mass_ref = float(np.sum(ctx.rho_t) * cell)

    traj = Trajectory()
    cumulative = 0.0
    rate = dissipation_rate(ctx, ctx.density(sigma), mom)

    def record(state: FluidState) -> None:
        rho = state.rho.values
        report = EnergyReport(
            time=state.time,
            kinetic=kinetic_energy(ctx, rho, mom),
            entropy=entropy_energy(ctx, rho),
            cumulative_dissipation=cumulative,
        )
        if params.m == 1:
            geo, div = diagnostics_geostrophic(state, profile, params, ctx.ws)
        else:
            geo, div = float("nan"), float("nan")
        traj.snapshots.append(state)
        traj.reports.append(report)
        traj.rows.append(
            {
                "time": state.time,
                "kinetic": report.kinetic,
                "entropy": report.entropy,
                "dissipation": report.cumulative_dissipation,
                "total": report.total,
                "mass_defect": (float(np.sum(sigma) * cell) - mass0) / mass_ref,
                "geo_residual": geo,
                "div_residual": div,
            }
        )
        for observer in observers:
            observer(state, report)

    state = initial
    record(state)
    if on_step is not None:
        on_step(state)
    logger.info("Run start: %d steps of dt=%.3e, cadence=%d", n_steps, params.dt, cadence)

    for n in range(1, n_steps + 1):
        try:
            sigma, mom = stepper.advance(sigma, mom)
        except SolverError as exc:
            logger.error("Step %d failed at t=%.6g: %s", n, time, exc)
            raise SolverError(str(exc), term=exc.term, snapshot=state) from exc
        time = initial.time + n * params.dt
        new_rate = dissipation_rate(ctx, ctx.rho_t + sigma, mom)
        cumulative += 0.5 * params.dt * (rate + new_rate)
        rate = new_rate
        if on_step is None and n % cadence:
            continue
        current = state_from_perturbation(ctx, sigma, mom, time)
        if on_step is not None:
            on_step(current)
        if n % cadence == 0:
            state = current
            record(state)

    logger.info("Run done: t=%.6g, relative energy drift %.3e", time, traj.energy_drift())
    return traj
