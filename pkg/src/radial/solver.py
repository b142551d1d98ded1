# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.linalg import LinAlgError, eigh, solve, solve_banded

from src.grid.errors import ConfigError, SolverError
from src.grid.fields import SlabGrid
from src.spectral.workspace import SpectralWorkspace

from .mesh import RadialField
from .operators import RadialOperators
from .sampling import circle_average


# -------------------------------------------------------------------
# Logger setup
# -------------------------------------------------------------------

logger = logging.getLogger("limit-radial")

# Monitored decay toward S_max: |r| at the last node relative to max |r|.
TAIL_TOLERANCE = 1e-3


# -------------------------------------------------------------------
# Initial data
# -------------------------------------------------------------------

def solve_initial(rhs: np.ndarray, ops: RadialOperators) -> RadialField:
    """Solve A·r(0) = a for nodal values ``a``."""
    try:
        values = solve(ops.A, rhs)
    except LinAlgError as exc:
        raise SolverError(f"initial-data operator is singular: {exc}", term="init") from exc
    r = RadialField(values, ops.profile)
    if r.tail_ratio() > TAIL_TOLERANCE:
        logger.warning("r(0) has not decayed at S_max: tail ratio %.3e", r.tail_ratio())
    return r


def init_from_data(
    r0: np.ndarray,
    U0h: np.ndarray,
    rho_h: np.ndarray,
    ops: RadialOperators,
    grid: SlabGrid,
    ws: Optional[SpectralWorkspace] = None,
    n_angles: Optional[int] = None,
) -> RadialField:
    """
    Radial initial value of the isotropic limit from planar data.

    Parameters
    ----------
    r0 : numpy.ndarray
        Vertically averaged density fluctuation, shape ``(Nx, Ny)``.
    U0h : numpy.ndarray
        Vertically averaged horizontal velocity, shape ``(2, Nx, Ny)``.
    rho_h : numpy.ndarray
        Static density on the horizontal grid.
    ops : RadialOperators
        Operators on the target radial mesh.
    grid : SlabGrid
        Grid carrying the planar data.

    Notes
    -----
    The right-hand side is the circle average of ⟨r₀⟩ - curl_h(ρ̃U₀ₕ). With
    the (a, b)^⊥ = (-b, a) convention, balanced data U₀ₕ = ∇^⊥(P'(ρ̃)r₀)
    give back r₀.
    """
    ws = ws or SpectralWorkspace(grid)
    source = r0 - ws.curl_h(rho_h[None] * U0h)
    rhs = circle_average(source, ops.mesh, grid, n_angles)
    return solve_initial(rhs, ops)


# -------------------------------------------------------------------
# Time stepping
# -------------------------------------------------------------------

def step_radial(r: RadialField, dt: float, ops: RadialOperators) -> RadialField:
    """One Crank–Nicolson step of A ∂_t r = -μB(P'r)."""
    if dt <= 0:
        raise ConfigError(f"dt must be > 0, got {dt}", key="dt")
    left, right = ops.crank_nicolson(dt)
    try:
        values = solve_banded((2, 2), left, right @ r.values)
    except (LinAlgError, ValueError) as exc:
        raise SolverError(f"banded Crank-Nicolson solve failed: {exc}", term="radial") from exc
    return RadialField(values, r.profile, r.time + dt)


def slowest_mode(ops: RadialOperators) -> Tuple[float, np.ndarray]:
    """
    Smallest generalized eigenpair of μQv = λMv.

    A solution r = e^{-λt}v of the semi-discrete equation decays at rate λ.
    The eigenvector is M-normalized.
    """
    values, vectors = eigh(ops.mu * ops.Q, ops.M, subset_by_index=[0, 0])
    return float(values[0]), vectors[:, 0]


# -------------------------------------------------------------------
# Driver
# -------------------------------------------------------------------

@dataclass(eq=False)
class RadialTrajectory:
    """Radial fields and energy at the output times."""

    fields: List[RadialField] = field(default_factory=list)
    energies: List[float] = field(default_factory=list)

    @property
    def final(self) -> RadialField:
        return self.fields[-1]

    @property
    def table(self) -> pd.DataFrame:
        """Wide table: time, energy, r_0..r_{Ns-1}, R_0..R_{Ns-1}."""
        if not self.fields:
            return pd.DataFrame(columns=["time", "energy"])
        n = self.fields[0].mesh.Ns
        rows = np.array([np.concatenate([[f.time, e], f.values, f.R]) for f, e in zip(self.fields, self.energies)])
        columns = ["time", "energy"] + [f"r_{j}" for j in range(n)] + [f"R_{j}" for j in range(n)]
        return pd.DataFrame(rows, columns=columns)

    def profile_frame(self) -> pd.DataFrame:
        """Node radii, for reading the wide columns back."""
        mesh = self.fields[0].mesh
        return pd.DataFrame({"node": np.arange(mesh.Ns), "s": mesh.nodes})


def run_radial(
    initial: RadialField,
    ops: RadialOperators,
    dt: float,
    T_end: float,
    cadence: int = 1,
) -> RadialTrajectory:
    """
    Iterate :func:`step_radial` and monitor the energy functional.

    An increase of the energy beyond round-off is logged; the Crank–Nicolson
    map cannot increase it in exact arithmetic.
    """
    n_steps = int(round(T_end / dt))
    if abs(n_steps * dt - T_end) > 1e-9 * max(1.0, abs(T_end)):
        raise ConfigError(f"T_end={T_end} is not a multiple of dt={dt}", key="T_end")
    if cadence < 1 or (n_steps and n_steps % cadence):
        raise ConfigError(f"cadence={cadence} must divide the step count {n_steps}", key="cadence")

    traj = RadialTrajectory()
    r = initial
    energy = ops.energy(r.values)
    traj.fields.append(r)
    traj.energies.append(energy)

    left, right = ops.crank_nicolson(dt)
    for n in range(1, n_steps + 1):
        try:
            values = solve_banded((2, 2), left, right @ r.values)
        except (LinAlgError, ValueError) as exc:
            raise SolverError(f"banded solve failed at step {n}: {exc}", term="radial") from exc
        r = RadialField(values, r.profile, initial.time + n * dt)
        new_energy = ops.energy(values)
        if new_energy > energy * (1.0 + 1e-12) + 1e-300:
            logger.warning("energy increased at step %d: %.16e -> %.16e", n, energy, new_energy)
        energy = new_energy
        if n % cadence == 0:
            traj.fields.append(r)
            traj.energies.append(energy)

    if r.tail_ratio() > TAIL_TOLERANCE:
        logger.warning("r has not decayed at S_max: tail ratio %.3e", r.tail_ratio())
    logger.info("Radial run done: %d steps, t=%.6g, energy=%.6e", n_steps, r.time, energy)
    return traj
