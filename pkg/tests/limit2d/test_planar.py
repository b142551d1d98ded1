# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------

import numpy as np
import pytest

from src.grid.errors import ConfigError, SolverError
from src.grid.fields import VectorField
from src.limit2d.planar import (
    DIAGNOSTIC_COLUMNS,
    PlanarState,
    project_initial,
    run2d,
    step2d,
    taylor_green_velocity,
    taylor_green_vorticity,
    velocity_from_vorticity,
    vorticity_rhs,
)


# -------------------------------------------------------------------
# Tests
# -------------------------------------------------------------------

def _mixed_vorticity(grid) -> np.ndarray:
    X, Y = grid.mesh_h
    return np.sin(X) * np.sin(2 * Y) + 0.5 * np.cos(3 * X + Y)


def test_taylor_green_velocity_matches_vorticity(ws):
    """
    Verify the Taylor–Green pair.

    Expectations
    ------------
    - Velocity recovered from the vorticity equals the closed form.
    - The advection term vanishes, leaving pure diffusion.
    """
    omega = taylor_green_vorticity(ws, 0.3)
    np.testing.assert_allclose(velocity_from_vorticity(omega, ws), taylor_green_velocity(ws, 0.3), atol=1e-12)

    rhs = vorticity_rhs(PlanarState(omega, ws), mu=0.1)
    np.testing.assert_allclose(rhs, -0.1 * 2.0 * omega, atol=1e-12)


def test_taylor_green_decays_exponentially(ws):
    """
    Verify the viscous decay of the Taylor–Green vortex.

    Expectations
    ------------
    - ω(T) = ω(0) e^{-2μT} on [-π, π)².
    - Diagnostics rows carry time, energy and enstrophy.
    """
    omega0 = taylor_green_vorticity(ws, 1.0)
    traj = run2d(PlanarState(omega0, ws), mu=0.1, T_end=0.5, dt=0.05)

    np.testing.assert_allclose(traj.final.omega, omega0 * np.exp(-2 * 0.1 * 0.5), atol=1e-10)
    df = traj.diagnostics
    assert list(df.columns) == DIAGNOSTIC_COLUMNS
    assert len(df) == 11
    assert df["energy"].iloc[-1] == pytest.approx(df["energy"].iloc[0] * np.exp(-4 * 0.1 * 0.5), rel=1e-10)


def test_energy_decreases_with_viscosity(grid, ws):
    """
    Verify monotone energy decay of a nonlinear flow.

    Expectations
    ------------
    - Energy and enstrophy never increase with μ > 0.
    """
    traj = run2d(PlanarState(_mixed_vorticity(grid), ws), mu=0.1, T_end=0.2, dt=0.01)
    energy = traj.diagnostics["energy"].to_numpy()
    enstrophy = traj.diagnostics["enstrophy"].to_numpy()

    assert np.all(np.diff(energy) < 0)
    assert np.all(np.diff(enstrophy) < 0)


def test_inviscid_energy_conservation(grid, ws):
    """
    Verify that the inviscid flow keeps its energy.

    Expectations
    ------------
    - Relative energy change below 1e-6 over 10 small steps at μ = 0.
    """
    state = PlanarState(_mixed_vorticity(grid), ws)
    traj = run2d(state, mu=0.0, T_end=0.1, dt=0.01)
    assert traj.final.energy() == pytest.approx(state.energy(), rel=1e-6)


def test_cfl_guard(grid, ws):
    """
    Verify the advective CFL check.

    Expectations
    ------------
    - A step with max|U|·dt/Δx > 1 raises ``SolverError`` naming advection.
    """
    state = PlanarState(taylor_green_vorticity(ws, 10.0), ws)
    with pytest.raises(SolverError) as exc:
        step2d(state, mu=0.1, dt=1.0)
    assert exc.value.term == "advection"


def test_run2d_validates_time_grid(ws):
    """
    Verify the step-count checks.

    Expectations
    ------------
    - T_end not a multiple of dt raises ``ConfigError``.
    - A cadence that does not divide the step count raises ``ConfigError``.
    """
    state = PlanarState(taylor_green_vorticity(ws), ws)
    with pytest.raises(ConfigError):
        run2d(state, mu=0.1, T_end=0.125, dt=0.05)
    with pytest.raises(ConfigError):
        run2d(state, mu=0.1, T_end=0.5, dt=0.05, cadence=3)


def test_project_initial_filters_vertical_and_gradient_parts(grid, ws):
    """
    Verify the projection of slab data onto the limit flow.

    Expectations
    ------------
    - Vertically varying and gradient parts are removed.
    - The vorticity of the remaining Taylor–Green part is returned.
    """
    X, Y, Z = grid.mesh
    tg = taylor_green_velocity(ws, 0.2)
    arrays = np.zeros((3,) + grid.shape)
    arrays[0] = tg[0][:, :, None] + np.cos(X) + 0.3 * np.cos(np.pi * Z)
    arrays[1] = tg[1][:, :, None] + np.cos(Y)
    arrays[2] = np.sin(np.pi * Z)

    state = project_initial(VectorField.from_arrays(grid, arrays), ws)

    np.testing.assert_allclose(state.omega, taylor_green_vorticity(ws, 0.2), atol=1e-12)
    assert state.time == 0.0


def test_inviscid_step_is_reversible(ws):
    """
    Verify time reversibility of the inviscid integrator.

    Expectations
    ------------
    - At μ = 0, 100 steps forward followed by 100 steps with -dt return
      to the initial vorticity within 1e-6.
    """
    omega0 = _mixed_vorticity(ws.grid)
    state = PlanarState(omega0.copy(), ws)
    for _ in range(100):
        state = step2d(state, 0.0, 0.01)
    for _ in range(100):
        state = step2d(state, 0.0, -0.01)

    assert np.max(np.abs(state.omega - omega0)) <= 1e-6
    assert state.time == pytest.approx(0.0, abs=1e-12)
