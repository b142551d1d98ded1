# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------

from itertools import combinations

import numpy as np
import pytest

from src.compressible.rhs import ALL_TERMS, SolverContext, eval_rhs, momentum_terms_hat
from src.compressible.stepper import LinearPropagator, Stepper, cfl_limits, step
from src.grid.errors import SolverError
from src.grid.fields import make_state, project_arrays
from src.limit2d.planar import PlanarState, vorticity_rhs
from src.spectral.operators import random_field

TERM_SUBSETS = [frozenset(c) for n in range(len(ALL_TERMS) + 1) for c in combinations(sorted(ALL_TERMS), n)]


# -------------------------------------------------------------------
# Tests
# -------------------------------------------------------------------

def test_static_state_has_zero_rhs(rest_state, rotating_profile, params, ws):
    """
    Verify that the static profile is an equilibrium of the discrete system.

    Expectations
    ------------
    - Every momentum term vanishes at ρ = ρ̃, m = 0.
    - The continuity right-hand side vanishes.
    """
    bundle = eval_rhs(rest_state, rotating_profile, params, ws)

    assert set(bundle.terms) == set(ALL_TERMS)
    for name in ("pressure", "centrifugal"):
        np.testing.assert_allclose(bundle.terms[name], 0.0, atol=1e-12)
    np.testing.assert_allclose(bundle.dmom_dt.stack(), 0.0, atol=1e-12)
    np.testing.assert_allclose(bundle.drho_dt.values, 0.0, atol=1e-12)


def test_static_state_is_steady_under_step(rest_state, rotating_profile, params, ws):
    """
    Verify that one step leaves the static state unchanged.

    Expectations
    ------------
    - Density and momentum are unchanged to round-off.
    - Time advances by dt.
    """
    nxt = step(rest_state, rotating_profile, params, ws)

    np.testing.assert_allclose(nxt.rho.values, rest_state.rho.values, atol=1e-12)
    np.testing.assert_allclose(nxt.mom.stack(), 0.0, atol=1e-12)
    assert nxt.time == pytest.approx(params.dt)


def test_coriolis_term_on_uniform_flow(flat_profile, params, grid, ws):
    """
    Verify the sign of the Coriolis force.

    Expectations
    ------------
    - For m = (1, 0, 0) on ρ ≡ 1 the only force is -ε^{-1} e3 × m = (0, -1/ε, 0).
    """
    mom = np.zeros((3,) + grid.shape)
    mom[0] = 1.0
    state = make_state(grid, np.ones(grid.shape), mom)

    bundle = eval_rhs(state, flat_profile, params, ws)
    dm = bundle.dmom_dt.stack()

    np.testing.assert_allclose(dm[0], 0.0, atol=1e-12)
    np.testing.assert_allclose(dm[1], -1.0 / params.epsilon, atol=1e-12)
    np.testing.assert_allclose(dm[2], 0.0, atol=1e-12)


def test_include_subset_restricts_terms(vortex_state, flat_profile, params, ws):
    """
    Verify term selection.

    Expectations
    ------------
    - Only the requested terms are evaluated.
    - Unknown names are rejected.
    """
    bundle = eval_rhs(vortex_state, flat_profile, params, ws, include=frozenset({"viscous"}))
    assert set(bundle.terms) == {"viscous"}
    with pytest.raises(ValueError):
        eval_rhs(vortex_state, flat_profile, params, ws, include=frozenset({"gravity"}))


def test_linear_propagator_is_unitary(flat_profile, params, grid, ws, rng):
    """
    Verify that the exact acoustic/Coriolis flow conserves the quadratic energy.

    Expectations
    ------------
    - ‖(c0 ε^{-m} σ̂, m̂)‖ is unchanged by the propagator.
    - The mean density mode is held fixed.
    """
    ctx = SolverContext(ws, flat_profile, params)
    prop = LinearPropagator(ctx, 0.3)
    stacked = rng.standard_normal((4,) + grid.shape) + 1j * rng.standard_normal((4,) + grid.shape)

    out = prop.apply_hat(stacked)

    a = np.sqrt(ctx.c0sq) / params.mach
    before = a**2 * np.sum(np.abs(stacked[0]) ** 2) + np.sum(np.abs(stacked[1:]) ** 2)
    after = a**2 * np.sum(np.abs(out[0]) ** 2) + np.sum(np.abs(out[1:]) ** 2)
    assert after == pytest.approx(before, rel=1e-10)
    assert out[0, 0, 0, 0] == stacked[0, 0, 0, 0]


def test_cfl_violation_names_limiting_term(vortex_state, flat_profile, params, ws):
    """
    Verify the CFL guard.

    Expectations
    ------------
    - A step far above the viscous limit raises ``SolverError``.
    - ``term`` names the viscous term and the state is attached.
    """
    big = params.replace(dt=1.0, T_end=1.0)
    with pytest.raises(SolverError) as exc:
        step(vortex_state, flat_profile, big, ws)
    assert exc.value.term == "viscous"
    assert exc.value.snapshot is vortex_state


def test_cfl_limits_of_rest_state(vortex_state, flat_profile, params, ws):
    """
    Verify the individual CFL limits.

    Expectations
    ------------
    - The viscous limit is Δx²/(4μ) with the smallest spacing.
    - The acoustic remainder is unconstrained on a uniform background.
    """
    stepper = Stepper(flat_profile, params, ws)
    sigma = vortex_state.rho.values - 1.0
    limits = cfl_limits(stepper.ctx, sigma, vortex_state.mom.stack())

    dz = vortex_state.grid.dz
    dx = min(vortex_state.grid.dx, dz)
    assert limits.viscous == pytest.approx(dx**2 / (4 * params.mu))
    assert np.isinf(limits.acoustic_remainder)


def _perturbed_state(profile, grid):
    X, Y, _ = grid.mesh
    rho = profile.rho_tilde.values + 0.01 * np.cos(X)
    mom = np.zeros((3,) + grid.shape)
    mom[0] = 0.1 * np.sin(X)
    mom[1] = 0.05 * np.cos(Y)
    return make_state(grid, rho, mom)


@pytest.mark.parametrize("include", TERM_SUBSETS, ids=lambda s: "+".join(sorted(s)) or "none")
def test_step_agrees_with_rhs_for_every_term_subset(include, rotating_profile, params, grid, ws):
    """
    Verify that one short step moves the state along ``eval_rhs``.

    Expectations
    ------------
    - (ρ(dt) - ρ)/dt matches drho_dt and (m(dt) - m)/dt matches dmom_dt,
      whichever terms are selected; continuity is never dropped.
    """
    fine = params.replace(dt=1e-5)
    state = _perturbed_state(rotating_profile, grid)

    bundle = eval_rhs(state, rotating_profile, fine, ws, include=include)
    nxt = Stepper(rotating_profile, fine, ws, include).step_state(state)

    drho = (nxt.rho.values - state.rho.values) / fine.dt
    dmom = (nxt.mom.stack() - state.mom.stack()) / fine.dt
    expected_rho = bundle.drho_dt.values
    expected_mom = bundle.dmom_dt.stack()
    np.testing.assert_allclose(drho, expected_rho, atol=1e-3 * np.max(np.abs(expected_rho)) + 1e-8)
    np.testing.assert_allclose(dmom, expected_mom, atol=1e-3 * np.max(np.abs(expected_mom)) + 1e-8)


def test_density_moves_without_pressure(flat_profile, params, grid, ws):
    """
    Verify continuity when the pressure term is switched off.

    Expectations
    ------------
    - For m = (0.1 sin x, 0, 0) on ρ ≡ 1 one step of dt = 0.01 changes ρ
      by about dt·max|div m| = 1e-3.
    """
    X, _, _ = grid.mesh
    mom = np.zeros((3,) + grid.shape)
    mom[0] = 0.1 * np.sin(X)
    state = make_state(grid, np.ones(grid.shape), mom)

    nxt = step(state, flat_profile, params, ws, include=frozenset({"convection", "viscous"}))

    change = np.max(np.abs(nxt.rho.values - 1.0))
    assert change == pytest.approx(params.dt * 0.1, rel=0.05)
    assert np.sum(nxt.rho.values) == pytest.approx(np.sum(state.rho.values), rel=1e-14)


def test_static_state_is_preserved_over_many_steps(rest_state, rotating_profile, params, ws):
    """
    Verify that the static state is an exact equilibrium of the stepper.

    Expectations
    ------------
    - After 100 steps ‖ρ - ρ̃‖∞ <= 1e-8 and the momentum stays at rest.
    """
    stepper = Stepper(rotating_profile, params, ws)
    sigma, mom = np.zeros(rest_state.grid.shape), rest_state.mom.stack()
    for _ in range(100):
        sigma, mom = stepper.advance(sigma, mom)

    assert np.max(np.abs(sigma)) <= 1e-8
    assert np.max(np.abs(mom)) <= 1e-8


def test_parity_survives_many_steps(rotating_profile, params, grid, ws, rng):
    """
    Verify that the dynamics keep the vertical parity class by themselves.

    Expectations
    ------------
    - After 100 steps from x₃-dependent data the unprojected right-hand side
      differs from its parity projection by at most 1e-10.
    """
    stepper = Stepper(rotating_profile, params, ws)
    sigma = 0.01 * random_field(ws, rng, "even", slope=2.0).values
    mom = 0.05 * np.stack([random_field(ws, rng, p, slope=2.0).values for p in ("even", "even", "odd")])
    for _ in range(100):
        sigma, mom = stepper.advance(sigma, mom)

    raw = ws.ifft(sum(momentum_terms_hat(stepper.ctx, sigma, mom).values()))
    defect = np.max(np.abs(raw - project_arrays(raw, ("even", "even", "odd"))))
    assert defect <= 1e-10 * max(1.0, np.max(np.abs(raw)))


def test_rhs_curl_matches_planar_vorticity_rhs(flat_profile, params, grid, ws):
    """
    Verify the slab right-hand side against the planar limit on 2D data.

    Expectations
    ------------
    - For ρ ≡ 1 and a divergence-free x₃-independent velocity with modes
      up to 2, curl_h of convection + viscous equals -U·∇ω + μΔω to 1e-10.
    """
    X, Y = grid.mesh_h
    psi = np.sin(X) * np.sin(2 * Y) + 0.5 * np.cos(2 * X + Y)
    U = ws.grad_perp_h(psi)
    mom = np.zeros((3,) + grid.shape)
    mom[:2] = U[:, :, :, None]
    state = make_state(grid, np.ones(grid.shape), mom)

    bundle = eval_rhs(state, flat_profile, params, ws, include=frozenset({"convection", "viscous"}))
    planar = vorticity_rhs(PlanarState(ws.laplacian_h(psi), ws), params.mu)

    np.testing.assert_allclose(ws.curl_h(bundle.dmom_dt.stack()[:2, :, :, 0]), planar, atol=1e-10)
