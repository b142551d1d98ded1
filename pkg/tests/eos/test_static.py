# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------

import numpy as np
import pytest

from src.eos.potential import TAPER_END, TAPER_START, Potential, g_radial, g_radial_prime, taper
from src.eos.static import solve_static, static_balance_residual, static_bound
from src.grid.config import make_params
from src.grid.fields import make_grid
from src.spectral.workspace import SpectralWorkspace


# -------------------------------------------------------------------
# Tests
# -------------------------------------------------------------------

def test_taper_limits():
    """
    Verify the taper switches from one to zero between its two radii.

    Expectations
    ------------
    - T = 1 inside TAPER_START·L and 0 beyond TAPER_END·L.
    - T is monotone across the transition.
    """
    L = 10.0
    s = np.linspace(0.0, L, 401)
    t, dt = taper(s, L)

    np.testing.assert_allclose(t[s <= TAPER_START * L], 1.0)
    np.testing.assert_allclose(t[s >= TAPER_END * L], 0.0)
    assert np.all(np.diff(t) <= 1e-15)
    assert np.all(dt <= 0)


def test_g_radial_prime_matches_finite_difference():
    """
    Verify g' against a centered difference across the taper.

    Expectations
    ------------
    - Relative agreement within 1e-5 at transition radii.
    """
    L, h = 10.0, 1e-6
    s = np.array([2.0, 8.3, 8.8, 9.2])
    fd = (g_radial(s + h, L) - g_radial(s - h, L)) / (2 * h)
    np.testing.assert_allclose(g_radial_prime(s, L), fd, rtol=1e-5, atol=1e-8)


def test_static_profile_at_least_one(params, grid, ws):
    """
    Verify the closed-form static density.

    Expectations
    ------------
    - ρ̃ >= 1 with equality at the origin.
    - P(ρ̃) = ε^{2(m-1)}G pointwise.
    - The profile is x3-independent.
    """
    pot = Potential.centrifugal(grid)
    profile = solve_static(params, pot, ws)

    assert profile.rho_tilde.values.min() >= 1.0 - 1e-14
    np.testing.assert_allclose(profile.law.pressure_potential(profile.rho_h), pot.values, atol=1e-12)
    np.testing.assert_allclose(profile.rho_tilde.values[..., 0], profile.rho_tilde.values[..., -1])


def test_static_profile_independent_of_epsilon_when_m_is_one(params, grid, ws):
    """
    Verify that ρ̃ does not depend on ε for m = 1.

    Expectations
    ------------
    - Identical profiles for ε = 0.5 and ε = 0.1.
    """
    pot = Potential.centrifugal(grid)
    a = solve_static(params, pot, ws)
    b = solve_static(params.replace(epsilon=0.1), pot, ws)
    np.testing.assert_allclose(a.rho_h, b.rho_h)


def test_static_balance_residual_zero_potential(params, flat_profile, ws):
    """
    Verify that the uniform state is exactly balanced.

    Expectations
    ------------
    - Residual is zero when G ≡ 0.
    """
    assert static_balance_residual(flat_profile, params, ws) == pytest.approx(0.0, abs=1e-12)


def test_static_balance_residual_decreases_with_resolution(base_params):
    """
    Verify that the discrete balance improves under grid refinement.

    Expectations
    ------------
    - The residual at 64² is smaller than at 32².
    """
    residuals = []
    for n in (32, 64):
        p = make_params(**{**base_params, "Nx": n, "Ny": n})
        grid = make_grid(p)
        ws = SpectralWorkspace(grid)
        profile = solve_static(p, Potential.centrifugal(grid), ws)
        residuals.append(static_balance_residual(profile, p, ws))

    assert residuals[1] < residuals[0]


def test_static_bound_scaling(params):
    """
    Verify the growth bound of ρ̃ on the cut-off ball.

    Expectations
    ------------
    - For m = 2 and α = 0.5 the measured growth stays below a constant times ε^{2(m-1-α)}.
    - The returned scale equals ε^{2(m-1-α)}.
    """
    p = params.replace(m=2.0, epsilon=0.1)
    growth, scale = static_bound(p, alpha=0.5, r=1.0)

    assert scale == pytest.approx(0.1 ** (2 * 0.5))
    assert 0 < growth <= 2.0 * scale
