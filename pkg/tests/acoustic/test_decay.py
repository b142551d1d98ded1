# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------

import numpy as np
import pytest

from src.acoustic.decay import (
    alpha_window,
    bump,
    check_alpha,
    fit_slope,
    focusing_source_hat,
    forced_local_response,
    local_energy,
    pulse,
    wrap_time,
)
from src.acoustic.waves import acoustic_energy, forced_path_hat, propagate_hat
from src.grid.fields import make_grid
from src.harness.presets import acoustic_data
from src.spectral.operators import random_field
from src.spectral.workspace import SpectralWorkspace


# -------------------------------------------------------------------
# Tests
# -------------------------------------------------------------------

def test_bump_support_and_peak(grid):
    """
    Verify the localizing bump.

    Expectations
    ------------
    - φ = 1 at the origin node.
    - φ = 0 outside the radius and 0 <= φ <= 1 everywhere.
    """
    phi = bump(grid, 1.5)
    origin = (grid.Nx // 2, grid.Ny // 2)

    assert phi[origin] == pytest.approx(1.0)
    assert np.all(phi[grid.radius >= 1.5] == 0.0)
    assert phi.min() >= 0.0 and phi.max() <= 1.0


def test_wrap_time(grid, params):
    """
    Verify the periodic re-entry time.

    Expectations
    ------------
    - (2L - K - R)/√γ.
    """
    expected = (2 * np.pi - 1.0 - 0.5) / np.sqrt(params.gamma)
    assert wrap_time(grid, params, 1.0, 0.5) == pytest.approx(expected)


def test_alpha_window(params):
    """
    Verify the admissible window of the cut-off exponent.

    Expectations
    ------------
    - (1 + m/2, 3(m - 2)/4); empty for small m, open for m = 12.
    - ``check_alpha`` reports False without raising for α outside.
    """
    assert alpha_window(12.0) == pytest.approx((7.0, 7.5))
    low, high = alpha_window(2.0)
    assert low >= high
    assert check_alpha(params) is False
    assert check_alpha(params.replace(m=12.0, alpha=7.2)) is True


def test_local_energy_zero_and_short_time(params, ws, rng):
    """
    Verify the localized time-integrated energy.

    Expectations
    ------------
    - Zero data give zero.
    - Positive for random data.
    - Grows with the final time.
    """
    zero = np.zeros(ws.grid.shape)
    assert local_energy(zero, zero, 1.5, 0.2, params, ws, n_samples=8) == 0.0

    S0 = random_field(ws, rng, "even").values
    Psi0 = random_field(ws, rng, "even").values
    short = local_energy(S0, Psi0, 1.5, 0.1, params, ws, n_samples=16)
    longer = local_energy(S0, Psi0, 1.5, 0.2, params, ws, n_samples=32)

    assert short > 0
    assert longer > short


def test_forced_response_zero_source(params, ws):
    """
    Verify that a vanishing source gives no response.

    Expectations
    ------------
    - The localized energy of the Duhamel response is zero.
    """
    zero = np.zeros(ws.grid.shape)
    assert forced_local_response(zero, zero, 1.5, 0.2, params, ws, n_samples=8) == 0.0


def test_fit_slope_recovers_power():
    """
    Verify the log-log slope fit.

    Expectations
    ------------
    - Exact power laws give their exponent.
    """
    eps = np.array([0.4, 0.2, 0.1])
    assert fit_slope(eps, 3.0 * eps**1.5) == pytest.approx(1.5)


def test_pulse_has_unit_mass():
    """
    Verify the source envelope.

    Expectations
    ------------
    - Integrates to one over its support and vanishes outside.
    """
    s = np.linspace(0.0, 0.3, 3001)
    h = pulse(s, 0.2)

    assert np.trapezoid(h, s) == pytest.approx(1.0, rel=1e-6)
    assert np.all(h[s > 0.2] == 0.0)


def test_focusing_source_builds_up_the_free_wave(params, ws, rng):
    """
    Verify the response to the focusing source.

    Expectations
    ------------
    - Once the pulse is over, the response from rest is the free wave
      that passes through the source data at the focus time.
    """
    gS = random_field(ws, rng, "even").values
    gPsi = random_field(ws, rng, "even").values
    gS_hat, gPsi_hat = ws.fft(gS - gS.mean()), ws.fft(gPsi - gPsi.mean())
    T, focus, duration = 0.2, 0.1, 0.05
    times = np.linspace(0.0, T, 401)
    forcing = (focusing_source_hat(gS_hat, gPsi_hat, s, focus, duration, params, ws) for s in times)
    rest = np.zeros_like(gS_hat)

    *_, (S_hat, Psi_hat) = forced_path_hat(rest, rest, forcing, times, params, ws)
    S_free, Psi_free = propagate_hat(gS_hat, gPsi_hat, T - focus, params, ws)

    scale = np.max(np.abs(ws.ifft(S_free)))
    np.testing.assert_allclose(ws.ifft(S_hat), ws.ifft(S_free), atol=1e-3 * scale)
    np.testing.assert_allclose(ws.ifft(Psi_hat), ws.ifft(Psi_free), atol=1e-3 * np.max(np.abs(ws.ifft(Psi_free))))


@pytest.fixture
def wide_box(params):
    """ε = 0.5, m = 1 on a 64² × 4 box of half-width 16."""
    p = params.replace(L=16.0, Nx=64, Ny=64, Nz=4)
    return p, SpectralWorkspace(make_grid(p))


@pytest.mark.slow
def test_local_energy_is_uniform_over_data(wide_box):
    """
    Verify the local energy decay bound over many random data.

    Expectations
    ------------
    - For 20 random unit data, the local energy divided by ε^m times the
      acoustic energy stays within a factor 3 of the median.
    - Doubling the horizon, still short of the wrap time, changes the
      local energy by less than 10%: the waves have left the bump.
    """
    p, ws = wide_box
    radius, width, T = 1.5, 0.75, 4.0
    assert 2.0 * T / p.mach < wrap_time(ws.grid, p, radius, 4.0 * width)

    rng = np.random.default_rng(7)
    ratios = []
    for i in range(20):
        S0, Psi0 = acoustic_data(ws, rng, width)
        local = local_energy(S0, Psi0, radius, T, p, ws, n_samples=256)
        ratios.append(local / (p.mach * acoustic_energy(S0, Psi0, p, ws)))
        if i < 3:
            longer = local_energy(S0, Psi0, radius, 2.0 * T, p, ws, n_samples=512)
            assert abs(longer - local) <= 0.1 * local

    median = np.median(ratios)
    assert np.all(np.array(ratios) <= 3.0 * median)
    assert np.all(np.array(ratios) >= median / 3.0)
