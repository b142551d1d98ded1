# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------

import numpy as np

from src.spectral.workspace import perp


# -------------------------------------------------------------------
# Tests
# -------------------------------------------------------------------

def test_nyquist_zeroed_in_derivative_tables(ws, grid):
    """
    Verify the wavenumber tables.

    Expectations
    ------------
    - Derivative wavenumbers have a zero Nyquist entry.
    - ``ksq_full`` keeps it.
    """
    assert ws.k1[grid.Nx // 2, 0, 0] == 0.0
    assert ws.k3[0, 0, grid.Nz // 2] == 0.0
    assert ws.ksq_full[grid.Nx // 2, 0, 0] == grid.xi1[grid.Nx // 2] ** 2


def test_two_thirds_mask(ws, grid):
    """
    Verify the dealiasing mask.

    Expectations
    ------------
    - Mode 5 of 16 is kept and mode 6 is dropped horizontally.
    - Vertically only |n| <= 1 of 4 is kept.
    """
    assert ws.mask[5, 0, 0]
    assert not ws.mask[6, 0, 0]
    assert ws.mask[0, 0, 1] and ws.mask[0, 0, 3]
    assert not ws.mask[0, 0, 2]


def test_planar_operators(ws, grid):
    """
    Verify planar calculus on ψ = sin(x)sin(2y).

    Expectations
    ------------
    - curl ∇^⊥ψ = Δψ and div ∇^⊥ψ = 0.
    - Δ⁻¹Δψ = ψ.
    - The Leray projection leaves ∇^⊥ψ unchanged and removes ∇ψ.
    """
    X, Y = grid.mesh_h
    psi = np.sin(X) * np.sin(2 * Y)
    u = ws.grad_perp_h(psi)

    np.testing.assert_allclose(ws.curl_h(u), -5.0 * psi, atol=1e-12)
    np.testing.assert_allclose(ws.div_h(u), 0.0, atol=1e-12)
    np.testing.assert_allclose(ws.inverse_laplacian_h(ws.laplacian_h(psi)), psi, atol=1e-12)
    np.testing.assert_allclose(ws.leray_h(u), u, atol=1e-12)
    np.testing.assert_allclose(ws.leray_h(ws.grad_h(psi)), 0.0, atol=1e-12)


def test_perp_rotates_by_quarter_turn():
    """
    Verify (a, b)^⊥ = (-b, a).

    Expectations
    ------------
    - perp of (1, 2) is (-2, 1).
    """
    np.testing.assert_array_equal(perp(np.array([1.0, 2.0])), [-2.0, 1.0])
