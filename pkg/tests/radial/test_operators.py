# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------

import numpy as np
import pytest

from src.grid.errors import ConfigError
from src.radial.mesh import RadialField, RadialMesh
from src.radial.operators import flux_matrix, to_banded


# -------------------------------------------------------------------
# Tests
# -------------------------------------------------------------------

def test_mesh_layout():
    """
    Verify the cell-centered radial mesh.

    Expectations
    ------------
    - Nodes at (j + ½)h and faces at (j + 1)h; the last face is S_max.
    - Refinement keeps S_max.
    - Fewer than four nodes is a configuration error.
    """
    mesh = RadialMesh(4, 2.0)
    np.testing.assert_allclose(mesh.nodes, [0.25, 0.75, 1.25, 1.75])
    np.testing.assert_allclose(mesh.faces, [0.5, 1.0, 1.5, 2.0])
    assert mesh.refine(2).h == pytest.approx(0.25)
    with pytest.raises(ConfigError):
        RadialMesh(3, 1.0)
    with pytest.raises(ConfigError):
        RadialMesh(8, 0.0)


def test_flux_matrix_structure():
    """
    Verify the flux matrix.

    Expectations
    ------------
    - Symmetric and tridiagonal.
    - Rows sum to zero except the last one (Dirichlet at S_max).
    """
    mesh = RadialMesh(8, 1.0)
    K = flux_matrix(mesh, np.ones(8))

    np.testing.assert_allclose(K, K.T)
    assert np.count_nonzero(np.triu(K, 2)) == 0
    np.testing.assert_allclose(K.sum(axis=1)[:-1], 0.0, atol=1e-12)
    assert K.sum(axis=1)[-1] < 0


def test_to_banded_layout():
    """
    Verify diagonal-ordered storage.

    Expectations
    ------------
    - Row ``upper - k`` holds diagonal k, aligned as ``solve_banded`` expects.
    """
    A = np.arange(16, dtype=float).reshape(4, 4)
    ab = to_banded(A, 1, 1)
    np.testing.assert_array_equal(ab[1], np.diagonal(A))
    np.testing.assert_array_equal(ab[0, 1:], np.diagonal(A, 1))
    np.testing.assert_array_equal(ab[2, :-1], np.diagonal(A, -1))


def test_energy_matrices(ops):
    """
    Verify the symmetric forms behind the energy identity.

    Expectations
    ------------
    - M is symmetric positive definite and equals DS·A.
    - Q is symmetric positive semidefinite and equals DS·B·D.
    """
    M, Q = ops.M, ops.Q
    DS = ops.D @ ops.S

    np.testing.assert_allclose(M, M.T, atol=1e-12 * np.abs(M).max())
    assert np.linalg.eigvalsh(M).min() > 0
    np.testing.assert_allclose(M, DS @ ops.A, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(Q, Q.T, rtol=1e-10, atol=1e-9 * np.abs(Q).max())
    assert np.linalg.eigvalsh(Q).min() > -1e-8 * np.abs(Q).max()
    np.testing.assert_allclose(Q, DS @ ops.B @ ops.D, rtol=1e-10, atol=1e-9 * np.abs(Q).max())


def test_energy_and_weighted_inner(ops, gaussian_r):
    """
    Verify the energy functional.

    Expectations
    ------------
    - Λ = ½rᵀMr is positive for nonzero r.
    - Λ >= ½⟨r, R⟩_s since the gradient part is nonnegative.
    - The dissipation μrᵀQr is nonnegative.
    """
    energy = ops.energy(gaussian_r)
    assert energy > 0
    assert energy >= 0.5 * ops.weighted_inner(gaussian_r, gaussian_r) - 1e-14
    assert ops.dissipation(gaussian_r) >= 0


def test_biharmonic_annihilates_constants_away_from_boundary(ops):
    """
    Verify that constant R is steady in the interior.

    Expectations
    ------------
    - (B·1)_j = 0 for all rows not coupled to the outer boundary.
    """
    ones = np.ones(ops.mesh.Ns)
    np.testing.assert_allclose((ops.B @ ones)[:-2], 0.0, atol=1e-9)


def test_radial_field_tail_ratio(ops, gaussian_r):
    """
    Verify the tail monitor.

    Expectations
    ------------
    - A decayed Gaussian has a negligible tail ratio.
    - The zero field reports 0.
    - R = P'(ρ̃)r with P' = 2 here.
    """
    f = RadialField(gaussian_r, ops.profile)
    assert f.tail_ratio() < 1e-12
    assert RadialField(np.zeros_like(gaussian_r), ops.profile).tail_ratio() == 0.0
    np.testing.assert_allclose(f.R, 2.0 * gaussian_r)
