# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .mesh import RadialMesh, RadialProfile


# -------------------------------------------------------------------
# Flux matrices
# -------------------------------------------------------------------

def flux_matrix(mesh: RadialMesh, coefficient_faces: np.ndarray) -> np.ndarray:
    """
    Symmetric tridiagonal K with (K f)_j = F_{j+½} - F_{j-½}.

    F_{j+½} = c_{j+½}s_{j+½}(f_{j+1} - f_j)/h on interior faces, zero flux
    at the axis and the one-sided difference to f = 0 over the half cell
    at S_max.
    """
    n, h = mesh.Ns, mesh.h
    w = mesh.faces * coefficient_faces / h
    w[-1] = mesh.s_max * coefficient_faces[-1] / (0.5 * h)

    K = np.zeros((n, n))
    idx = np.arange(n - 1)
    K[idx, idx + 1] = w[:-1]
    K[idx + 1, idx] = w[:-1]
    K[np.arange(n), np.arange(n)] = -(w + np.concatenate([[0.0], w[:-1]]))
    return K


def to_banded(matrix: np.ndarray, lower: int, upper: int) -> np.ndarray:
    """Diagonal-ordered storage for ``scipy.linalg.solve_banded``."""
    n = matrix.shape[0]
    ab = np.zeros((lower + upper + 1, n))
    for k in range(-lower, upper + 1):
        diag = np.diagonal(matrix, offset=k)
        if k >= 0:
            ab[upper - k, k:] = diag
        else:
            ab[upper - k, : n + k] = diag
    return ab


# -------------------------------------------------------------------
# Operators of the radial limit equation
# -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RadialOperators:
    """
    Discrete operators of ∂_t(r - div_h(ρ̃∇_h R)) + μΔ_h²R = 0, R = P'(ρ̃)r.

    With S = diag(s_j h), D = diag(P'(ρ̃_j)), K the ρ̃-weighted flux matrix
    and K₁ the unweighted one:

    - A = I - S⁻¹KD  (the operator of the initial-data identity)
    - Δ_s = S⁻¹K₁, B = Δ_s² (Dirichlet R = Δ_sR = 0 at S_max)
    - M = SD - DKD   (symmetric positive definite, M = DS·A)
    - Q = D K₁ S⁻¹ K₁ D (symmetric positive semidefinite, Q = DS·B·D)
    """

    profile: RadialProfile
    mu: float

    @property
    def mesh(self) -> RadialMesh:
        return self.profile.mesh

    @cached_property
    def S(self) -> np.ndarray:
        return np.diag(self.mesh.cell_weights)

    @cached_property
    def D(self) -> np.ndarray:
        return np.diag(self.profile.Pp_nodes)

    @cached_property
    def K(self) -> np.ndarray:
        return flux_matrix(self.mesh, self.profile.rho_faces)

    @cached_property
    def K1(self) -> np.ndarray:
        return flux_matrix(self.mesh, np.ones(self.mesh.Ns))

    @cached_property
    def L(self) -> np.ndarray:
        """(1/s)∂_s(sρ̃∂_s(P'r))."""
        return (self.K @ self.D) / self.mesh.cell_weights[:, None]

    @cached_property
    def A(self) -> np.ndarray:
        return np.eye(self.mesh.Ns) - self.L

    @cached_property
    def laplacian(self) -> np.ndarray:
        return self.K1 / self.mesh.cell_weights[:, None]

    @cached_property
    def B(self) -> np.ndarray:
        return self.laplacian @ self.laplacian

    @cached_property
    def M(self) -> np.ndarray:
        return self.S @ self.D - self.D @ self.K @ self.D

    @cached_property
    def Q(self) -> np.ndarray:
        return self.D @ self.K1 @ np.diag(1.0 / self.mesh.cell_weights) @ self.K1 @ self.D

    # ---------------------------------------------------------------
    # Inner products and energy
    # ---------------------------------------------------------------
    def weighted_inner(self, f: np.ndarray, g: np.ndarray) -> float:
        """⟨f, g⟩_s = Σ f_j g_j P'(ρ̃_j) s_j h."""
        return float(np.sum(f * g * self.profile.Pp_nodes * self.mesh.cell_weights))

    def energy(self, r: np.ndarray) -> float:
        """Λ = ½⟨r, R⟩_s + ½Σ ρ̃|δ_sR|² s h, equal to ½rᵀMr."""
        return 0.5 * float(r @ self.M @ r)

    def dissipation(self, r: np.ndarray) -> float:
        """μ∫|Δ_sR|² s ds in discrete form, equal to μ rᵀQr."""
        return self.mu * float(r @ self.Q @ r)

    # ---------------------------------------------------------------
    # Crank–Nicolson systems
    # ---------------------------------------------------------------
    def crank_nicolson(self, dt: float) -> tuple[np.ndarray, np.ndarray]:
        """Banded left matrix (2, 2) and dense right matrix of one step."""
        BD = self.mu * self.B @ self.D
        left = self.A + 0.5 * dt * BD
        right = self.A - 0.5 * dt * BD
        return to_banded(left, 2, 2), right
