# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

import numpy as np

from src.grid.fields import SlabGrid


# -------------------------------------------------------------------
# Wavenumber helpers
# -------------------------------------------------------------------

def _mode_numbers(n: int) -> np.ndarray:
    return np.fft.fftfreq(n) * n


def _without_nyquist(k: np.ndarray) -> np.ndarray:
    """Copy of ``k`` with the Nyquist entry zeroed (keeps derivatives real)."""
    out = k.copy()
    out[len(k) // 2] = 0.0
    return out


# -------------------------------------------------------------------
# Workspace
# -------------------------------------------------------------------

class SpectralWorkspace:
    """
    Transform tables for one slab grid.

    Parameters
    ----------
    grid : SlabGrid
        Grid the workspace serves.

    Notes
    -----
    - Derivative wavenumbers ``k1, k2, k3`` have their Nyquist entries
      zeroed; the Helmholtz projector uses the same tables so that the
      divergence of a projected field vanishes to round-off.
    - ``ksq_full`` keeps the Nyquist entries and is used by the Laplacian
      and the mollifier.
    - ``mask`` is the 2/3 rule: mode numbers ``|n| < N/3`` in every direction.
    - One workspace per thread of execution; the arrays are read-only, but
      callers should not share a workspace across re-entrant pipelines.
    """

    def __init__(self, grid: SlabGrid):
        self.grid = grid
        nx, ny, nz = grid.shape

        self.k1 = _without_nyquist(grid.xi1)[:, None, None]
        self.k2 = _without_nyquist(grid.xi2)[None, :, None]
        self.k3 = _without_nyquist(grid.kappa)[None, None, :]
        self.ksq = np.broadcast_to(self.k1**2 + self.k2**2 + self.k3**2, grid.shape).copy()
        self.ksq_full = (
            grid.xi1[:, None, None] ** 2 + grid.xi2[None, :, None] ** 2 + grid.kappa[None, None, :] ** 2
        )
        self.mask = (
            (np.abs(_mode_numbers(nx))[:, None, None] < nx / 3)
            & (np.abs(_mode_numbers(ny))[None, :, None] < ny / 3)
            & (np.abs(_mode_numbers(nz))[None, None, :] < nz / 3)
        )

        # Horizontal (planar) tables, shape (Nx, 1) and (1, Ny).
        self.h1 = self.k1[:, :, 0]
        self.h2 = self.k2[:, :, 0]
        self.hsq = np.broadcast_to(self.h1**2 + self.h2**2, grid.shape_h).copy()
        self.hsq_full = grid.xi1[:, None] ** 2 + grid.xi2[None, :] ** 2
        self.mask_h = self.mask[:, :, 0]

        self._inv_ksq = np.divide(1.0, self.ksq, out=np.zeros_like(self.ksq), where=self.ksq > 0)
        self._inv_hsq = np.divide(1.0, self.hsq, out=np.zeros_like(self.hsq), where=self.hsq > 0)

    # ---------------------------------------------------------------
    # Transforms
    # ---------------------------------------------------------------
    @staticmethod
    def fft(values: np.ndarray) -> np.ndarray:
        """Forward transform over the last three axes."""
        return np.fft.fftn(values, axes=(-3, -2, -1))

    @staticmethod
    def ifft(hat: np.ndarray) -> np.ndarray:
        return np.fft.ifftn(hat, axes=(-3, -2, -1)).real

    @staticmethod
    def fft2(values: np.ndarray) -> np.ndarray:
        """Forward transform over the last two axes (planar fields)."""
        return np.fft.fft2(values, axes=(-2, -1))

    @staticmethod
    def ifft2(hat: np.ndarray) -> np.ndarray:
        return np.fft.ifft2(hat, axes=(-2, -1)).real

    # ---------------------------------------------------------------
    # Slab operators (transform side)
    # ---------------------------------------------------------------
    def grad_hat(self, hat: np.ndarray) -> np.ndarray:
        return np.stack([1j * self.k1 * hat, 1j * self.k2 * hat, 1j * self.k3 * hat])

    def div_hat(self, vhat: np.ndarray) -> np.ndarray:
        return 1j * (self.k1 * vhat[0] + self.k2 * vhat[1] + self.k3 * vhat[2])

    def project_hat(self, vhat: np.ndarray) -> np.ndarray:
        """Helmholtz projection ``v - k (k·v)/|k|²``; modes with |k| = 0 pass through."""
        kdotv = (self.k1 * vhat[0] + self.k2 * vhat[1] + self.k3 * vhat[2]) * self._inv_ksq
        return np.stack([vhat[0] - self.k1 * kdotv, vhat[1] - self.k2 * kdotv, vhat[2] - self.k3 * kdotv])

    def potential_hat(self, vhat: np.ndarray) -> np.ndarray:
        """Ψ̂ with ∇Ψ = v - H[v], zero mean."""
        return -1j * (self.k1 * vhat[0] + self.k2 * vhat[1] + self.k3 * vhat[2]) * self._inv_ksq

    def dealiased(self, values: np.ndarray) -> np.ndarray:
        """Transform of ``values`` with the 2/3 mask applied."""
        return self.fft(values) * self.mask

    # ---------------------------------------------------------------
    # Array-level slab helpers
    # ---------------------------------------------------------------
    def grad(self, values: np.ndarray) -> np.ndarray:
        return self.ifft(self.grad_hat(self.fft(values)))

    def div(self, vec: np.ndarray) -> np.ndarray:
        return self.ifft(self.div_hat(self.fft(vec)))

    # ---------------------------------------------------------------
    # Planar operators (arrays of shape (Nx, Ny) or (2, Nx, Ny))
    # ---------------------------------------------------------------
    def grad_h(self, f: np.ndarray) -> np.ndarray:
        fh = self.fft2(f)
        return self.ifft2(np.stack([1j * self.h1 * fh, 1j * self.h2 * fh]))

    def div_h(self, v: np.ndarray) -> np.ndarray:
        vh = self.fft2(v)
        return self.ifft2(1j * (self.h1 * vh[0] + self.h2 * vh[1]))

    def curl_h(self, v: np.ndarray) -> np.ndarray:
        """∂1 v2 - ∂2 v1."""
        vh = self.fft2(v)
        return self.ifft2(1j * (self.h1 * vh[1] - self.h2 * vh[0]))

    def laplacian_h(self, f: np.ndarray) -> np.ndarray:
        return self.ifft2(-self.hsq_full * self.fft2(f))

    def inverse_laplacian_h(self, f: np.ndarray) -> np.ndarray:
        """Zero-mean solution of Δ_h ψ = f (mean of ``f`` discarded)."""
        return self.ifft2(-self._inv_hsq * self.fft2(f))

    def leray_h(self, v: np.ndarray) -> np.ndarray:
        """2D Leray projection; the mean mode passes through."""
        vh = self.fft2(v)
        kdotv = (self.h1 * vh[0] + self.h2 * vh[1]) * self._inv_hsq
        return self.ifft2(np.stack([vh[0] - self.h1 * kdotv, vh[1] - self.h2 * kdotv]))

    def grad_perp_h(self, f: np.ndarray) -> np.ndarray:
        """∇^⊥ f = (-∂2 f, ∂1 f)."""
        return perp(self.grad_h(f))

    def dealias_h(self, f: np.ndarray) -> np.ndarray:
        return self.ifft2(self.fft2(f) * self.mask_h)


def perp(v: np.ndarray) -> np.ndarray:
    """Planar rotation (a, b)^⊥ = (-b, a) on the first axis."""
    return np.stack([-v[1], v[0]])
