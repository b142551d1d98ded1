# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Literal, Tuple, TypeVar

import numpy as np

from .config import SimParams
from .errors import ConfigError, SolverError


# -------------------------------------------------------------------
# Type aliases
# -------------------------------------------------------------------

Parity = Literal["even", "odd"]

# Density floor below which velocity recovery aborts.
RHO_FLOOR = 1e-6

# |T¹|: the vertical torus [-1, 1) has measure 2.
VERTICAL_PERIOD = 2.0


# -------------------------------------------------------------------
# Grid
# -------------------------------------------------------------------

@dataclass(frozen=True)
class SlabGrid:
    """
    Horizontally periodic box [-L, L)² times the vertical torus [-1, 1).

    Parameters
    ----------
    L : float
        Horizontal half-width.
    Nx, Ny, Nz : int
        Number of nodes along each direction.

    Notes
    -----
    Arrays on the grid have shape ``(Nx, Ny, Nz)`` with ``'ij'`` indexing.
    Horizontal wavenumbers are ``2π·fftfreq(N, Δx)``; vertical ones are
    κ_k = πk in FFT order.
    """

    L: float
    Nx: int
    Ny: int
    Nz: int

    @property
    def shape(self) -> Tuple[int, int, int]:
        return (self.Nx, self.Ny, self.Nz)

    @property
    def shape_h(self) -> Tuple[int, int]:
        return (self.Nx, self.Ny)

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.Nx

    @property
    def dy(self) -> float:
        return 2.0 * self.L / self.Ny

    @property
    def dz(self) -> float:
        return VERTICAL_PERIOD / self.Nz

    @property
    def cell_volume(self) -> float:
        return self.dx * self.dy * self.dz

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @cached_property
    def x(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.Nx)

    @cached_property
    def y(self) -> np.ndarray:
        return -self.L + self.dy * np.arange(self.Ny)

    @cached_property
    def z(self) -> np.ndarray:
        return -1.0 + self.dz * np.arange(self.Nz)

    @cached_property
    def xi1(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.Nx, d=self.dx)

    @cached_property
    def xi2(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.Ny, d=self.dy)

    @cached_property
    def kappa(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.Nz, d=self.dz)

    @cached_property
    def mesh_h(self) -> Tuple[np.ndarray, np.ndarray]:
        """Horizontal node coordinates, each of shape ``(Nx, Ny)``."""
        return np.meshgrid(self.x, self.y, indexing="ij")

    @cached_property
    def mesh(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Full node coordinates, each of shape ``(Nx, Ny, Nz)``."""
        return np.meshgrid(self.x, self.y, self.z, indexing="ij")

    @cached_property
    def radius(self) -> np.ndarray:
        """|x_h| on the horizontal grid."""
        X, Y = self.mesh_h
        return np.hypot(X, Y)

    def analysis_mask(self, fraction: float = 0.8) -> np.ndarray:
        """Boolean horizontal mask of K = {|x_h| <= fraction·L}."""
        return self.radius <= fraction * self.L

    def integrate(self, values: np.ndarray) -> float:
        """Rectangle-rule integral over the slab (exact for trigonometric polynomials)."""
        return float(np.sum(values) * self.cell_volume)

    def integrate_h(self, values: np.ndarray, mask: np.ndarray | None = None) -> float:
        """Integral of a horizontal field, optionally restricted to ``mask``."""
        if mask is not None:
            values = np.where(mask, values, 0.0)
        return float(np.sum(values) * self.cell_area)


def make_grid(params: SimParams) -> SlabGrid:
    """
    Discretize the truncated slab described by ``params``.

    Parameters
    ----------
    params : SimParams
        Validated parameters.

    Returns
    -------
    SlabGrid
        Grid with periodic coordinates and wavenumber tables.

    Raises
    ------
    ConfigError
        If a grid size is odd or below 4 (only reachable when ``params`` was
        built with ``model_construct``).

    Examples
    --------
    >>> g = make_grid(make_params(epsilon=0.1, m=1, gamma=2, mu=0.1, L=np.pi,
    ...                           Nx=4, Ny=4, Nz=4, dt=0.01, T_end=1.0))
    >>> g.z.tolist()
    [-1.0, -0.5, 0.0, 0.5]
    """
    for key in ("Nx", "Ny", "Nz"):
        n = getattr(params, key)
        if n < 4 or n % 2:
            raise ConfigError(f"grid size {key}={n} must be even and >= 4", key=key)
    return SlabGrid(L=params.L, Nx=params.Nx, Ny=params.Ny, Nz=params.Nz)


# -------------------------------------------------------------------
# Field containers
# -------------------------------------------------------------------

def reflect_x3(values: np.ndarray) -> np.ndarray:
    """Return v(x_h, -x3) sampled on the same nodes (last axis is x3)."""
    return np.roll(np.flip(values, axis=-1), 1, axis=-1)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """
    Real field on the slab with a declared vertical parity.

    Parameters
    ----------
    grid : SlabGrid
        Supporting grid.
    values : numpy.ndarray
        Array of shape ``grid.shape``.
    parity : {"even", "odd"}, default="even"
        Parity in x3.
    """

    grid: SlabGrid
    values: np.ndarray
    parity: Parity = "even"

    def __post_init__(self) -> None:
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} != grid shape {self.grid.shape}")

    def like(self, values: np.ndarray, parity: Parity | None = None) -> "ScalarField":
        return ScalarField(self.grid, values, parity or self.parity)

    def reflected(self) -> np.ndarray:
        return reflect_x3(self.values)

    def parity_defect(self) -> float:
        """Max deviation from the declared parity."""
        sign = 1.0 if self.parity == "even" else -1.0
        return float(np.max(np.abs(self.values - sign * self.reflected())))


_VECTOR_PARITIES: Tuple[Parity, Parity, Parity] = ("even", "even", "odd")


@dataclass(frozen=True, eq=False)
class VectorField:
    """
    Three-component field; horizontal components even, vertical odd for the
    symmetry class of complete slip.
    """

    components: Tuple[ScalarField, ScalarField, ScalarField]

    @classmethod
    def from_arrays(
        cls,
        grid: SlabGrid,
        arrays: np.ndarray | Tuple[np.ndarray, np.ndarray, np.ndarray],
        parities: Tuple[Parity, Parity, Parity] = _VECTOR_PARITIES,
    ) -> "VectorField":
        return cls(tuple(ScalarField(grid, np.asarray(a, dtype=float), p) for a, p in zip(arrays, parities)))

    @classmethod
    def zeros(cls, grid: SlabGrid) -> "VectorField":
        return cls.from_arrays(grid, np.zeros((3,) + grid.shape))

    @property
    def grid(self) -> SlabGrid:
        return self.components[0].grid

    @property
    def parities(self) -> Tuple[Parity, Parity, Parity]:
        return tuple(c.parity for c in self.components)

    def stack(self) -> np.ndarray:
        """Components as one array of shape ``(3, Nx, Ny, Nz)``."""
        return np.stack([c.values for c in self.components])

    def __getitem__(self, i: int) -> ScalarField:
        return self.components[i]


F = TypeVar("F", ScalarField, VectorField)


def enforce_parity(v: F) -> F:
    """
    Project onto the declared parity class.

    Even part ½(v(x3) + v(-x3)), odd part ½(v(x3) - v(-x3)); the projection
    is linear and idempotent.

    Examples
    --------
    The odd projection of cos(πx3) vanishes; the even projection of
    cos(πx3) + sin(πx3) is cos(πx3).
    """
    if isinstance(v, VectorField):
        return VectorField(tuple(enforce_parity(c) for c in v.components))
    sign = 1.0 if v.parity == "even" else -1.0
    return v.like(0.5 * (v.values + sign * v.reflected()))


def project_arrays(stacked: np.ndarray, parities: Tuple[Parity, ...]) -> np.ndarray:
    """Array-level parity projection of stacked components (first axis)."""
    out = np.empty_like(stacked)
    for i, p in enumerate(parities):
        sign = 1.0 if p == "even" else -1.0
        out[i] = 0.5 * (stacked[i] + sign * reflect_x3(stacked[i]))
    return out


# -------------------------------------------------------------------
# Fluid state
# -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FluidState:
    """
    Density and momentum snapshot of the primitive system.

    Parameters
    ----------
    rho : ScalarField
        Density (even, positive).
    mom : VectorField
        Momentum ρu.
    time : float, default=0.0
        Simulation time.
    """

    rho: ScalarField
    mom: VectorField
    time: float = 0.0

    @property
    def grid(self) -> SlabGrid:
        return self.rho.grid

    def mass(self) -> float:
        return self.grid.integrate(self.rho.values)

    def velocity(self) -> np.ndarray:
        """u = mom/ρ as an array of shape ``(3, Nx, Ny, Nz)``."""
        rho_min = float(np.min(self.rho.values))
        if rho_min < RHO_FLOOR:
            raise SolverError(f"density floor violated: min rho = {rho_min:.3e}", snapshot=self)
        return self.mom.stack() / self.rho.values[None]

    def r_eps(self, rho_tilde: ScalarField, params: SimParams) -> np.ndarray:
        """Scaled density fluctuation (ρ - ρ̃)/ε^m."""
        return (self.rho.values - rho_tilde.values) / params.mach


def make_state(grid: SlabGrid, rho: np.ndarray, mom: np.ndarray, time: float = 0.0) -> FluidState:
    """Wrap raw arrays into a parity-projected ``FluidState``."""
    return FluidState(
        rho=enforce_parity(ScalarField(grid, np.asarray(rho, dtype=float), "even")),
        mom=enforce_parity(VectorField.from_arrays(grid, mom)),
        time=time,
    )

