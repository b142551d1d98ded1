# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from src.grid.errors import DomainError


# -------------------------------------------------------------------
# Type aliases
# -------------------------------------------------------------------

ArrayLike = Union[float, np.ndarray]


def _as_array(value: ArrayLike) -> np.ndarray:
    return np.asarray(value, dtype=float)


def _out(value: np.ndarray) -> ArrayLike:
    return float(value) if value.ndim == 0 else value


def _require(rho: np.ndarray, strict: bool, name: str = "rho") -> None:
    bad = (rho <= 0) if strict else (rho < 0)
    if np.any(bad) or np.any(~np.isfinite(rho)):
        bound = "> 0" if strict else ">= 0"
        raise DomainError(f"{name} must be finite and {bound}; min = {float(np.min(rho)):.6g}")


# -------------------------------------------------------------------
# γ-law pressure
# -------------------------------------------------------------------

@dataclass(frozen=True)
class PressureLaw:
    """
    Isentropic pressure p(ρ) = c·ρ^γ with c = 1.

    Parameters
    ----------
    gamma : float
        Adiabatic exponent (> 1).
    c : float, default=1.0
        Leading coefficient; kept at 1 so that p(1) = 1 and p'(1) = γ.

    Notes
    -----
    Every method accepts scalars or arrays and returns the same kind.
    Closed forms:

    - P(ρ) = ∫₁^ρ p'(z)/z dz = γ/(γ-1)·(ρ^{γ-1} - 1)
    - H(ρ) = ρ∫₁^ρ p(z)/z² dz = (ρ^γ - ρ)/(γ-1)
    - E(ρ, ρ̃) = H(ρ) - H'(ρ̃)(ρ - ρ̃) - H(ρ̃)
    """

    gamma: float
    c: float = 1.0

    def __post_init__(self) -> None:
        if self.gamma <= 1:
            raise DomainError(f"gamma must be > 1, got {self.gamma}")

    def pressure(self, rho: ArrayLike) -> ArrayLike:
        """p(ρ) = ρ^γ; defined for ρ >= 0."""
        r = _as_array(rho)
        _require(r, strict=False)
        return _out(self.c * r**self.gamma)

    def dpressure(self, rho: ArrayLike) -> ArrayLike:
        """p'(ρ) = γρ^{γ-1}."""
        r = _as_array(rho)
        _require(r, strict=False)
        return _out(self.c * self.gamma * r ** (self.gamma - 1.0))

    def pressure_potential(self, rho: ArrayLike) -> ArrayLike:
        """P(ρ) = γ/(γ-1)·(ρ^{γ-1} - 1)."""
        r = _as_array(rho)
        _require(r, strict=True)
        g = self.gamma
        return _out(self.c * g / (g - 1.0) * (r ** (g - 1.0) - 1.0))

    def dpressure_potential(self, rho: ArrayLike) -> ArrayLike:
        """P'(ρ) = p'(ρ)/ρ = γρ^{γ-2}."""
        r = _as_array(rho)
        _require(r, strict=True)
        return _out(self.c * self.gamma * r ** (self.gamma - 2.0))

    def inverse_pressure_potential(self, value: ArrayLike) -> ArrayLike:
        """
        P⁻¹(v) = (1 + (γ-1)/γ·v)^{1/(γ-1)}.

        Raises
        ------
        DomainError
            If ``v`` is below P(0) = -γ/(γ-1), where the inverse is undefined.
        """
        v = _as_array(value)
        g = self.gamma
        base = 1.0 + (g - 1.0) / (g * self.c) * v
        if np.any(base <= 0) or np.any(~np.isfinite(base)):
            raise DomainError(f"value below P(0) = {-g * self.c / (g - 1.0):.6g}")
        return _out(base ** (1.0 / (g - 1.0)))

    def enthalpy_h(self, rho: ArrayLike) -> ArrayLike:
        """H(ρ) = (ρ^γ - ρ)/(γ-1); H(1) = 0."""
        r = _as_array(rho)
        _require(r, strict=True)
        return _out(self.c * (r**self.gamma - r) / (self.gamma - 1.0))

    def denthalpy_h(self, rho: ArrayLike) -> ArrayLike:
        """H'(ρ) = (γρ^{γ-1} - 1)/(γ-1) = P(ρ) + 1."""
        r = _as_array(rho)
        _require(r, strict=True)
        return _out(self.c * (self.gamma * r ** (self.gamma - 1.0) - 1.0) / (self.gamma - 1.0))

    def relative_entropy(self, rho: ArrayLike, rho_tilde: ArrayLike) -> ArrayLike:
        """
        E(ρ, ρ̃) >= 0, zero iff ρ = ρ̃.

        Evaluated as (ρ^γ - ρ̃^γ - γρ̃^{γ-1}(ρ - ρ̃))/(γ-1), where the linear
        parts of H cancel exactly.

        Examples
        --------
        >>> PressureLaw(2.0).relative_entropy(2.0, 1.0)
        1.0
        """
        r = _as_array(rho)
        rt = _as_array(rho_tilde)
        _require(r, strict=True)
        _require(rt, strict=True, name="rho_tilde")
        g = self.gamma
        e = self.c * (r**g - rt**g - g * rt ** (g - 1.0) * (r - rt)) / (g - 1.0)
        return _out(np.maximum(e, 0.0))
