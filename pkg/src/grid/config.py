# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import ConfigError


# -------------------------------------------------------------------
# Logger setup
# -------------------------------------------------------------------

logger = logging.getLogger("slab-grid")


# -------------------------------------------------------------------
# Type aliases
# -------------------------------------------------------------------

Regime = Literal["anisotropic", "isotropic", "acoustic-decay", "single-run"]


# -------------------------------------------------------------------
# Parameter model
# -------------------------------------------------------------------

class SimParams(BaseModel):
    """
    Scaling and numerical parameters of one simulation.

    Parameters
    ----------
    epsilon : float
        Rossby scale ε (> 0). The Mach number behaves like ε^m.
    m : float
        Mach exponent (>= 1).
    gamma : float
        Adiabatic exponent of the pressure law p(ρ) = ρ^γ (> 1).
    mu : float
        Shear viscosity (> 0).
    L : float
        Horizontal half-width of the periodic box [-L, L)².
    Nx, Ny, Nz : int
        Grid sizes, even and at least 4.
    dt : float
        Time step (> 0).
    T_end : float
        Final time (>= 0).
    alpha : float, default=0.5
        Exponent of the cut-off family χ_ε.
    delta : float, default=0.05
        Mollification scale.

    Notes
    -----
    Instances are frozen. Use :func:`make_params` to get a ``ConfigError``
    naming the offending key instead of a raw pydantic ``ValidationError``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    epsilon: float = Field(..., gt=0, description="Rossby scale ε (> 0).")
    m: float = Field(..., ge=1, description="Mach exponent (>= 1).")
    gamma: float = Field(..., gt=1, description="Adiabatic exponent (> 1).")
    mu: float = Field(..., gt=0, description="Shear viscosity (> 0).")
    L: float = Field(..., gt=0, description="Horizontal half-width of the box.")
    Nx: int = Field(..., description="Grid size along x1 (even, >= 4).")
    Ny: int = Field(..., description="Grid size along x2 (even, >= 4).")
    Nz: int = Field(..., description="Grid size along x3 (even, >= 4).")
    dt: float = Field(..., gt=0, description="Time step (> 0).")
    T_end: float = Field(..., ge=0, description="Final time (>= 0).")
    alpha: float = Field(0.5, ge=0, description="Cut-off exponent for χ_ε.")
    delta: float = Field(0.05, gt=0, description="Mollification scale.")

    @field_validator("Nx", "Ny", "Nz")
    @classmethod
    def _even_and_large(cls, value: int) -> int:
        if value < 4 or value % 2:
            raise ValueError(f"grid size must be even and >= 4, got {value}")
        return value

    @property
    def mach(self) -> float:
        """ε^m, the Mach scale."""
        return self.epsilon**self.m

    def replace(self, **changes: Any) -> "SimParams":
        """Return a validated copy with ``changes`` applied."""
        return make_params(**{**self.model_dump(), **changes})


# -------------------------------------------------------------------
# Builders / loaders
# -------------------------------------------------------------------

def make_params(**values: Any) -> SimParams:
    """
    Build ``SimParams`` and translate validation failures.

    Raises
    ------
    ConfigError
        If any field is missing or violates its constraint; the message names
        the first offending key.
    """
    try:
        return SimParams(**values)
    except ValidationError as exc:
        first = exc.errors()[0]
        key = ".".join(str(part) for part in first.get("loc", ())) or "<root>"
        if first.get("type") == "missing":
            raise ConfigError(f"missing required key '{key}'", key=key) from exc
        raise ConfigError(f"invalid value for '{key}': {first.get('msg')}", key=key) from exc


def load_yaml_params(path: str | Path) -> SimParams:
    """
    Load ``SimParams`` from a YAML mapping.

    Parameters
    ----------
    path : str or pathlib.Path
        YAML file holding the parameter keys at top level.

    Returns
    -------
    SimParams
        Validated parameters.
    """
    with open(path, "r", encoding="utf-8") as f:
        data: Dict[str, Any] = yaml.safe_load(f) or {}
    return make_params(**data)


# -------------------------------------------------------------------
# Hypothesis checks (warnings only)
# -------------------------------------------------------------------

def check_hypotheses(params: SimParams, regime: Regime) -> list[str]:
    """
    Log, never raise, when parameters leave the range covered by the limit theorems.

    Parameters
    ----------
    params : SimParams
        Parameters to inspect.
    regime : {"anisotropic", "isotropic", "acoustic-decay", "single-run"}
        Experiment regime.

    Returns
    -------
    list of str
        The warning messages that were logged.
    """
    notes: list[str] = []
    if regime == "anisotropic":
        if params.gamma <= 1.5:
            notes.append(f"gamma={params.gamma} <= 3/2: outside the anisotropic limit hypotheses")
        if params.m <= 10:
            notes.append(f"m={params.m} <= 10: convergence is checked as a trend only")
    elif regime == "isotropic":
        if params.gamma <= 3:
            notes.append(f"gamma={params.gamma} <= 3: outside the isotropic limit hypotheses")
        if params.m != 1:
            notes.append(f"m={params.m}: the isotropic limit is stated for m = 1")
    for note in notes:
        logger.warning(note)
    return notes
