# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.grid.config import Regime, SimParams, make_params
from src.grid.errors import ConfigError


# -------------------------------------------------------------------
# Type aliases
# -------------------------------------------------------------------

Preset = Literal["vortex", "balanced-radial", "unbalanced"]

SIM_KEYS = tuple(SimParams.model_fields)


# -------------------------------------------------------------------
# Experiment configuration
# -------------------------------------------------------------------

class ExperimentConfig(BaseModel):
    """
    One experiment: regime, parameters, ε sweep and initial-data preset.

    Parameters
    ----------
    regime : {"anisotropic", "isotropic", "acoustic-decay", "single-run"}
        Which comparison or study to run.
    params : SimParams
        Base parameters; ``params.epsilon`` is replaced per sweep row.
    epsilon_list : list of float
        Strictly decreasing positive ε values (required for sweeps).
    preset : {"vortex", "balanced-radial", "unbalanced"}, default="vortex"
        Initial-data family.
    amplitude : float, default=0.1
        Amplitude of the preset.
    output_dir : str, default="outputs"
        Directory receiving every table and snapshot.
    cadence : int, default=1
        Steps between diagnostics rows.
    seed : int, default=0
        64-bit seed of the counter-based generator.
    workers : int, default=1
        Concurrent ε rows.
    t_compare : float, optional
        Comparison time; defaults to one eddy turnover (L/π)/amplitude,
        capped at ``T_end``.
    average_window : float, default=0.0
        Length of the window ending at the comparison time over which both
        sides of a convergence row are time-averaged; 0 compares snapshots.
    radial_points : int, optional
        Radial mesh size; defaults to the horizontal grid spacing.
    acoustic_samples : int, default=512
        Time samples of the local-energy quadrature.
    acoustic_radius : float, default=2.0
        Radius K of the localizing bump.
    data_width : float, default=1.0
        Gaussian window width of the acoustic data.

    Notes
    -----
    The document on disk is flat: the ``SimParams`` keys sit next to the
    experiment keys. :func:`parse_config` and :func:`serialize_config`
    convert between the two layouts.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    regime: Regime
    params: SimParams
    epsilon_list: List[float] = Field(default_factory=list)
    preset: Preset = "vortex"
    amplitude: float = Field(0.1, ge=0)
    output_dir: str = "outputs"
    cadence: int = Field(1, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    workers: int = Field(1, ge=1)
    t_compare: Optional[float] = Field(None, gt=0)
    average_window: float = Field(0.0, ge=0)
    radial_points: Optional[int] = Field(None, ge=4)
    acoustic_samples: int = Field(512, ge=8)
    acoustic_radius: float = Field(2.0, gt=0)
    data_width: float = Field(1.0, gt=0)

    @field_validator("epsilon_list")
    @classmethod
    def _strictly_decreasing(cls, value: List[float]) -> List[float]:
        if any(e <= 0 for e in value):
            raise ValueError("all entries must be > 0")
        if any(b >= a for a, b in zip(value, value[1:])):
            raise ValueError(f"must be strictly decreasing, got {value}")
        return value

    @model_validator(mode="after")
    def _sweep_has_epsilons(self) -> "ExperimentConfig":
        if self.regime != "single-run" and not self.epsilon_list:
            raise ValueError(f"regime '{self.regime}' needs a non-empty epsilon_list")
        return self

    # ---------------------------------------------------------------
    # Derived values
    # ---------------------------------------------------------------
    def params_for(self, epsilon: float) -> SimParams:
        return self.params.replace(epsilon=epsilon)

    @property
    def epsilons(self) -> List[float]:
        return list(self.epsilon_list) or [self.params.epsilon]

    @property
    def comparison_time(self) -> float:
        """
        ``t_compare``, else one eddy turnover (L/π)/amplitude rounded down to
        a whole number of steps, never past ``T_end``.
        """
        if self.t_compare is not None:
            return self.t_compare
        if self.amplitude <= 0:
            return self.params.T_end
        turnover = (self.params.L / np.pi) / self.amplitude
        steps = max(1, int(np.floor(turnover / self.params.dt + 1e-9)))
        return min(steps * self.params.dt, self.params.T_end)

    @property
    def comparison_window(self) -> Tuple[float, float]:
        """
        ``(start, end)`` of the averaging window; start equals end for
        snapshot comparisons.

        Raises
        ------
        ConfigError
            If the window reaches before t = 0.
        """
        end = self.comparison_time
        if self.average_window > end:
            raise ConfigError(
                f"average_window={self.average_window} exceeds the comparison time {end}", key="average_window"
            )
        return end - self.average_window, end

    def rng(self, stream: int = 0) -> np.random.Generator:
        """Philox generator keyed by ``seed``; ``stream`` separates independent draws."""
        return np.random.Generator(np.random.Philox(key=self.seed + (stream << 64)))

    def with_overrides(self, **changes: Any) -> "ExperimentConfig":
        """Copy with CLI overrides applied; ``None`` values are ignored."""
        changes = {k: v for k, v in changes.items() if v is not None}
        try:
            return self.model_validate({**self.model_dump(), **changes})
        except ValidationError as exc:
            first = exc.errors()[0]
            key = str(first["loc"][0]) if first.get("loc") else "<root>"
            raise ConfigError(f"invalid override for '{key}': {first.get('msg')}", key=key) from exc


# -------------------------------------------------------------------
# Flat document <-> model
# -------------------------------------------------------------------

EXPERIMENT_KEYS = tuple(k for k in ExperimentConfig.model_fields if k != "params")


def _key_lines(text: str) -> Dict[str, int]:
    """1-based line of every top-level key, from the YAML node marks."""
    try:
        node = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError(f"malformed document: {getattr(exc, 'problem', exc)}", line=line) from exc
    if node is None:
        raise ConfigError("empty configuration document")
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError("configuration must be a flat key: value mapping", line=node.start_mark.line + 1)

    lines: Dict[str, int] = {}
    for key_node, value_node in node.value:
        key, line = key_node.value, key_node.start_mark.line + 1
        if key in lines:
            raise ConfigError(f"duplicate key '{key}'", key=key, line=line)
        if isinstance(value_node, yaml.MappingNode):
            raise ConfigError(f"nested mapping under '{key}'; the document is flat", key=key, line=line)
        lines[key] = line
    return lines


def parse_config(text: str) -> ExperimentConfig:
    """
    Parse and validate a flat experiment document.

    Raises
    ------
    ConfigError
        Malformed YAML, unknown or missing keys, or constraint violations.
        The message carries the line number of the offending key when the
        key is present in the document.
    """
    lines = _key_lines(text)
    raw: Dict[str, Any] = yaml.safe_load(text)

    for key in raw:
        if key not in SIM_KEYS and key not in EXPERIMENT_KEYS:
            raise ConfigError(f"unknown key '{key}'", key=key, line=lines.get(key))

    sim = {k: v for k, v in raw.items() if k in SIM_KEYS}
    rest = {k: v for k, v in raw.items() if k in EXPERIMENT_KEYS}
    eps_list = rest.get("epsilon_list")
    if "epsilon" not in sim and isinstance(eps_list, list) and eps_list:
        sim["epsilon"] = eps_list[0]

    try:
        params = make_params(**sim)
    except ConfigError as exc:
        raise ConfigError(str(exc), key=exc.key, line=lines.get(exc.key or "")) from exc

    try:
        return ExperimentConfig(params=params, **rest)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = first.get("loc", ())
        key = str(loc[0]) if loc else "<root>"
        if first.get("type") == "missing":
            raise ConfigError(f"missing required key '{key}'", key=key) from exc
        raise ConfigError(f"invalid value for '{key}': {first.get('msg')}", key=key, line=lines.get(key)) from exc


def serialize_config(cfg: ExperimentConfig) -> str:
    """Flat YAML document that :func:`parse_config` maps back to ``cfg``."""
    flat: Dict[str, Any] = {"regime": cfg.regime}
    flat.update(cfg.params.model_dump())
    for key in EXPERIMENT_KEYS:
        if key == "regime":
            continue
        value = getattr(cfg, key)
        if value is not None:
            flat[key] = list(value) if key == "epsilon_list" else value
    return yaml.safe_dump(flat, sort_keys=False)


def load_experiment(path: str | Path) -> ExperimentConfig:
    """Read and parse an experiment document from disk."""
    with open(path, "r", encoding="utf-8") as f:
        return parse_config(f.read())
