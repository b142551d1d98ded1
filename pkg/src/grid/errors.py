# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------

from __future__ import annotations

from typing import Any, Optional


# -------------------------------------------------------------------
# Exception hierarchy
# -------------------------------------------------------------------

class SlabError(Exception):
    """Base class for every failure raised by the slab packages."""


class ConfigError(SlabError, ValueError):
    """
    Invalid parameters or experiment configuration.

    Parameters
    ----------
    message : str
        Human readable description.
    key : str, optional
        Offending configuration key, when known.
    line : int, optional
        1-based line number in the source document, when known.
    """

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")
        self.key = key
        self.line = line


class DomainError(SlabError, ValueError):
    """Argument outside the domain of an equation-of-state function."""


class SolverError(SlabError, RuntimeError):
    """
    Time integration or linear solve failure.

    Parameters
    ----------
    message : str
        Human readable description.
    term : str, optional
        Name of the limiting term for CFL failures
        ("advection", "acoustic-remainder", "viscous").
    snapshot : Any, optional
        State at the time of failure (usually a ``FluidState``).
    """

    def __init__(self, message: str, term: Optional[str] = None, snapshot: Any = None):
        super().__init__(message)
        self.term = term
        self.snapshot = snapshot
