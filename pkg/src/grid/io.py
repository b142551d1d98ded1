# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------

import logging
import os
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import ConfigError
from .fields import ScalarField, SlabGrid


# -------------------------------------------------------------------
# Logger setup
# -------------------------------------------------------------------

logger = logging.getLogger("slab-io")

MAGIC = b"SLABF1"
_PARITY_CODES = {"even": 0, "odd": 1}
_HEADER = np.dtype([("n", "<u4", (3,)), ("parity", "u1")])


# -------------------------------------------------------------------
# Atomic writes
# -------------------------------------------------------------------

def _atomic_write_bytes(path: Path, payload: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)  # Ensure directories exist
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(payload)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


# -------------------------------------------------------------------
# CSV I/O helpers
# -------------------------------------------------------------------

def load_csv(path: str | Path) -> pd.DataFrame:
    """
    Load a CSV table written by :func:`save_csv`.

    Parameters
    ----------
    path : str or pathlib.Path
        Path to the CSV file.

    Returns
    -------
    pd.DataFrame
        Loaded table.
    """

    path = Path(path)
    logger.info("Loading CSV: %s", path)
    return pd.read_csv(path)


def save_csv(df: pd.DataFrame, path: str | Path, index: bool = False) -> Path:
    """
    Save a DataFrame to CSV atomically (temporary file then rename).

    Parameters
    ----------
    df : pd.DataFrame
        Table to save; its column names become the header row.
    path : str or pathlib.Path
        Destination file path.
    index : bool, default=False
        Whether to include the DataFrame index in the output.

    Returns
    -------
    pathlib.Path
        The written path.
    """

    path = Path(path)
    logger.info("Saving CSV: %s (rows=%d)", path, len(df))
    _atomic_write_bytes(path, df.to_csv(index=index).encode("utf-8"))
    return path


# -------------------------------------------------------------------
# Field binary format
# -------------------------------------------------------------------

def save_field(field: ScalarField, path: str | Path) -> Path:
    """
    Write a scalar field in the self-describing ``SLABF1`` binary layout.

    Layout: magic ``SLABF1``, little-endian u32 (Nx, Ny, Nz), u8 parity code
    (0 even, 1 odd), then Nx·Ny·Nz little-endian f64 values, x fastest.
    """
    path = Path(path)
    header = np.zeros(1, dtype=_HEADER)
    header["n"] = field.grid.shape
    header["parity"] = _PARITY_CODES[field.parity]
    body = np.asarray(field.values, dtype="<f8").ravel(order="F")
    logger.info("Saving field: %s (shape=%s, parity=%s)", path, field.grid.shape, field.parity)
    _atomic_write_bytes(path, MAGIC + header.tobytes() + body.tobytes())
    return path


def load_field(path: str | Path, L: float) -> ScalarField:
    """
    Read a field written by :func:`save_field`.

    Parameters
    ----------
    path : str or pathlib.Path
        Binary file.
    L : float
        Horizontal half-width of the grid (not stored in the file).

    Raises
    ------
    ConfigError
        If the magic string or the payload size does not match.
    """
    path = Path(path)
    logger.info("Loading field: %s", path)
    raw = path.read_bytes()
    if not raw.startswith(MAGIC):
        raise ConfigError(f"{path}: not a SLABF1 field file")
    offset = len(MAGIC)
    header = np.frombuffer(raw, dtype=_HEADER, count=1, offset=offset)[0]
    nx, ny, nz = (int(n) for n in header["n"])
    parity = {v: k for k, v in _PARITY_CODES.items()}.get(int(header["parity"]))
    if parity is None:
        raise ConfigError(f"{path}: unknown parity code {int(header['parity'])}")
    offset += _HEADER.itemsize
    values = np.frombuffer(raw, dtype="<f8", offset=offset)
    if values.size != nx * ny * nz:
        raise ConfigError(f"{path}: expected {nx * ny * nz} values, found {values.size}")
    grid = SlabGrid(L=L, Nx=nx, Ny=ny, Nz=nz)
    return ScalarField(grid, values.reshape((nx, ny, nz), order="F").astype(float), parity)


def field_to_frame(field: ScalarField) -> pd.DataFrame:
    """One row per node with columns x, y, z, value (x fastest)."""
    X, Y, Z = field.grid.mesh
    return pd.DataFrame(
        {
            "x": X.ravel(order="F"),
            "y": Y.ravel(order="F"),
            "z": Z.ravel(order="F"),
            "value": field.values.ravel(order="F"),
        }
    )


def export_field_csv(field: ScalarField, path: str | Path) -> Path:
    """Export a field as CSV with columns x, y, z, value."""
    return save_csv(field_to_frame(field), path)


def planar_to_field(grid: SlabGrid, values2d: np.ndarray) -> ScalarField:
    """Lift a horizontal array to an x3-independent even field (for snapshots)."""
    return ScalarField(grid, np.repeat(values2d[:, :, None], grid.Nz, axis=2), "even")
