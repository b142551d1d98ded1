# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------

import numpy as np
import pandas as pd
import pytest

from src.grid.errors import ConfigError
from src.grid.fields import ScalarField
from src.grid.io import MAGIC, export_field_csv, load_csv, load_field, save_csv, save_field


# -------------------------------------------------------------------
# Tests
# -------------------------------------------------------------------

def test_save_csv_writes_header_and_rows(tmp_path):
    """
    Ensure that a table saved to CSV reloads unchanged.

    Expectations
    ------------
    - The destination directory is created on demand.
    - No temporary files are left next to the output.
    """
    df = pd.DataFrame({"time": [0.0, 0.1], "energy": [1.0, 0.9]})
    fp = tmp_path / "nested" / "diag.csv"

    save_csv(df, fp)

    pd.testing.assert_frame_equal(load_csv(fp), df)
    assert [p.name for p in fp.parent.iterdir()] == ["diag.csv"]


def test_field_file_layout(tmp_path, grid):
    """
    Verify the binary field layout byte by byte.

    Expectations
    ------------
    - The file starts with the magic string.
    - Header holds the three sizes and the parity code.
    - The payload has Nx·Ny·Nz doubles in x-fastest order.
    """
    values = np.arange(np.prod(grid.shape), dtype=float).reshape(grid.shape)
    fp = save_field(ScalarField(grid, values, "odd"), tmp_path / "f.slabf")
    raw = fp.read_bytes()

    assert raw.startswith(MAGIC)
    sizes = np.frombuffer(raw, dtype="<u4", count=3, offset=len(MAGIC))
    assert sizes.tolist() == [16, 16, 4]
    assert raw[len(MAGIC) + 12] == 1
    body = np.frombuffer(raw, dtype="<f8", offset=len(MAGIC) + 13)
    assert body.size == values.size
    assert body[1] == values[1, 0, 0]


def test_load_field_restores_values_and_parity(tmp_path, grid, rng):
    """
    Verify that a saved field loads with the same grid, parity and values.

    Expectations
    ------------
    - Values match exactly.
    - Parity and shape are recovered from the header.
    """
    field = ScalarField(grid, rng.standard_normal(grid.shape), "even")
    fp = save_field(field, tmp_path / "f.slabf")

    back = load_field(fp, L=grid.L)

    assert back.parity == "even"
    assert back.grid == grid
    np.testing.assert_array_equal(back.values, field.values)


def test_load_field_rejects_foreign_files(tmp_path):
    """
    Verify that files without the magic string are refused.

    Expectations
    ------------
    - ``ConfigError`` mentioning SLABF1.
    """
    fp = tmp_path / "bad.slabf"
    fp.write_bytes(b"NOTAFIELD")
    with pytest.raises(ConfigError, match="SLABF1"):
        load_field(fp, L=1.0)


def test_export_field_csv_columns(tmp_path, grid):
    """
    Verify the CSV export of a field.

    Expectations
    ------------
    - Columns are x, y, z, value with one row per node.
    """
    fp = export_field_csv(ScalarField(grid, np.ones(grid.shape)), tmp_path / "f.csv")
    df = load_csv(fp)

    assert list(df.columns) == ["x", "y", "z", "value"]
    assert len(df) == np.prod(grid.shape)
