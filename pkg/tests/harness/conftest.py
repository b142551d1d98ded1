# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------

from pathlib import Path
from typing import Callable

import pytest
import yaml

from src.harness.config import parse_config


# -------------------------------------------------------------------
# Fixtures
# -------------------------------------------------------------------

@pytest.fixture
def base_document(base_params, tmp_path) -> dict:
    """
    Flat experiment document of a cheap single run.

    Returns
    -------
    dict
        The ``base_params`` keys plus regime, preset and an output directory
        under ``tmp_path``.
    """
    return {
        "regime": "single-run",
        **base_params,
        "preset": "vortex",
        "amplitude": 0.1,
        "output_dir": str(tmp_path / "out"),
    }


@pytest.fixture
def write_config(base_document, tmp_path) -> Callable[..., Path]:
    """
    Factory writing a YAML experiment document to ``tmp_path``.

    Returns
    -------
    callable
        ``write_config(name="config.yaml", drop=(), **changes)`` applies
        ``changes`` to the base document, removes the keys in ``drop`` and
        returns the written path.
    """

    def write(name: str = "config.yaml", drop=(), **changes) -> Path:
        doc = {**base_document, **changes}
        for key in drop:
            doc.pop(key, None)
        path = tmp_path / name
        path.write_text(yaml.safe_dump(doc, sort_keys=False), encoding="utf-8")
        return path

    return write


@pytest.fixture
def make_config(base_document):
    """
    Factory parsing the base document with changes applied.

    Returns
    -------
    callable
        ``make_config(**changes)`` returning an ``ExperimentConfig``.
    """

    def make(**changes):
        doc = {**base_document, **changes}
        return parse_config(yaml.safe_dump(doc, sort_keys=False))

    return make
