# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------

import sys
from pathlib import Path

import pytest

from src.harness.cli import EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, main, parse_args


# -------------------------------------------------------------------
# Tests
# -------------------------------------------------------------------

def test_parse_args_flags():
    """
    Verify subcommand flags.

    Expectations
    ------------
    - Overrides parse with their types.
    - The tracking URI exists only on the sweep commands.
    - A missing subcommand exits through argparse.
    """
    args = parse_args(["converge", "--config", "c.yaml", "--seed", "9", "--workers", "2"])
    assert (args.command, args.seed, args.workers, args.mlflow_tracking_uri) == ("converge", 9, 2, None)
    assert not hasattr(parse_args(["run-2d", "--config", "c.yaml"]), "mlflow_tracking_uri")
    with pytest.raises(SystemExit):
        parse_args([])


def test_static_profile_from_sys_argv(write_config, tmp_path, monkeypatch):
    """
    Verify the entry point reading ``sys.argv`` with an output override.

    Expectations
    ------------
    - Exit code 0 and the summary lands in the ``--out`` directory.
    """
    cfg = write_config()
    out = tmp_path / "override"
    monkeypatch.setattr(sys, "argv", ["slab", "static-profile", "--config", str(cfg), "--out", str(out)])

    assert main(sys.argv[1:]) == EXIT_OK
    assert (out / "static_summary.csv").exists()


@pytest.mark.parametrize(
    "changes, drop",
    [
        ({"viscosity": 0.1}, ()),
        ({}, ("mu",)),
        ({"Nx": 15}, ()),
        ({"T_end": 0.055}, ()),
    ],
)
def test_configuration_errors_exit_2(write_config, changes, drop):
    """
    Verify exit code 2 on configuration errors.

    Expectations
    ------------
    - Unknown, missing and invalid keys, and T_end off the dt grid.
    """
    cfg = write_config(drop=drop, **changes)
    assert main(["run-full", "--config", str(cfg)]) == EXIT_CONFIG


def test_missing_file_and_bad_override_exit_2(write_config, tmp_path):
    """
    Verify exit code 2 for a missing document and an invalid flag value.

    Expectations
    ------------
    - Nonexistent --config path.
    - --workers 0.
    """
    assert main(["run-2d", "--config", str(tmp_path / "nope.yaml")]) == EXIT_CONFIG
    assert main(["run-2d", "--config", str(write_config()), "--workers", "0"]) == EXIT_CONFIG


def test_solver_failure_exits_3(write_config, base_document):
    """
    Verify exit code 3 when the solver fails.

    Expectations
    ------------
    - dt = 1 breaks the CFL limit on the first step.
    - The state at failure is written as rho_failed.slabf.
    """
    cfg = write_config(dt=1.0, T_end=1.0)

    assert main(["run-full", "--config", str(cfg)]) == EXIT_SOLVER
    assert (Path(base_document["output_dir"]) / "rho_failed.slabf").exists()
