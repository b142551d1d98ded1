# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

import argparse
import logging
import sys
from typing import Callable, Dict, Optional, Sequence

from src.grid.errors import ConfigError, SolverError

from .config import ExperimentConfig, load_experiment
from .processor import (
    run_2d_limit,
    run_acoustic_study,
    run_convergence,
    run_full,
    run_radial_limit,
    run_static_profile,
)


logger = logging.getLogger("harness")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3

COMMANDS: Dict[str, Callable[[ExperimentConfig, Optional[str]], object]] = {
    "static-profile": lambda cfg, _: run_static_profile(cfg),
    "run-full": lambda cfg, _: run_full(cfg),
    "run-2d": lambda cfg, _: run_2d_limit(cfg),
    "run-radial": lambda cfg, _: run_radial_limit(cfg),
    "acoustic": run_acoustic_study,
    "converge": run_convergence,
}


# -------------------------------------------------------------------
# Argument parsing
# -------------------------------------------------------------------

def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """
    Parse the subcommand and its flags.

    Returns
    -------
    argparse.Namespace
        Attributes: command, config, out, seed, workers, mlflow_tracking_uri.
    """
    p = argparse.ArgumentParser(description="Rotating slab asymptotics: simulations and limit checks")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="Flat YAML experiment document")
        sp.add_argument("--out", help="Override output directory")
        sp.add_argument("--seed", type=int, help="Override the 64-bit seed")
        sp.add_argument("--workers", type=int, help="Override concurrent eps rows")
        if name in ("acoustic", "converge"):
            sp.add_argument("--mlflow-tracking-uri", default=None, help="MLflow tracking URI (optional)")
    return p.parse_args(argv)


# -------------------------------------------------------------------
# Main entry point
# -------------------------------------------------------------------

def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand; YAML values first, explicit flags override.

    Returns
    -------
    int
        0 on success, 2 on a configuration error, 3 on a solver failure.
    """
    args = parse_args(argv)
    try:
        cfg = load_experiment(args.config).with_overrides(
            output_dir=args.out, seed=args.seed, workers=args.workers
        )
        COMMANDS[args.command](cfg, getattr(args, "mlflow_tracking_uri", None))
    except (ConfigError, FileNotFoundError) as exc:
        logger.error("Configuration error: %s", exc)
        return EXIT_CONFIG
    except SolverError as exc:
        term = f" (limiting term: {exc.term})" if exc.term else ""
        logger.error("Solver failure%s: %s", term, exc)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
