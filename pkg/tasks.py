# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------

from invoke import task
import sys
from pathlib import Path
from shutil import which
import shlex


# -------------------------------------------------------------------
# Platform & paths
# -------------------------------------------------------------------

# True on macOS/Linux, False on Windows
IS_POSIX: bool = sys.platform != "win32"

REPO_ROOT: Path = Path(__file__).parent.resolve()

if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))


# -------------------------------------------------------------------
# Pytest / coverage defaults
# -------------------------------------------------------------------

PYTEST_DEFAULTS: str = "-q"
COV_DEFAULTS: str = "--cov=src --cov-report=term-missing"

AREAS = ("grid", "eos", "spectral", "compressible", "acoustic", "limit2d", "radial", "harness")


# -------------------------------------------------------------------
# Internal helpers
# -------------------------------------------------------------------

def _venv_notice() -> None:
    """Print a reminder when no virtual environment is active."""
    if hasattr(sys, "base_prefix") and sys.prefix == sys.base_prefix:
        print("⚠️  You appear to be outside a virtual environment. Continue anyway...")


def _run(c, cmd: str, cwd: Path | None = None) -> None:
    """
    Run a shell command via Invoke, enabling PTY only where supported.

    Parameters
    ----------
    c : invoke.Context
        The Invoke context object.
    cmd : str
        The shell command to run.
    cwd : Path or None, optional
        Working directory to run the command from.
    """
    kwargs = {"pty": IS_POSIX}
    if cwd is not None:
        kwargs["cwd"] = str(cwd)
    print(f"→ {cmd}")
    c.run(cmd, **kwargs)


def _has_cmd(cmd: str) -> bool:
    return which(cmd) is not None


def _to_bool(val: str | bool) -> bool:
    """Parse common truthy strings ('1', 'true', 'yes', 'y', 'on')."""
    if isinstance(val, bool):
        return val
    return str(val).strip().lower() in {"1", "true", "yes", "y", "on"}


def _pytest(c, target: str = "", k: str | None = None, m: str | None = None, extra: str = "") -> None:
    cmd = f"pytest {PYTEST_DEFAULTS} {extra} {target}".strip()
    if k:
        cmd += f' -k "{k}"'
    if m:
        cmd += f' -m "{m}"'
    _run(c, cmd)


def _slab(
    c,
    command: str,
    config: str,
    out: str = "",
    seed: int | None = None,
    workers: int | None = None,
    mlflow_tracking_uri: str = "",
) -> None:
    """
    Run one harness subcommand through ``python -m src.harness.cli``.

    Empty/None options are left out so the YAML values apply.
    """
    cmd = f"{shlex.quote(sys.executable)} -m src.harness.cli {command} --config {shlex.quote(config)}"
    if out:
        cmd += f" --out {shlex.quote(out)}"
    if seed is not None:
        cmd += f" --seed {int(seed)}"
    if workers is not None:
        cmd += f" --workers {int(workers)}"
    if mlflow_tracking_uri.strip():
        cmd += f" --mlflow-tracking-uri {shlex.quote(mlflow_tracking_uri.strip())}"
    _run(c, cmd, cwd=REPO_ROOT)


# ====================================================================
# 🧪 TESTS & QUALITY
# ====================================================================

@task(
    help={
        "k": "Only run tests matching expression (e.g., -k 'radial and not sampling')",
        "m": "Only run tests with marker (e.g., -m slow)",
        "path": "Path to run tests from (default: repo root / tests)",
    }
)
def test(c, k: str | None = None, m: str | None = None, path: str = "") -> None:
    """
    Run unit/integration tests with pytest.

    Parameters
    ----------
    c : invoke.Context
        Invoke context.
    k : str, optional
        Pytest -k expression to select tests.
    m : str, optional
        Pytest -m marker to select tests; ``-m slow`` runs the long sweeps.
    path : str, default=""
        Path to run tests from (empty string runs default test discovery).
    """
    _venv_notice()
    _pytest(c, path, k, m)


@task
def cov(c) -> None:
    """Run tests with coverage on src/."""
    _venv_notice()
    _run(c, f"pytest {PYTEST_DEFAULTS} {COV_DEFAULTS}")


@task(optional=["path"])
def fmt(c, path: str = ".") -> None:
    """Format code with black if available."""
    _venv_notice()
    if _has_cmd("black"):
        _run(c, f"black {shlex.quote(path)}")
    else:
        print("black not installed. Skipping formatting.")


@task
def lint(c) -> None:
    """Lint code with ruff if available."""
    _venv_notice()
    if _has_cmd("ruff"):
        _run(c, "ruff check .")
    else:
        print("ruff not installed. Skipping lint.")


@task
def clean(c) -> None:
    """
    Remove Python caches and build artefacts.

    Notes
    -----
    Handles platform differences (Windows vs POSIX) for deletion commands.
    """
    _venv_notice()
    patterns = [
        "**/__pycache__", "**/*.pyc", "**/*.pyo",
        ".pytest_cache", ".ruff_cache", "dist", "build", "*.egg-info",
        ".coverage", "htmlcov",
    ]
    for p in patterns:
        for path in REPO_ROOT.glob(p):
            if path.is_dir():
                _run(c, f'rmdir /S /Q "{path}"' if not IS_POSIX else f'rm -rf "{path}"')
            else:
                _run(c, f'del /Q "{path}"' if not IS_POSIX else f'rm -f "{path}"')


# ====================================================================
# 🧪 PER-AREA TESTS
# ====================================================================

@task(help={"area": f"One of: {', '.join(AREAS)}", "k": "Pytest -k expression", "m": "Pytest -m marker"})
def area_test(c, area: str, k: str | None = None, m: str | None = None) -> None:
    """Run the tests of one package under tests/<area>."""
    if area not in AREAS:
        raise SystemExit(f"unknown area '{area}', expected one of {AREAS}")
    _venv_notice()
    _pytest(c, f"tests/{area}", k, m)


@task
def grid_test(c) -> None:
    area_test(c, "grid")


@task
def eos_test(c) -> None:
    area_test(c, "eos")


@task
def spectral_test(c) -> None:
    area_test(c, "spectral")


@task
def compressible_test(c) -> None:
    area_test(c, "compressible")


@task
def acoustic_test(c) -> None:
    area_test(c, "acoustic")


@task
def limit2d_test(c) -> None:
    area_test(c, "limit2d")


@task
def radial_test(c) -> None:
    area_test(c, "radial")


@task
def harness_test(c) -> None:
    area_test(c, "harness")


# ====================================================================
# 🧹 UTILS
# ====================================================================

@task
def ensure_dirs(c) -> None:
    """Create the outputs/ and mlruns/ directories if missing."""
    for d in [REPO_ROOT / "outputs", REPO_ROOT / "mlruns"]:
        d.mkdir(parents=True, exist_ok=True)
        print(f"✅ Ensured: {d}")


# ====================================================================
# 🌀 SINGLE RUNS
# ====================================================================

_RUN_HELP = {
    "config": "Flat YAML experiment document",
    "out": "Override output directory (default: output_dir of the document)",
}


@task(help=_RUN_HELP)
def static_profile(c, config: str = "configs/static.yaml", out: str = "") -> None:
    """Solve the static profile and write it with its balance residual."""
    _venv_notice()
    ensure_dirs(c)
    _slab(c, "static-profile", config, out)


@task(help=_RUN_HELP)
def run_full(c, config: str = "configs/single_run.yaml", out: str = "") -> None:
    """Run the compressible solver up to T_end and write diagnostics and snapshots."""
    _venv_notice()
    ensure_dirs(c)
    _slab(c, "run-full", config, out)


@task(help=_RUN_HELP)
def run_2d(c, config: str = "configs/single_run.yaml", out: str = "") -> None:
    """Run the planar vorticity limit."""
    _venv_notice()
    ensure_dirs(c)
    _slab(c, "run-2d", config, out)


@task(help=_RUN_HELP)
def run_radial(c, config: str = "configs/radial.yaml", out: str = "") -> None:
    """Run the radial limit and write its invariants."""
    _venv_notice()
    ensure_dirs(c)
    _slab(c, "run-radial", config, out)


# ====================================================================
# 📉 SWEEPS
# ====================================================================

def _tracking_uri(mlflow_tracking_uri: str, local: bool) -> str:
    """
    Explicit URI as-is; with ``local`` a repo-local file store at <repo>/mlruns.

    Returns an empty string (no tracking) otherwise.
    """
    if mlflow_tracking_uri.strip():
        return mlflow_tracking_uri.strip()
    if _to_bool(local):
        store = (REPO_ROOT / "mlruns").resolve()
        store.mkdir(parents=True, exist_ok=True)
        return store.as_uri()
    return ""


_SWEEP_HELP = {
    **_RUN_HELP,
    "seed": "Override the 64-bit seed",
    "workers": "Override the number of concurrent eps rows",
    "mlflow_tracking_uri": "MLflow tracking URI (default: empty → no tracking)",
    "local_tracking": "Set true to log into the repo-local mlruns/ store",
    "skip_tests": "Set true to skip the area tests first (default: false)",
}


@task(help=_SWEEP_HELP)
def converge(
    c,
    config: str = "configs/anisotropic.yaml",
    out: str = "",
    seed: int | None = None,
    workers: int | None = None,
    mlflow_tracking_uri: str = "",
    local_tracking: bool | str = False,
    skip_tests: bool | str = False,
) -> None:
    """
    Run the compressible tests *first*, then the eps convergence sweep.

    Steps
    -----
    1. (Optional) Run `tests/compressible` via pytest.
    2. Ensure directories exist.
    3. Run the `converge` subcommand; writes convergence.csv and failures.csv.
    """
    _venv_notice()
    if not _to_bool(skip_tests):
        print("🧪 Running compressible-solver tests...")
        compressible_test(c)
    ensure_dirs(c)
    _slab(c, "converge", config, out, seed, workers, _tracking_uri(mlflow_tracking_uri, local_tracking))


@task(help=_SWEEP_HELP)
def acoustic(
    c,
    config: str = "configs/acoustic_m1.yaml",
    out: str = "",
    seed: int | None = None,
    workers: int | None = None,
    mlflow_tracking_uri: str = "",
    local_tracking: bool | str = False,
    skip_tests: bool | str = False,
) -> None:
    """
    Run the acoustic tests *first*, then the local energy decay study.

    Writes decay.csv, forced_decay.csv and decay_fit.csv.
    """
    _venv_notice()
    if not _to_bool(skip_tests):
        print("🧪 Running acoustic tests...")
        acoustic_test(c)
    ensure_dirs(c)
    _slab(c, "acoustic", config, out, seed, workers, _tracking_uri(mlflow_tracking_uri, local_tracking))
