# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from src.acoustic.decay import check_alpha, fit_slope, forced_local_response, local_energy, wrap_time
from src.acoustic.waves import acoustic_energy, wave_propagate
from src.compressible.diagnostics import (
    averaged_r,
    averaged_velocity_h,
    check_initial_data,
    geostrophic_residuals,
    l2_on_region,
)
from src.compressible.runner import Trajectory, run, step_count
from src.eos.potential import Potential
from src.eos.static import StaticProfile, solve_static, static_balance_residual, static_bound
from src.grid.config import SimParams, check_hypotheses
from src.grid.errors import ConfigError, DomainError, SolverError
from src.grid.fields import FluidState, SlabGrid, VectorField, make_grid
from src.grid.io import export_field_csv, planar_to_field, save_csv, save_field
from src.limit2d.planar import Trajectory2D, project_initial, run2d
from src.radial.mesh import RadialMesh, radial_profile
from src.radial.operators import RadialOperators
from src.radial.reconstruct import geostrophic_invariants, radial_velocity
from src.radial.sampling import to_planar
from src.radial.solver import RadialTrajectory, init_from_data, run_radial, slowest_mode
from src.spectral.workspace import SpectralWorkspace

from .config import ExperimentConfig
from .presets import InitialData, acoustic_data, lift_initial, preset_data


# -------------------------------------------------------------------
# Logger
# -------------------------------------------------------------------
logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")
logger = logging.getLogger("harness")

CONVERGENCE_COLUMNS = ["epsilon", "t_compare", "error_norm", "balance_residual", "energy_drift"]
FAILURE_COLUMNS = ["epsilon", "error"]
DECAY_COLUMNS = ["epsilon", "m", "alpha", "T", "local_energy", "global_energy", "ratio"]
FORCED_COLUMNS = ["epsilon", "T", "forced_energy"]
FIT_COLUMNS = ["m", "slope", "forced_slope", "initial_energy", "max_energy_drift"]

# Analysis region K = {|x_h| <= 0.8 L}.
REGION_FRACTION = 0.8


# -------------------------------------------------------------------
# Shared setup
# -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Setup:
    """Grid, workspace and static profile for one parameter set."""

    params: SimParams
    grid: SlabGrid
    ws: SpectralWorkspace
    profile: StaticProfile


def build_setup(params: SimParams) -> Setup:
    grid = make_grid(params)
    ws = SpectralWorkspace(grid)
    profile = solve_static(params, Potential.centrifugal(grid), ws)
    return Setup(params, grid, ws, profile)


def _out_dir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _lift_velocity(grid: SlabGrid, U0h: np.ndarray) -> VectorField:
    lifted = np.repeat(U0h[:, :, :, None], grid.Nz, axis=3)
    return VectorField.from_arrays(grid, np.concatenate([lifted, np.zeros((1,) + grid.shape)]))


def _steps_for(cfg: ExperimentConfig, params: SimParams, t_end: float) -> int:
    """Step count to ``t_end``; the configured cadence must divide it."""
    n = step_count(params, t_end)
    if n % cfg.cadence:
        raise ConfigError(f"cadence={cfg.cadence} must divide the step count {n}", key="cadence")
    return n


# -------------------------------------------------------------------
# Single runs
# -------------------------------------------------------------------

def run_static_profile(cfg: ExperimentConfig) -> pd.DataFrame:
    """Static profile as binary + CSV, and a one-row summary with the balance residual."""
    params = cfg.params
    setup = build_setup(params)
    out = _out_dir(cfg)

    residual = static_balance_residual(setup.profile, params, setup.ws)
    excess, scale = static_bound(params, params.alpha, 1.0)
    rho = setup.profile.rho_tilde.values
    summary = pd.DataFrame(
        [
            {
                "epsilon": params.epsilon,
                "m": params.m,
                "gamma": params.gamma,
                "rho_min": float(rho.min()),
                "rho_max": float(rho.max()),
                "balance_residual": residual,
                "bound_excess": excess,
                "bound_scale": scale,
            }
        ]
    )
    save_field(setup.profile.rho_tilde, out / "static_rho.slabf")
    export_field_csv(setup.profile.rho_tilde, out / "static_profile.csv")
    save_csv(summary, out / "static_summary.csv")
    logger.info("Static residual %.3e written to %s", residual, out)
    return summary


def run_full(cfg: ExperimentConfig) -> Trajectory:
    """
    One compressible run from the configured preset up to ``T_end``.

    On solver failure the last recorded state is written before re-raising.
    """
    params = cfg.params
    check_hypotheses(params, cfg.regime)
    setup = build_setup(params)
    out = _out_dir(cfg)
    _steps_for(cfg, params, params.T_end)

    data = preset_data(cfg.preset, setup.profile, setup.ws, cfg.amplitude)
    initial = lift_initial(data, setup.profile, params)
    u0 = initial.velocity()
    norms = check_initial_data(data.r0[:, :, None] * np.ones(setup.grid.Nz), u0, setup.profile, params)
    logger.info("Initial data norms: %s", {k: f"{v:.4g}" for k, v in norms.items()})

    try:
        traj = run(initial, setup.profile, params, cadence=cfg.cadence, ws=setup.ws)
    except SolverError as exc:
        if exc.snapshot is not None:
            save_field(exc.snapshot.rho, out / "rho_failed.slabf")
        raise

    save_csv(traj.diagnostics, out / "diagnostics.csv")
    final = traj.final
    save_field(final.rho, out / "rho_final.slabf")
    for i, name in enumerate(("mom1", "mom2", "mom3")):
        save_field(final.mom[i], out / f"{name}_final.slabf")
    return traj


def run_2d_limit(cfg: ExperimentConfig) -> Trajectory2D:
    """Planar limit from the projected preset velocity up to ``T_end``."""
    params = cfg.params
    setup = build_setup(params)
    out = _out_dir(cfg)

    data = preset_data(cfg.preset, setup.profile, setup.ws, cfg.amplitude)
    initial = project_initial(_lift_velocity(setup.grid, data.U0h), setup.ws)
    traj = run2d(initial, params.mu, params.T_end, params.dt, cfg.cadence)

    save_csv(traj.diagnostics, out / "diagnostics_2d.csv")
    save_field(planar_to_field(setup.grid, traj.final.omega), out / "omega_final.slabf")
    return traj


def _radial_operators(cfg: ExperimentConfig, setup: Setup) -> RadialOperators:
    mesh = RadialMesh.for_grid(setup.grid, cfg.radial_points, REGION_FRACTION)
    return RadialOperators(radial_profile(setup.params, mesh), setup.params.mu)


def run_radial_limit(cfg: ExperimentConfig) -> RadialTrajectory:
    """
    Radial limit from the circle-averaged preset data up to ``T_end``.

    Also writes the invariants of the final geostrophic velocity.
    """
    params = cfg.params
    check_hypotheses(params, "isotropic")
    setup = build_setup(params)
    out = _out_dir(cfg)

    data = preset_data(cfg.preset, setup.profile, setup.ws, cfg.amplitude)
    ops = _radial_operators(cfg, setup)
    r_init = init_from_data(data.r0, data.U0h, setup.profile.rho_h, ops, setup.grid, setup.ws)
    rate, _ = slowest_mode(ops)
    logger.info("Slowest radial decay rate %.6e (Ns=%d)", rate, ops.mesh.Ns)

    traj = run_radial(r_init, ops, params.dt, params.T_end, cfg.cadence)
    grad_rho = setup.profile.grad_rho_tilde.stack()[:2, :, :, 0]
    invariants = geostrophic_invariants(radial_velocity(traj.final), setup.grid, setup.ws, grad_rho)

    save_csv(traj.table, out / "radial.csv")
    save_csv(traj.profile_frame(), out / "radial_mesh.csv")
    save_csv(pd.DataFrame([{"slowest_rate": rate, **invariants}]), out / "radial_invariants.csv")
    return traj


# -------------------------------------------------------------------
# Convergence sweep
# -------------------------------------------------------------------

def _in_window(time: float, start: float) -> bool:
    return time >= start - 1e-9 * max(1.0, abs(start))


def window_mean(times: Sequence[float], values: Sequence[np.ndarray]) -> np.ndarray:
    """Trapezoid time mean of sampled arrays; one sample is returned as is."""
    if len(values) == 1:
        return np.asarray(values[0])
    t = np.asarray(times, dtype=float)
    return np.trapezoid(np.stack(values), t, axis=0) / (t[-1] - t[0])


@dataclass(eq=False)
class WindowSampler:
    """
    Step hook collecting ``quantity(state)`` from ``start`` on.

    Only samples inside the window are kept, so a long run costs the
    memory of the window alone.
    """

    start: float
    quantity: Callable[[FluidState], Tuple[np.ndarray, ...]]
    times: List[float] = field(default_factory=list)
    values: List[Tuple[np.ndarray, ...]] = field(default_factory=list)

    def __call__(self, state: FluidState) -> None:
        if _in_window(state.time, self.start):
            self.times.append(state.time)
            self.values.append(self.quantity(state))

    def mean(self) -> Tuple[np.ndarray, ...]:
        if not self.values:
            raise ConfigError("the averaging window holds no step", key="average_window")
        return tuple(window_mean(self.times, list(parts)) for parts in zip(*self.values))


def limit_reference(cfg: ExperimentConfig, setup: Setup, data: InitialData, t: float) -> np.ndarray:
    """
    Limit solution on the horizontal grid, time-averaged over the
    comparison window ending at ``t``.

    U_h of shape ``(2, Nx, Ny)`` for the anisotropic regime, r of shape
    ``(Nx, Ny)`` for the isotropic one.
    """
    n = _steps_for(cfg, setup.params, t)
    start = t - cfg.average_window
    cadence = 1 if cfg.average_window > 0 else max(n, 1)
    if cfg.regime == "anisotropic":
        initial = project_initial(_lift_velocity(setup.grid, data.U0h), setup.ws)
        snapshots = run2d(initial, setup.params.mu, t, setup.params.dt, cadence=cadence).snapshots
        kept = [s for s in snapshots if _in_window(s.time, start)]
        return window_mean([s.time for s in kept], [s.velocity for s in kept])
    ops = _radial_operators(cfg, setup)
    r_init = init_from_data(data.r0, data.U0h, setup.profile.rho_h, ops, setup.grid, setup.ws)
    fields = [f for f in run_radial(r_init, ops, setup.params.dt, t, cadence=cadence).fields if _in_window(f.time, start)]
    return window_mean([f.time for f in fields], [to_planar(f.values, ops.mesh, setup.grid) for f in fields])


def convergence_row(cfg: ExperimentConfig, epsilon: float, reference: np.ndarray, t: float) -> Dict[str, float]:
    """Compressible run at ``epsilon`` compared with the limit on K, both averaged over the same window."""
    params = cfg.params_for(epsilon)
    setup = build_setup(params)
    data = preset_data(cfg.preset, setup.profile, setup.ws, cfg.amplitude)
    initial = lift_initial(data, setup.profile, params)

    def planar_means(state: FluidState) -> Tuple[np.ndarray, np.ndarray]:
        return averaged_r(state, setup.profile, params), averaged_velocity_h(state)

    sampler = WindowSampler(t - cfg.average_window, planar_means)
    traj = run(initial, setup.profile, params, cadence=cfg.cadence, ws=setup.ws, t_end=t, on_step=sampler)
    r, U = sampler.mean()

    mask = setup.grid.analysis_mask(REGION_FRACTION)
    if cfg.regime == "anisotropic":
        error = l2_on_region(U - reference, setup.grid, mask)
        balance = l2_on_region(setup.ws.div_h(U), setup.grid, mask)
    else:
        error = l2_on_region(r - reference, setup.grid, mask)
        balance, _ = geostrophic_residuals(r, U, setup.profile, setup.ws, mask)

    logger.info("eps=%.4g: error=%.4e balance=%.4e", epsilon, error, balance)
    return {
        "epsilon": epsilon,
        "t_compare": t,
        "error_norm": error,
        "balance_residual": balance,
        "energy_drift": traj.energy_drift(),
    }


def _isolated_row(
    cfg: ExperimentConfig, epsilon: float, reference: np.ndarray, t: float
) -> Tuple[Dict[str, float], Optional[Dict[str, object]]]:
    try:
        return convergence_row(cfg, epsilon, reference, t), None
    except (SolverError, DomainError) as exc:
        logger.error("eps=%.4g failed: %s", epsilon, exc)
        failed = {**dict.fromkeys(CONVERGENCE_COLUMNS, np.nan), "epsilon": epsilon, "t_compare": t}
        return failed, {"epsilon": epsilon, "error": str(exc)}


def trend_inversions(values: Sequence[float], tolerance: float = 0.10) -> List[int]:
    """
    Indices where a value ordered by decreasing ε grows beyond ``tolerance``.

    An empty list means the sequence is monotone non-increasing up to the
    tolerated relative inversion.
    """
    v = np.asarray(values, dtype=float)
    return [i for i in range(1, len(v)) if np.isfinite(v[i]) and np.isfinite(v[i - 1]) and v[i] > v[i - 1] * (1 + tolerance)]


def run_convergence(cfg: ExperimentConfig, mlflow_tracking_uri: Optional[str] = None) -> pd.DataFrame:
    """
    ε sweep of the compressible solver against the limit matching the regime.

    Writes ``convergence.csv`` and ``failures.csv``. Rows run concurrently on
    ``cfg.workers`` processes; a failing row is NaN and never affects others.

    Raises
    ------
    ConfigError
        If the regime has no limit solver or the comparison time does not fit
        the time step and cadence.
    """
    if cfg.regime not in ("anisotropic", "isotropic"):
        raise ConfigError(f"regime '{cfg.regime}' has no convergence sweep", key="regime")
    check_hypotheses(cfg.params, cfg.regime)
    out = _out_dir(cfg)
    _, t = cfg.comparison_window
    for eps in cfg.epsilons:
        _steps_for(cfg, cfg.params_for(eps), t)

    base = build_setup(cfg.params_for(cfg.epsilons[0]))
    data = preset_data(cfg.preset, base.profile, base.ws, cfg.amplitude)
    reference = limit_reference(cfg, base, data, t)
    logger.info("Limit reference ready at t=%.4g; sweeping %d values of eps", t, len(cfg.epsilons))

    results = Parallel(n_jobs=cfg.workers)(delayed(_isolated_row)(cfg, eps, reference, t) for eps in cfg.epsilons)
    table = pd.DataFrame([row for row, _ in results], columns=CONVERGENCE_COLUMNS)
    failures = pd.DataFrame([f for _, f in results if f is not None], columns=FAILURE_COLUMNS)

    save_csv(table, out / "convergence.csv")
    save_csv(failures, out / "failures.csv")
    for column in ("error_norm", "balance_residual"):
        bad = trend_inversions(table[column])
        if bad:
            logger.warning("%s not monotone in eps at rows %s", column, bad)
    _track(cfg, table, mlflow_tracking_uri, ["error_norm", "balance_residual", "energy_drift"])
    return table


# -------------------------------------------------------------------
# Acoustic decay study
# -------------------------------------------------------------------

def run_acoustic_study(cfg: ExperimentConfig, mlflow_tracking_uri: Optional[str] = None) -> pd.DataFrame:
    """
    Local energy of freely propagating random data across the ε sweep,
    plus the local response to an oscillating source that focuses onto a
    second random field at T/2.

    One horizon T = 0.9·ε_min^m·τ_wrap serves every row, so that no front
    re-enters the bump through the periodic boundary. Writes ``decay.csv``,
    ``forced_decay.csv`` and ``decay_fit.csv``.
    """
    if cfg.regime != "acoustic-decay":
        raise ConfigError(f"regime '{cfg.regime}' is not an acoustic study", key="regime")
    out = _out_dir(cfg)
    grid = make_grid(cfg.params)
    ws = SpectralWorkspace(grid)

    radius, data_radius = cfg.acoustic_radius, 4.0 * cfg.data_width
    tau = wrap_time(grid, cfg.params, radius, data_radius)
    if tau <= 0:
        raise ConfigError("acoustic_radius and data_width do not fit the box", key="acoustic_radius")
    m = cfg.params.m
    T = 0.9 * min(cfg.epsilons) ** m * tau

    S0, Psi0 = acoustic_data(ws, cfg.rng(0), cfg.data_width)
    gS, gPsi = acoustic_data(ws, cfg.rng(1), cfg.data_width)
    E0 = acoustic_energy(S0, Psi0, cfg.params, ws)

    rows, forced_rows, drifts = [], [], []
    for eps in cfg.epsilons:
        params = cfg.params_for(eps)
        check_alpha(params)
        local = local_energy(S0, Psi0, radius, T, params, ws, cfg.acoustic_samples)
        S_T, Psi_T = wave_propagate(S0, Psi0, T, params, ws)
        E_T = acoustic_energy(S_T, Psi_T, params, ws)
        drifts.append(abs(E_T - E0) / E0)
        forced = forced_local_response(gS, gPsi, radius, T, params, ws, cfg.acoustic_samples)
        rows.append(
            {
                "epsilon": eps,
                "m": m,
                "alpha": params.alpha,
                "T": T,
                "local_energy": local,
                "global_energy": E_T,
                "ratio": local / (params.mach * E_T),
            }
        )
        forced_rows.append({"epsilon": eps, "T": T, "forced_energy": forced})
        logger.info("eps=%.4g: local=%.4e forced=%.4e drift=%.2e", eps, local, forced, drifts[-1])

    table = pd.DataFrame(rows, columns=DECAY_COLUMNS)
    forced_table = pd.DataFrame(forced_rows, columns=FORCED_COLUMNS)
    slope = fit_slope(table["epsilon"], table["local_energy"])
    forced_slope = fit_slope(forced_table["epsilon"], forced_table["forced_energy"])
    fit = pd.DataFrame(
        [{"m": m, "slope": slope, "forced_slope": forced_slope, "initial_energy": E0, "max_energy_drift": max(drifts)}],
        columns=FIT_COLUMNS,
    )
    logger.info("Fitted decay slope %.3f (forced %.3f) for m=%.3g", slope, forced_slope, m)

    save_csv(table, out / "decay.csv")
    save_csv(forced_table, out / "forced_decay.csv")
    save_csv(fit, out / "decay_fit.csv")
    _track(cfg, table, mlflow_tracking_uri, ["local_energy", "ratio"])
    return table


# -------------------------------------------------------------------
# Optional tracking
# -------------------------------------------------------------------

def _track(cfg: ExperimentConfig, table: pd.DataFrame, uri: Optional[str], metrics: Sequence[str]) -> None:
    """Log parameters and per-row metrics to MLflow when a tracking URI is given."""
    if not uri:
        return
    import mlflow

    mlflow.set_tracking_uri(uri)
    mlflow.set_experiment(f"rotating-slab-{cfg.regime}")
    with mlflow.start_run(run_name=f"{cfg.regime}-{cfg.preset}-seed{cfg.seed}"):
        mlflow.log_params({**cfg.params.model_dump(), "preset": cfg.preset, "amplitude": cfg.amplitude, "seed": cfg.seed})
        for step, row in enumerate(table.to_dict("records")):
            values = {k: float(row[k]) for k in metrics if np.isfinite(row[k])}
            mlflow.log_metrics({**values, "epsilon": float(row["epsilon"])}, step=step)
    logger.info("Logged %d rows to MLflow at %s", len(table), uri)
