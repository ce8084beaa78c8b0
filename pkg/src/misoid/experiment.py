"""Experiment harness: random systems, signals, side-by-side runs, CSV.

All randomness flows through seeded numpy PCG64 generators with fixed
stream labels, so a (config, seed) pair fully determines the system, the
signals and every trajectory.  The central and distributed estimators in
one experiment always consume the identical signal realization.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np

from . import central as central_mod
from . import distributed as dist_mod
from . import kernels
from .errors import DimensionError, ParameterError
from .fir import FirModule, MisoSystem, RegressorBank, push_inputs
from .lyapunov import (
    CentralRunTrace,
    DistributedRunTrace,
    MonitorReport,
    check_trajectory,
    monitor_columns,
    monitor_row,
)

# stream labels for the seeded sub-generators
_STREAM_SYSTEM = 0
_STREAM_INPUTS = 1
_STREAM_NOISE = 2
_STREAM_MC_NOISE = 3


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    m: int = 2
    order_range: tuple[int, int] = (1, 3)
    param_std: float = 1.0
    input_std: float = 1.0
    noise_std: float = 0.1
    gamma: float = 100.0
    init_c: float = 100.0
    samples: int = 500
    mode: str = "both"  # central | distributed | both
    monte_carlo_runs: int = 0

    def __post_init__(self):
        lo, hi = self.order_range
        if not (1 <= lo <= hi <= 64):
            raise ParameterError("order_range must satisfy 1 <= lo <= hi <= 64")
        if self.m < 1:
            raise ParameterError("m must be >= 1")
        for name in ("param_std", "input_std", "gamma", "init_c"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be > 0")
        if self.noise_std < 0:
            raise ParameterError("noise_std must be >= 0")
        if self.samples < 0 or self.monte_carlo_runs < 0:
            raise ParameterError("samples and monte_carlo_runs must be >= 0")
        if self.mode not in ("central", "distributed", "both"):
            raise ParameterError(f"unknown mode {self.mode!r}")


def save_config(config: ExperimentConfig, path):
    doc = asdict(config)
    doc["order_range"] = list(config.order_range)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        doc = json.load(fh)
    doc["order_range"] = tuple(doc["order_range"])
    return ExperimentConfig(**doc)


def random_system(config: ExperimentConfig) -> MisoSystem:
    """Draw module orders uniformly and coefficients from N(0, param_std^2)."""
    rng = np.random.default_rng([config.seed, _STREAM_SYSTEM])
    lo, hi = config.order_range
    orders = rng.integers(lo, hi + 1, size=config.m)
    modules = tuple(
        FirModule(rng.normal(0.0, config.param_std, size=int(ni))) for ni in orders
    )
    return MisoSystem(modules, noise_std=config.noise_std)


def generate_signals(system: MisoSystem, config: ExperimentConfig):
    """i.i.d. Gaussian inputs per channel and white Gaussian output noise."""
    n_samples = config.samples
    rng_u = np.random.default_rng([config.seed, _STREAM_INPUTS])
    inputs = rng_u.normal(0.0, config.input_std, size=(n_samples, system.m))
    if config.noise_std > 0:
        rng_v = np.random.default_rng([config.seed, _STREAM_NOISE])
        noise = rng_v.normal(0.0, config.noise_std, size=n_samples)
    else:
        noise = np.zeros(n_samples)
    return inputs, noise


def build_regressors(system: MisoSystem, inputs) -> np.ndarray:
    """Stacked regressor rows phi(t) for t = 0..N-1 with zero pre-windows."""
    inputs = np.asarray(inputs, dtype=float)
    n_samples = inputs.shape[0]
    if n_samples and inputs.shape[1] != system.m:
        raise DimensionError(
            f"inputs have {inputs.shape[1]} channels, system has {system.m}"
        )
    phis = np.zeros((n_samples, system.n))
    col = 0
    for i, ni in enumerate(system.orders):
        for lag in range(ni):
            phis[lag:, col + lag] = inputs[: n_samples - lag, i]
        col += ni
    return phis


def outputs_from_regressors(system: MisoSystem, phis, noise) -> np.ndarray:
    return phis @ system.theta_true() + np.asarray(noise, dtype=float)


def block_offsets(system: MisoSystem) -> np.ndarray:
    return np.concatenate([[0], np.cumsum(system.orders)]).astype(np.int64)


@dataclass(frozen=True)
class Trajectory:
    """Per-step record of one estimator run (row k = state after sample k)."""

    mode: str
    errors: np.ndarray  # (N, n) per-parameter errors
    eps: np.ndarray  # (N,)
    alpha: np.ndarray  # (N,)
    monitor: MonitorReport | None = None

    @property
    def samples(self) -> int:
        return self.errors.shape[0]

    @property
    def err_norm_sq(self) -> np.ndarray:
        return np.sum(self.errors**2, axis=1)

    def final_err_norm_sq(self) -> float:
        if self.samples == 0:
            raise ParameterError("empty trajectory has no final error")
        return float(self.err_norm_sq[-1])


def run_central(system: MisoSystem, inputs, noise, config: ExperimentConfig,
                monitor: bool = False) -> Trajectory:
    """Central recursive LSE over the given signals.

    Uses the gamma-driven information recursion (the comparison variant);
    the trajectory loop runs through the compiled kernel unless monitoring
    is requested, in which case per-step states are retained.
    """
    phis = build_regressors(system, inputs)
    ys = outputs_from_regressors(system, phis, noise)
    noise_var = config.noise_std**2
    theta0 = np.zeros(system.n)
    sigma0 = config.init_c * np.eye(system.n)

    if not monitor:
        theta_hist, eps, alpha = kernels.central_trajectory(
            phis, ys, theta0, sigma0, noise_var, 1.0 / config.gamma**2
        )
        errors = theta_hist - system.theta_true()
        return Trajectory(mode="central", errors=errors, eps=eps, alpha=alpha)

    state = central_mod.from_scratch_init(
        system.n, config.init_c, noise_var=noise_var, mode="gamma"
    )
    states = [state]
    eps = np.empty(config.samples)
    alpha = np.empty(config.samples)
    errors = np.empty((config.samples, system.n))
    for k in range(config.samples):
        phi = phis[k]
        s = float(phi @ state.sigma_mat @ phi)
        alpha[k] = 1.0 / (noise_var + s)
        eps[k] = ys[k] - float(phi @ state.theta_hat)
        state = central_mod.rls_update_gamma(state, phi, ys[k], config.gamma)
        states.append(state)
        errors[k] = state.theta_hat - system.theta_true()
    trace = CentralRunTrace(
        theta_true=system.theta_true(), states=states, phis=phis, gamma=config.gamma
    )
    report = check_trajectory(trace, "central") if config.samples else None
    return Trajectory(mode="central", errors=errors, eps=eps, alpha=alpha, monitor=report)


def run_distributed(system: MisoSystem, inputs, noise, config: ExperimentConfig,
                    monitor: bool = False) -> Trajectory:
    """Distributed fusion-center estimator over the given signals."""
    phis = build_regressors(system, inputs)
    ys = outputs_from_regressors(system, phis, noise)
    noise_var = config.noise_std**2
    offsets = block_offsets(system)

    if not monitor:
        theta0 = np.zeros(system.n)
        sigma0 = config.init_c * np.eye(system.n)
        gammas = np.full(system.m, float(config.gamma))
        theta_hist, eps, alpha, _, _ = kernels.distributed_trajectory(
            phis, ys, theta0, sigma0, offsets, gammas, noise_var
        )
        errors = theta_hist - system.theta_true()
        return Trajectory(mode="distributed", errors=errors, eps=eps, alpha=alpha)

    nodes = dist_mod.init_nodes(system.orders, config.init_c, config.gamma)
    center = dist_mod.FusionCenter(noise_var=noise_var, m=system.m)
    blocks = [dist_mod.stack(nodes)]
    eps = np.empty(config.samples)
    alpha = np.empty(config.samples)
    errors = np.empty((config.samples, system.n))
    bank = RegressorBank.for_system(system)
    for k in range(config.samples):
        bank = push_inputs(bank, inputs[k])
        nodes, tr = dist_mod.run_round(nodes, center, bank, ys[k], k=k)
        blocks.append(dist_mod.stack(nodes))
        eps[k] = tr.down.prediction_error
        alpha[k] = tr.down.alpha
        errors[k] = blocks[-1].theta - system.theta_true()
    trace = DistributedRunTrace(
        theta_true=system.theta_true(),
        blocks=blocks,
        phis=phis,
        alphas=alpha,
        noise_var=noise_var,
    )
    report = check_trajectory(trace, "distributed") if config.samples else None
    return Trajectory(mode="distributed", errors=errors, eps=eps, alpha=alpha, monitor=report)


@dataclass(frozen=True)
class ExperimentResult:
    system: MisoSystem
    central: Trajectory | None = None
    distributed: Trajectory | None = None
    monte_carlo_final: np.ndarray | None = None  # (runs, n) final estimates


def run_experiment(config: ExperimentConfig, system: MisoSystem | None = None,
                   monitor: bool = False) -> ExperimentResult:
    """Generate (or accept) a system, then run the configured estimators."""
    if system is None:
        system = random_system(config)
    inputs, noise = generate_signals(system, config)
    central_traj = None
    dist_traj = None
    if config.mode in ("central", "both"):
        central_traj = run_central(system, inputs, noise, config, monitor=monitor)
    if config.mode in ("distributed", "both"):
        dist_traj = run_distributed(system, inputs, noise, config, monitor=monitor)
    mc_final = None
    if config.monte_carlo_runs > 0:
        mc_final = monte_carlo_distributed(system, config)
    return ExperimentResult(
        system=system, central=central_traj, distributed=dist_traj, monte_carlo_final=mc_final
    )


def monte_carlo_distributed(system: MisoSystem, config: ExperimentConfig) -> np.ndarray:
    """Final distributed estimates over repeated noise draws, fixed inputs."""
    inputs, _ = generate_signals(system, config)
    phis = build_regressors(system, inputs)
    clean = phis @ system.theta_true()
    offsets = block_offsets(system)
    gammas = np.full(system.m, float(config.gamma))
    noise_var = config.noise_std**2
    finals = np.empty((config.monte_carlo_runs, system.n))
    for r in range(config.monte_carlo_runs):
        rng = np.random.default_rng([config.seed, _STREAM_MC_NOISE, r])
        ys = clean + rng.normal(0.0, config.noise_std, size=config.samples)
        theta_hist, _, _, _, _ = kernels.distributed_trajectory(
            phis, ys, np.zeros(system.n), config.init_c * np.eye(system.n),
            offsets, gammas, noise_var,
        )
        finals[r] = theta_hist[-1]
    return finals


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_trajectory_csv(trajectory: Trajectory, path):
    """Header then one row per step, 17 significant digits per value."""
    n = trajectory.errors.shape[1]
    header = ["k", "err_norm_sq"] + [f"err_{j + 1}" for j in range(n)] + ["eps", "alpha"]
    monitor = trajectory.monitor
    if monitor is not None:
        header += monitor_columns(monitor.mode)
    norms = trajectory.err_norm_sq
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for k in range(trajectory.samples):
            row = [str(k), _fmt(norms[k])]
            row += [_fmt(v) for v in trajectory.errors[k]]
            row += [_fmt(trajectory.eps[k]), _fmt(trajectory.alpha[k])]
            if monitor is not None:
                row += monitor_row(monitor.records[k], monitor.mode)
            fh.write(",".join(row) + "\n")


def read_trajectory_csv(path) -> dict[str, np.ndarray]:
    """Read a trajectory CSV back into named float columns."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header:
            raise ParameterError(f"{path}: empty file")
        names = header.split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    cols = {name: np.array([float(r[j]) for r in rows]) for j, name in enumerate(names)}
    return cols


def first_crossing(values, threshold_frac: float):
    """First index where the metric drops to threshold_frac times its start."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return None
    limit = threshold_frac * values[0]
    hits = np.nonzero(values <= limit)[0]
    return int(hits[0]) if hits.size else None
