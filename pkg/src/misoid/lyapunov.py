"""Lyapunov monitor: decrease checks for the estimation error dynamics.

The monitor is an oracle-mode verification instrument: it needs the true
parameter vector, evaluates the quadratic Lyapunov function along a
recorded trajectory, compares the direct one-step difference against the
closed-form decrease expressions, and checks the gamma-largeness
sufficiency bound for the distributed scheme.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .central import CentralState
from .distributed import BlockState
from .errors import DimensionError, ParameterError

#: decrease violations beyond this are flagged
VIOLATION_TOL = 1e-12
#: scale-invariant threshold for the orthogonal degenerate case
ORTHOGONAL_TOL = 1e-12
#: denominators below this make the gamma bound vacuous
DEGENERATE_DENOM_TOL = 1e-14


def w_quadratic(theta_err, info_mat) -> float:
    """Quadratic Lyapunov value err' * info * err."""
    err = np.asarray(theta_err, dtype=float)
    info = np.asarray(info_mat, dtype=float)
    if info.shape != (err.size, err.size):
        raise DimensionError(
            f"info matrix shape {info.shape} does not match error length {err.size}"
        )
    return float(err @ info @ err)


def delta_w_central_closed(theta_err, phi, sigma_mat, sigma: float) -> float:
    """Closed-form one-step decrease of the central Lyapunov function.

    Valid along the sigma-driven recursion: -(err'phi)^2 / (sigma^2 + phi'S phi).
    """
    if sigma <= 0:
        raise ParameterError("sigma must be > 0")
    err = np.asarray(theta_err, dtype=float)
    phi = np.asarray(phi, dtype=float)
    s = float(phi @ np.asarray(sigma_mat, dtype=float) @ phi)
    return -float(err @ phi) ** 2 / (sigma**2 + s)


def delta_w_central_general(theta_err, phi, sigma_mat, noise_var: float, info_weight: float) -> float:
    """Closed-form decrease for an information recursion with arbitrary weight.

    With weight 1/sigma^2 this reduces to delta_w_central_closed; with
    1/gamma^2 it covers the gamma-driven central recursion.
    """
    err = np.asarray(theta_err, dtype=float)
    phi = np.asarray(phi, dtype=float)
    s = float(phi @ np.asarray(sigma_mat, dtype=float) @ phi)
    alpha = 1.0 / (noise_var + s)
    proj = float(err @ phi)
    return proj**2 * (-alpha * (2.0 - alpha * s) + info_weight * (1.0 - alpha * s) ** 2)


def overline_delta_w_b(theta_err_b, phi, sigma_b, alpha_b: float) -> float:
    """Gain-matrix-frozen part of the distributed one-step difference.

    Factored form -alpha (err'phi)^2 (2 - alpha phi'S_B phi); negative
    whenever err'phi != 0 and 0 < alpha < 2/(phi'S_B phi).
    """
    err = np.asarray(theta_err_b, dtype=float)
    phi = np.asarray(phi, dtype=float)
    s = float(phi @ np.asarray(sigma_b, dtype=float) @ phi)
    return -alpha_b * float(err @ phi) ** 2 * (2.0 - alpha_b * s)


def gamma_sufficiency_bound(theta_err_b, f_matrix, phi_blocks, overline_dw: float):
    """Required upper bound on sum(1/gamma_i^2) for guaranteed decrease.

    Returns |overline_dw| / (err' F' phi_B F err), or None when the
    denominator is degenerate (bound vacuous: any gammas satisfy it).
    """
    err = np.asarray(theta_err_b, dtype=float)
    f_mat = np.asarray(f_matrix, dtype=float)
    phi_b = np.asarray(phi_blocks, dtype=float)
    err_next = f_mat @ err
    denom = float(err_next @ phi_b @ err_next)
    if denom <= DEGENERATE_DENOM_TOL:
        return None
    return abs(overline_dw) / denom


def is_orthogonal(phi, theta_err) -> bool:
    """Scale-invariant check for the degenerate phi'err ~ 0 case."""
    phi = np.asarray(phi, dtype=float)
    err = np.asarray(theta_err, dtype=float)
    scale = np.linalg.norm(phi) * np.linalg.norm(err)
    return abs(float(phi @ err)) <= ORTHOGONAL_TOL * scale


@dataclass(frozen=True)
class LyapRecord:
    """Per-step monitor record for the transition k -> k+1."""

    k: int
    w: float
    delta_w: float
    delta_w_closed: float | None = None  # central mode
    overline_delta_w: float | None = None  # distributed mode
    gamma_bound: float | None = None  # None = not applicable or degenerate
    gamma_bound_degenerate: bool = False
    gamma_sum: float | None = None
    orthogonal_flag: bool = False
    violation_flag: bool = False


@dataclass(frozen=True)
class CentralRunTrace:
    """States 0..N and the regressors that drove each transition."""

    theta_true: np.ndarray
    states: list[CentralState]
    phis: np.ndarray  # (N, n)
    gamma: float | None = None  # None: sigma-driven recursion


@dataclass(frozen=True)
class DistributedRunTrace:
    """Stacked snapshots 0..N plus per-round regressors and shared gains."""

    theta_true: np.ndarray
    blocks: list[BlockState]
    phis: np.ndarray  # (N, n)
    alphas: np.ndarray  # (N,)
    noise_var: float


@dataclass(frozen=True)
class MonitorReport:
    mode: str
    records: list[LyapRecord] = field(default_factory=list)

    @property
    def violations(self) -> list[int]:
        return [r.k for r in self.records if r.violation_flag]

    @property
    def orthogonal_steps(self) -> list[int]:
        return [r.k for r in self.records if r.orthogonal_flag]

    @property
    def gamma_bound_held_everywhere(self) -> bool:
        """True when at every step the bound was satisfied or vacuous."""
        return all(
            r.gamma_bound_degenerate or (r.gamma_bound is not None and r.gamma_sum < r.gamma_bound)
            for r in self.records
        )

    @property
    def gamma_implication_ok(self) -> bool:
        """Every step where the bound certifies decrease indeed decreased."""
        return all(
            r.delta_w < 0
            for r in self.records
            if r.gamma_bound is not None and r.gamma_sum is not None and r.gamma_sum < r.gamma_bound
        )


def check_trajectory(trace, mode: str) -> MonitorReport:
    """Evaluate per-step Lyapunov records along a recorded noise-free run."""
    if mode == "central":
        return _check_central(trace)
    if mode == "distributed":
        return _check_distributed(trace)
    raise ParameterError(f"unknown monitor mode {mode!r}")


def _check_central(trace: CentralRunTrace) -> MonitorReport:
    if len(trace.states) < 2:
        raise ParameterError("trace must contain at least two states")
    records = []
    for k in range(len(trace.states) - 1):
        st, st_next = trace.states[k], trace.states[k + 1]
        err = st.theta_hat - trace.theta_true
        err_next = st_next.theta_hat - trace.theta_true
        phi = trace.phis[k]
        w = w_quadratic(err, st.info_mat)
        w_next = w_quadratic(err_next, st_next.info_mat)
        dw = w_next - w
        if trace.gamma is None:
            closed = delta_w_central_closed(err, phi, st.sigma_mat, np.sqrt(st.noise_var))
        else:
            closed = delta_w_central_general(
                err, phi, st.sigma_mat, st.noise_var, 1.0 / trace.gamma**2
            )
        records.append(
            LyapRecord(
                k=k,
                w=w,
                delta_w=dw,
                delta_w_closed=closed,
                orthogonal_flag=is_orthogonal(phi, err),
                violation_flag=dw > VIOLATION_TOL,
            )
        )
    return MonitorReport(mode="central", records=records)


def _check_distributed(trace: DistributedRunTrace) -> MonitorReport:
    if len(trace.blocks) < 2:
        raise ParameterError("trace must contain at least two states")
    records = []
    for k in range(len(trace.blocks) - 1):
        blk, blk_next = trace.blocks[k], trace.blocks[k + 1]
        err = blk.theta - trace.theta_true
        err_next = blk_next.theta - trace.theta_true
        phi = trace.phis[k]
        alpha = float(trace.alphas[k])
        w = w_quadratic(err, blk.info_b)
        w_next = w_quadratic(err_next, blk_next.info_b)
        dw = w_next - w
        odw = overline_delta_w_b(err, phi, blk.sigma_b, alpha)
        gamma_sum = float(np.sum(1.0 / blk.gammas**2))
        orthogonal = is_orthogonal(phi, err)
        bound = None
        degenerate = False
        if odw < 0:
            f_mat = np.eye(blk.n) - alpha * blk.sigma_b @ np.outer(phi, phi)
            bound = gamma_sufficiency_bound(err, f_mat, blk.phi_b(phi), odw)
            degenerate = bound is None
        records.append(
            LyapRecord(
                k=k,
                w=w,
                delta_w=dw,
                overline_delta_w=odw,
                gamma_bound=bound,
                gamma_bound_degenerate=degenerate,
                gamma_sum=gamma_sum,
                orthogonal_flag=orthogonal,
                violation_flag=dw > VIOLATION_TOL,
            )
        )
    return MonitorReport(mode="distributed", records=records)


def monitor_columns(mode: str) -> list[str]:
    if mode == "central":
        return ["W", "deltaW", "deltaW_closed", "orthogonal_flag", "violation_flag"]
    return [
        "W",
        "deltaW",
        "overline_dW",
        "gamma_bound",
        "gamma_sum",
        "orthogonal_flag",
        "violation_flag",
    ]


def monitor_row(record: LyapRecord, mode: str) -> list[str]:
    def num(x):
        if x is None:
            return "inf"  # degenerate/vacuous bound
        return format(float(x), ".17g")

    if mode == "central":
        return [
            num(record.w),
            num(record.delta_w),
            num(record.delta_w_closed),
            str(int(record.orthogonal_flag)),
            str(int(record.violation_flag)),
        ]
    return [
        num(record.w),
        num(record.delta_w),
        num(record.overline_delta_w),
        num(record.gamma_bound),
        num(record.gamma_sum),
        str(int(record.orthogonal_flag)),
        str(int(record.violation_flag)),
    ]


def write_monitor_csv(report: MonitorReport, path):
    header = ["k"] + monitor_columns(report.mode)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for rec in report.records:
            fh.write(",".join([str(rec.k)] + monitor_row(rec, report.mode)) + "\n")
