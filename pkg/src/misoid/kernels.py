"""Whole-trajectory inner loops, optionally JIT-compiled with numba.

The per-sample recursions are cheap numpy calls executed thousands of
times, so the Python-level loop dominates runtime in long runs.  The
loops below are written in the numba-compatible numpy subset and compiled
with ``@njit`` when numba is importable; setting ``MISOID_DISABLE_NUMBA=1``
(or numba being absent) selects the identical pure-numpy code path.

``benchmarks/bench_kernels.py`` times both paths side by side.
"""
from __future__ import annotations

import os

import numpy as np


def _numba_wanted() -> bool:
    return os.environ.get("MISOID_DISABLE_NUMBA", "0").lower() not in ("1", "true", "yes")


def _central_trajectory(phis, ys, theta0, sigma0, noise_var, info_weight):
    """Run the central recursion over all samples.

    phis is (N, n) with row k the regressor used at step k; info_weight is
    1/sigma^2 for the standard recursion or 1/gamma^2 for the gamma-driven
    variant.  Returns per-step estimates, prediction errors and gains.
    """
    n_steps, n = phis.shape
    theta = theta0.copy()
    sigma = sigma0.copy()
    theta_hist = np.empty((n_steps, n))
    eps_hist = np.empty(n_steps)
    alpha_hist = np.empty(n_steps)
    sm_denom_base = 1.0 / info_weight
    for k in range(n_steps):
        phi = phis[k]
        c = sigma @ phi
        s = phi @ c
        alpha = 1.0 / (noise_var + s)
        eps = ys[k] - phi @ theta
        theta = theta + alpha * eps * c
        sigma = sigma - (c.reshape(n, 1) * c.reshape(1, n)) / (sm_denom_base + s)
        sigma = 0.5 * (sigma + sigma.T)
        theta_hist[k] = theta
        eps_hist[k] = eps
        alpha_hist[k] = alpha
    return theta_hist, eps_hist, alpha_hist


def _distributed_trajectory(phis, ys, theta0, sigma0, offsets, gammas, noise_var):
    """Run the fused distributed recursion over all samples.

    sigma0 is the block-diagonal stacked gain matrix; offsets (length m+1)
    delimit the per-node blocks.  Returns per-step stacked estimates,
    shared errors/gains and the per-node upstream scalars of every round.
    """
    n_steps, n = phis.shape
    m = offsets.shape[0] - 1
    theta = theta0.copy()
    sigma = sigma0.copy()
    theta_hist = np.empty((n_steps, n))
    eps_hist = np.empty(n_steps)
    alpha_hist = np.empty(n_steps)
    preds_hist = np.empty((n_steps, m))
    gains_hist = np.empty((n_steps, m))
    cs = np.empty(n)
    for k in range(n_steps):
        phi = phis[k]
        pred_sum = 0.0
        gain_sum = 0.0
        for i in range(m):
            a, b = offsets[i], offsets[i + 1]
            phi_i = np.ascontiguousarray(phi[a:b])
            block = np.ascontiguousarray(sigma[a:b, a:b])
            c = block @ phi_i
            cs[a:b] = c
            preds_hist[k, i] = phi_i @ theta[a:b]
            gains_hist[k, i] = phi_i @ c
            pred_sum += preds_hist[k, i]
            gain_sum += gains_hist[k, i]
        eps = ys[k] - pred_sum
        alpha = 1.0 / (noise_var + gain_sum)
        for i in range(m):
            a, b = offsets[i], offsets[i + 1]
            ni = b - a
            c = cs[a:b]
            theta[a:b] = theta[a:b] + alpha * eps * c
            blk = sigma[a:b, a:b] - (c.reshape(ni, 1) * c.reshape(1, ni)) / (
                gammas[i] ** 2 + gains_hist[k, i]
            )
            sigma[a:b, a:b] = 0.5 * (blk + blk.T)
        theta_hist[k] = theta
        eps_hist[k] = eps
        alpha_hist[k] = alpha
    return theta_hist, eps_hist, alpha_hist, preds_hist, gains_hist


NUMBA_ENABLED = False
if _numba_wanted():
    try:
        from numba import njit

        central_trajectory = njit(cache=True)(_central_trajectory)
        distributed_trajectory = njit(cache=True)(_distributed_trajectory)
        NUMBA_ENABLED = True
    except ImportError:
        pass

if not NUMBA_ENABLED:
    central_trajectory = _central_trajectory
    distributed_trajectory = _distributed_trajectory


def using_numba() -> bool:
    """True when the JIT-compiled kernels are active."""
    return NUMBA_ENABLED
