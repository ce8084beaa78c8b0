"""Time the JIT-compiled trajectory kernels against the pure-numpy path.

Run twice to see both paths:

    python benchmarks/bench_kernels.py
    MISOID_DISABLE_NUMBA=1 python benchmarks/bench_kernels.py

or pass --both to compare in one process (the fallback is invoked through
the undecorated implementations).
"""
import argparse
import time

import numpy as np

from misoid import kernels
from misoid.experiment import (
    ExperimentConfig,
    block_offsets,
    build_regressors,
    generate_signals,
    outputs_from_regressors,
    random_system,
)


def _setup(samples):
    cfg = ExperimentConfig(
        seed=0, m=20, order_range=(1, 10), noise_std=0.1, samples=samples
    )
    system = random_system(cfg)
    inputs, noise = generate_signals(system, cfg)
    phis = build_regressors(system, inputs)
    ys = outputs_from_regressors(system, phis, noise)
    n = system.n
    args_c = (phis, ys, np.zeros(n), 100.0 * np.eye(n), 0.01, 1e-4)
    args_d = (
        phis,
        ys,
        np.zeros(n),
        100.0 * np.eye(n),
        block_offsets(system),
        np.full(system.m, 100.0),
        0.01,
    )
    return args_c, args_d


def _time(fn, args, repeats):
    fn(*args)  # warm-up / compile
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - t0) / repeats


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--samples", type=int, default=3500)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--both", action="store_true",
                        help="also time the pure-numpy implementations")
    args = parser.parse_args()

    args_c, args_d = _setup(args.samples)
    label = "numba" if kernels.using_numba() else "numpy"
    tc = _time(kernels.central_trajectory, args_c, args.repeats)
    td = _time(kernels.distributed_trajectory, args_d, args.repeats)
    print(f"{label:>6} central     {tc * 1e3:10.2f} ms/run")
    print(f"{label:>6} distributed {td * 1e3:10.2f} ms/run")

    if args.both and kernels.using_numba():
        tc2 = _time(kernels._central_trajectory, args_c, args.repeats)
        td2 = _time(kernels._distributed_trajectory, args_d, args.repeats)
        print(f" numpy central     {tc2 * 1e3:10.2f} ms/run  ({tc2 / tc:.1f}x)")
        print(f" numpy distributed {td2 * 1e3:10.2f} ms/run  ({td2 / td:.1f}x)")


if __name__ == "__main__":
    main()
