#!/usr/bin/env python3
"""Benchmark the jitted kernels against the pure-numpy fallback.

Times the Husimi field contraction and the damping-rate reduction for a
few spin sizes on the default 96x192 sphere grid. Run after an editable
install:

    python benchmarks/benchmark_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from spinwehrl import SpinQuantumNumber, make_grid
from spinwehrl import _kernels


def time_call(fn, *args, repeats=20):
    fn(*args)  # warmup (jit compilation, caches)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def random_state(dim, rng):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy path can be timed")

    rng = np.random.default_rng(7)
    grid = make_grid(96, 192)
    cos_t, sin_t = np.cos(grid.theta), np.sin(grid.theta)

    print(f"grid: 96x192 ({grid.n_nodes} nodes), repeats: {args.repeats}")
    print(f"{'kernel':<22}{'2J':>4}{'numpy (ms)':>12}{'numba (ms)':>12}{'speedup':>9}")
    for two_j in (1, 4, 12):
        j = SpinQuantumNumber(two_j)
        amp, damp, ms = grid.amplitude_table(j)
        rho = random_state(j.dim, rng)
        t_np = time_call(_kernels.husimi_contract_numpy, amp, damp, ms, rho, repeats=args.repeats)
        row = f"{'husimi_contract':<22}{two_j:>4}{1e3 * t_np:>12.3f}"
        if _kernels.HAVE_NUMBA:
            t_nb = time_call(_kernels.husimi_contract_numba, amp, damp, ms, rho, repeats=args.repeats)
            row += f"{1e3 * t_nb:>12.3f}{t_np / t_nb:>9.2f}"
        print(row)

        q, dth, dph = _kernels.husimi_contract_numpy(amp, damp, ms, rho)
        red_args = (q, dth, dph, cos_t, sin_t, grid.weights, two_j, 0.5, 1e-300)
        t_np = time_call(_kernels.damping_reduce_numpy, *red_args, repeats=args.repeats)
        row = f"{'damping_reduce':<22}{two_j:>4}{1e3 * t_np:>12.3f}"
        if _kernels.HAVE_NUMBA:
            t_nb = time_call(_kernels.damping_reduce_numba, *red_args, repeats=args.repeats)
            row += f"{1e3 * t_nb:>12.3f}{t_np / t_nb:>9.2f}"
        print(row)


if __name__ == "__main__":
    main()
