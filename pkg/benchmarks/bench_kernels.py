#!/usr/bin/env python3
"""
Kernel benchmark: numba vs. pure-numpy / pure-Python paths.

    python benchmarks/bench_kernels.py [--n 1000000] [--repeat 5]

Times the blocking admission recurrence (numba loop vs. numpy running-max
form vs. plain Python loop) and the per-cycle oracle (numba vs. Python), then
a full default sweep on the active backend.
"""

import argparse
import time

import numpy as np

from atomsim import _accel, kernels
from atomsim.analysis import run_sweep
from atomsim.trace import BIMODAL_CDF, synth_trace


def best_of(func, *args, repeat=5):
    func(*args)  # warm-up / JIT compile
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        func(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.strip().splitlines()[0])
    parser.add_argument("--n", type=int, default=1_000_000)
    parser.add_argument("--oracle-n", type=int, default=20_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    trace = synth_trace(list(BIMODAL_CDF), args.n, seed=1)
    arrivals = np.cumsum(-(-trace.sizes // 80))
    depth = 8

    print(f"active backend: {_accel.backend()}")
    print(f"blocking_entries, N={args.n:,}, D={depth}")
    rows = []
    if _accel.HAS_NUMBA:
        rows.append(("numba", best_of(kernels.blocking_entries, arrivals, depth, repeat=args.repeat)))
    rows.append(("numpy", best_of(kernels.blocking_entries_numpy, arrivals, depth, repeat=args.repeat)))
    rows.append(("python", best_of(kernels.blocking_entries_python, arrivals, depth, repeat=1)))
    base = rows[0][1]
    for name, t in rows:
        print(f"  {name:<8} {t * 1e3:10.2f} ms   x{t / base:7.1f}")

    reads = -(-trace.sizes[: args.oracle_n] // 80)
    print(f"oracle_loop, N={args.oracle_n:,}, D={depth}, blocking")
    rows = []
    if _accel.HAS_NUMBA:
        rows.append(("numba", best_of(kernels.oracle_loop, reads, depth, True, repeat=args.repeat)))
    rows.append(("python", best_of(kernels.oracle_loop_python, reads, depth, True, repeat=1)))
    base = rows[0][1]
    for name, t in rows:
        print(f"  {name:<8} {t * 1e3:10.2f} ms   x{t / base:7.1f}")

    start = time.perf_counter()
    run_sweep(trace, [0, 0.2, 1], range(1, 20))
    print(f"full sweep (3 alphas x 19 depths x 2 modes): {time.perf_counter() - start:.2f} s")


if __name__ == "__main__":
    main()
