"""Benchmark the power-control kernels and the end-to-end solver.

Compares the compiled fixed-point kernel against the pure-NumPy fallback on
coefficient matrices taken from real network realizations, then times a
full alternating solve per backend.

Run:  python3 benchmarks/bench_power_kernel.py
"""

import argparse
import time

import numpy as np

import cfmaxmin as cf
from cfmaxmin import _kernels
from cfmaxmin.power import extract_coefficients, maxmin_power
from cfmaxmin.solver import solve_p1


def make_case(M, K, tau, seed):
    params = cf.SimParams(M=M, K=K, tau=tau, seed=seed)
    rng = np.random.default_rng(seed)
    topo = cf.generate_topology(params, rng)
    pilots = cf.assign_pilots(K, tau, "random", rng)
    stats = cf.channel_stats(topo, pilots, params)
    U = cf.optimal_filters(stats, np.ones(K), params.rho)
    return extract_coefficients(stats, U, params.rho), stats, params


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_row(label, fn, backends, repeats):
    times = {}
    for name in backends:
        _kernels.set_backend(name)
        times[name] = best_of(fn, repeats)
    row = f"{label:<26}" + "".join(f"{times[b] * 1e3:>10.2f}ms" for b in backends)
    if "python" in times and "cython" in times:
        row += f"{times['python'] / times['cython']:>9.1f}x"
    print(row)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    initial = _kernels.BACKEND_NAME
    backends = _kernels.available_backends()
    print(f"backends: {', '.join(backends)} (default: {initial})")
    print(f"{'case':<26}" + "".join(f"{b:>12}" for b in backends)
          + ("{:>10}".format("speedup") if len(backends) == 2 else ""))

    try:
        for M, K, tau, seed in [(30, 10, 5, 1), (60, 20, 10, 2), (100, 40, 20, 3)]:
            coeff, stats, params = make_case(M, K, tau, seed)
            run_row(f"maxmin_power M={M} K={K}",
                    lambda: maxmin_power(coeff, 1.0, tol=1e-6), backends, args.repeats)
            run_row(f"solve_p1     M={M} K={K}",
                    lambda: solve_p1(stats, params), backends, args.repeats)
    finally:
        _kernels.set_backend(initial)


if __name__ == "__main__":
    main()
