"""Alternating max-min solver: receiver filters <-> power allocation.

Starting from full power, each round first computes the per-user optimal
filters for the current powers (closed-form Rayleigh maximizer), then
rebalances powers for those filters (bisection).  Both half-steps can only
improve the minimum SINR and the previous powers stay feasible, so the
min-SINR trace is non-decreasing and the loop stops once its relative
change falls below a threshold.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .chanstats import ChannelStats
from .power import extract_coefficients, maxmin_power
from .receiver import optimal_filters
from .sinr import Solution, rate
from .topology import SimParams


@dataclass(frozen=True)
class SolverOptions:
    max_iters: int = 50
    eps_converge: float = 1e-4
    power_tol: float = 1e-4
    fp_tol: float = 1e-10
    fp_max_iters: int = 10_000

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.eps_converge <= 0 or self.power_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class IterationTrace:
    """Per-round diagnostics of the alternation."""

    t: list = field(default_factory=list)          # min-SINR after each power step
    min_rate: list = field(default_factory=list)
    q: list = field(default_factory=list)
    sinr: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    fp_cap_hits: int = 0

    def record(self, t: float, q: np.ndarray, sinr: np.ndarray):
        self.t.append(float(t))
        self.min_rate.append(float(rate(t)))
        self.q.append(np.asarray(q).copy())
        self.sinr.append(np.asarray(sinr).copy())

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "min_rate"])
            for i, r in enumerate(self.min_rate, start=1):
                writer.writerow([i, f"{r:.12g}"])


def solve_p1(stats: ChannelStats, params: SimParams,
             opts: SolverOptions | None = None) -> tuple[Solution, IterationTrace]:
    """Jointly optimize filters and powers for the max-min rate problem.

    Returns the final solution plus the iteration trace; ``trace.converged``
    is False when the round limit is hit first.
    """
    opts = opts or SolverOptions()
    rho = params.rho
    trace = IterationTrace()

    q = np.full(stats.K, float(params.p_max))
    U = None
    t_prev = None
    for _ in range(opts.max_iters):
        U = optimal_filters(stats, q, rho)
        coeff = extract_coefficients(stats, U, rho)
        power = maxmin_power(coeff, params.p_max, tol=opts.power_tol, q_init=q,
                             fp_tol=opts.fp_tol, fp_max_iters=opts.fp_max_iters)
        q = power.q
        trace.iterations += 1
        trace.fp_cap_hits += power.fp_cap_hits
        trace.record(power.t, q, coeff.sinr(q))

        if t_prev is not None and abs(power.t - t_prev) <= opts.eps_converge * max(t_prev, 1.0):
            trace.converged = True
            break
        t_prev = power.t

    return Solution.evaluate(stats, U, q, rho), trace


def solve_baseline(stats: ChannelStats, params: SimParams,
                   power_tol: float = 1e-4) -> Solution:
    """Power-only reference scheme: uniform aggregation weights u_mk = 1/sqrt(M).

    One max-min power solve with the filters pinned; no receiver weighting
    beyond plain MRC combining.
    """
    U = np.full((stats.M, stats.K), 1.0 / np.sqrt(stats.M))
    coeff = extract_coefficients(stats, U, params.rho)
    power = maxmin_power(coeff, params.p_max, tol=power_tol)
    return Solution.evaluate(stats, U, power.q, params.rho)
