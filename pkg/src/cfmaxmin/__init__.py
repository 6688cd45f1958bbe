"""Uplink cell-free massive MIMO: closed-form rates and max-min optimization.

The package simulates a network of single-antenna APs jointly serving
single-antenna users, evaluates each user's statistical uplink SINR in
closed form, and maximizes the minimum rate by alternating receiver-filter
design (a rank-one generalized eigenvalue problem solved in closed form)
with power allocation (bisection over a monotone fixed-point feasibility
test).  A Monte Carlo channel simulator independently verifies the
closed-form rate term by term, and a batch harness reproduces CDF and
convergence experiments.
"""

from ._kernels import BACKEND_NAME, available_backends
from .chanstats import ChannelStats, assemble_user_matrices, channel_stats, compute_c, compute_gamma
from .harness import (ExperimentConfig, ExperimentResult, PilotSpec, cdf, load_config,
                      outage_rate, run_experiment)
from .montecarlo import ChannelDraw, OracleReport, draw_channel, empirical_terms, run_oracle
from .pilots import PilotBook, assign_pilots
from .power import (FeasibilityResult, PowerSolution, SinrCoefficients,
                    extract_coefficients, feasible, maxmin_power)
from .receiver import BMatrix, build_B, optimal_filter, optimal_filters
from .sinr import Solution, rate, sinr_all, sinr_k
from .solver import IterationTrace, SolverOptions, solve_baseline, solve_p1
from .topology import (SimParams, Topology, generate_topology, large_scale_fading,
                       noise_power, wrap_distance)

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME", "available_backends",
    "BMatrix", "ChannelDraw", "ChannelStats", "ExperimentConfig", "ExperimentResult",
    "FeasibilityResult", "IterationTrace", "OracleReport", "PilotBook", "PilotSpec",
    "PowerSolution", "SimParams", "SinrCoefficients", "Solution", "SolverOptions",
    "Topology", "assemble_user_matrices", "assign_pilots", "build_B", "cdf",
    "channel_stats", "compute_c", "compute_gamma", "draw_channel", "empirical_terms",
    "extract_coefficients", "feasible", "generate_topology", "large_scale_fading",
    "load_config", "maxmin_power", "noise_power", "optimal_filter", "optimal_filters",
    "outage_rate", "rate", "run_experiment", "run_oracle", "sinr_all", "sinr_k",
    "solve_baseline", "solve_p1", "wrap_distance",
]
