"""Max-min power allocation for fixed receiver filters.

With filters fixed, each user's SINR is a linear-fractional function of the
powers,

    SINR_k(q) = q_k / (sum_{k'!=k} a_kk' q_k' + sum_{k'} b_kk' q_k' + c_k),

so "all SINRs >= t" is a system of linear constraints at fixed t and the
max-min problem is solved by bisection on t.  Each feasibility test runs a
monotone fixed-point power iteration (a standard interference-function
update), which converges to the minimal feasible power vector from q = 0.
The self-interference term b_kk makes the update implicit in q_k; it is
rearranged into the iteration gain, and any t with t * b_kk >= 1 is
infeasible outright.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .chanstats import ChannelStats
from .sinr import _quadratic_terms

FP_TOL = 1e-10
FP_MAX_ITERS = 10_000
# Relative slack on the power box when classifying the converged iterate.
BOX_SLACK = 1e-9


@dataclass(frozen=True)
class SinrCoefficients:
    """Linear-fractional SINR coefficients for fixed filters.

    ``a`` carries the pilot-contamination coupling (zero diagonal), ``b``
    the estimation-spread coupling including the self term, ``c`` the
    noise floor.  All entries are nonnegative and c > 0.
    """

    a: np.ndarray  # (K, K)
    b: np.ndarray  # (K, K)
    c: np.ndarray  # (K,)

    @property
    def coupling(self) -> np.ndarray:
        return self.a + self.b

    @property
    def K(self) -> int:
        return self.c.shape[0]

    def sinr(self, q: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        return q / (self.coupling @ q + self.c)


def extract_coefficients(stats: ChannelStats, U: np.ndarray, rho: float) -> SinrCoefficients:
    """Reduce the closed-form SINR at filters U to power-domain coefficients."""
    gtu, dtu, dquad, rquad = _quadratic_terms(stats, U)
    if np.any(np.abs(gtu) < np.finfo(float).tiny):
        raise ValueError("degenerate filter: Gamma_k^T u_k must be nonzero")
    norm = gtu**2
    a = stats.gram2 * dtu**2 / norm[:, None]
    np.fill_diagonal(a, 0.0)
    b = dquad / norm[:, None]
    c = rquad / (rho * norm)
    return SinrCoefficients(a=a, b=b, c=c)


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    q: np.ndarray
    iterations: int
    hit_cap: bool


def feasible(coeff: SinrCoefficients, t: float, p_max,
             fp_tol: float = FP_TOL, fp_max_iters: int = FP_MAX_ITERS) -> FeasibilityResult:
    """Decide whether some q in [0, p_max] reaches SINR_k >= t for all k.

    On success the witness q is the minimal such power vector (limit of the
    monotone iteration from zero).
    """
    if t <= 0:
        raise ValueError("target t must be positive")
    p_max = np.broadcast_to(np.asarray(p_max, dtype=float), (coeff.K,))
    coupling = coeff.coupling
    diag = np.diagonal(coupling)
    if np.any(t * diag >= 1.0):
        return FeasibilityResult(False, np.zeros(coeff.K), 0, False)

    q, iters, converged = _kernels.fixed_point_iterate(
        np.ascontiguousarray(coupling), np.ascontiguousarray(coeff.c),
        np.ascontiguousarray(p_max), float(t), float(fp_tol), int(fp_max_iters))
    # At the stopped iterate the unclamped power requirement must fit the
    # box: at a feasible target the iteration converges (from below) to a
    # true fixed point with requirement <= p_max, while infeasibility shows
    # up as clamped users whose requirement keeps exceeding their budget.
    # A capped run is classified infeasible (conservative near threshold).
    off = coupling - np.diag(diag)
    required = t * (off @ q + coeff.c) / (1.0 - t * diag)
    ok = bool(converged and np.all(required <= p_max * (1.0 + BOX_SLACK)))
    return FeasibilityResult(ok, q, iters, not converged)


@dataclass(frozen=True)
class PowerSolution:
    q: np.ndarray            # witness powers
    t: float                 # achieved min-SINR at q
    bisections: int
    fp_cap_hits: int         # feasibility calls that exhausted the iteration cap


def maxmin_power(coeff: SinrCoefficients, p_max, tol: float = 1e-4,
                 q_init: np.ndarray | None = None,
                 fp_tol: float = FP_TOL, fp_max_iters: int = FP_MAX_ITERS) -> PowerSolution:
    """Maximize the minimum SINR over the power box via bisection on t.

    The search runs on [t_lo, t_hi] with t_hi the interference-free bound
    min_k p_max_k / c_k, down to an absolute gap of tol * t_hi.  A feasible
    ``q_init`` (e.g. the previous iterate of an alternating solver) seeds
    t_lo with its achieved min-SINR, which both shrinks the search and
    guarantees the returned value never falls below it.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    p_max = np.broadcast_to(np.asarray(p_max, dtype=float), (coeff.K,)).copy()
    if np.any(p_max <= 0):
        raise ValueError("p_max must be positive")

    t_hi = float((p_max / coeff.c).min())
    gap = tol * t_hi
    t_lo = 0.0
    q_best = np.zeros(coeff.K)
    if q_init is not None:
        q_init = np.minimum(np.asarray(q_init, dtype=float), p_max)
        t_seed = float(coeff.sinr(q_init).min())
        if t_seed > 0.0:
            t_lo = t_seed
            q_best = q_init

    bisections = 0
    cap_hits = 0
    while t_hi - t_lo > gap:
        t_mid = 0.5 * (t_lo + t_hi)
        res = feasible(coeff, t_mid, p_max, fp_tol, fp_max_iters)
        bisections += 1
        cap_hits += res.hit_cap
        if res.feasible:
            t_lo, q_best = t_mid, res.q
        else:
            t_hi = t_mid

    if t_lo > 0.0:
        # Re-derive the minimal witness at the final target; keep the best
        # known point if the boundary case classifies as infeasible.
        res = feasible(coeff, t_lo, p_max, fp_tol, fp_max_iters)
        cap_hits += res.hit_cap
        if res.feasible and coeff.sinr(res.q).min() >= coeff.sinr(q_best).min():
            q_best = res.q

    t_star = float(coeff.sinr(q_best).min()) if t_lo > 0.0 else 0.0
    return PowerSolution(q=q_best, t=t_star, bisections=bisections, fp_cap_hits=cap_hits)
