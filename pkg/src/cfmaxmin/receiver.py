"""Receiver coefficient design for fixed powers.

Maximizing user k's SINR over unit-norm u_k is a Rayleigh quotient with a
rank-one numerator q_k Gamma_k Gamma_k^T, so the maximizer is available in
closed form: u_k is proportional to B_k^{-1} Gamma_k, where B_k collects
the denominator terms.  B_k is diagonal plus a few rank-one contamination
terms (one per user sharing k's pilot) and is strictly positive definite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .chanstats import ChannelStats


@dataclass(frozen=True)
class BMatrix:
    """Denominator matrix of one user's SINR, kept in structured form."""

    diag: np.ndarray          # (M,)
    rank_weights: np.ndarray  # (r,) nonnegative
    rank_vecs: np.ndarray     # (M, r) the contamination vectors Delta_kk'

    def dense(self) -> np.ndarray:
        B = np.diag(self.diag)
        if self.rank_weights.size:
            B += (self.rank_vecs * self.rank_weights) @ self.rank_vecs.T
        return B


def build_B(stats: ChannelStats, q, rho: float, k: int) -> BMatrix:
    """Assemble B_k = sum_{k'!=k} q_k' g2_kk' Delta Delta^T + diag + R_k/rho."""
    q = np.asarray(q, dtype=float)
    gamma_k = stats.gamma[:, k]
    diag = gamma_k * (stats.beta @ q + 1.0 / rho)

    weights = q * stats.gram2[k]
    weights[k] = 0.0
    active = np.flatnonzero(weights > 0.0)
    vecs = (gamma_k / stats.beta[:, k])[:, None] * stats.beta[:, active]
    return BMatrix(diag=diag, rank_weights=weights[active], rank_vecs=vecs)


def rayleigh_maximizer(B_dense: np.ndarray, gamma_k: np.ndarray) -> np.ndarray:
    """Unit-norm maximizer of (gamma^T u)^2 / u^T B u via Cholesky solve."""
    x = cho_solve(cho_factor(B_dense, lower=True), gamma_k)
    u = x / np.linalg.norm(x)
    if gamma_k @ u < 0.0:  # canonical sign: Gamma_k^T u_k >= 0
        u = -u
    return u


def optimal_filter(stats: ChannelStats, q, rho: float, k: int) -> np.ndarray:
    """SINR-optimal unit-norm receiver vector for user k at fixed powers q.

    The numerator scale q_k does not move the argmax, so the filter is well
    defined even when q_k = 0.
    """
    B = build_B(stats, q, rho, k)
    if B.rank_weights.size == 0:
        x = stats.gamma[:, k] / B.diag
        return x / np.linalg.norm(x)
    return rayleigh_maximizer(B.dense(), stats.gamma[:, k])


def optimal_filters(stats: ChannelStats, q, rho: float) -> np.ndarray:
    """Per-user optimal filters stacked as columns of an M x K matrix."""
    U = np.empty((stats.M, stats.K))
    for k in range(stats.K):
        U[:, k] = optimal_filter(stats, q, rho, k)
    return U
