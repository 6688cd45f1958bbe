"""Channel-estimation statistics used by the closed-form rate.

From beta and the pilot Gram structure this derives, per AP-user link, the
MMSE scaling c_mk and the estimate variance gamma_mk = E|ghat_mk|^2, plus
the per-user vectors/diagonals entering the statistical SINR.  Nothing here
is ever materialized as a dense M x M matrix: every quadratic form the rate
needs reduces to O(M) dot products against these vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pilots import PilotBook
from .topology import SimParams, Topology


def compute_c(beta: np.ndarray, gram2: np.ndarray, tau: int, p_p: float) -> np.ndarray:
    """MMSE estimator scaling: sqrt(tau p_p) beta / (tau p_p sum_k' beta |gram|^2 + 1)."""
    scale = np.sqrt(tau * p_p)
    denom = tau * p_p * (beta @ gram2) + 1.0
    return scale * beta / denom


def compute_gamma(beta: np.ndarray, c: np.ndarray, tau: int, p_p: float) -> np.ndarray:
    """Estimate variance gamma_mk = sqrt(tau p_p) beta_mk c_mk."""
    return np.sqrt(tau * p_p) * beta * c


@dataclass(frozen=True)
class ChannelStats:
    """Per-link estimation statistics for one (topology, pilot book) pair."""

    beta: np.ndarray    # (M, K)
    gram2: np.ndarray   # (K, K)
    tau: int
    p_p: float
    c: np.ndarray       # (M, K)
    gamma: np.ndarray   # (M, K)

    @classmethod
    def build(cls, beta, gram2, tau, p_p) -> "ChannelStats":
        beta = np.asarray(beta, dtype=float)
        gram2 = np.asarray(gram2, dtype=float)
        if np.any(beta <= 0):
            raise ValueError("beta must be strictly positive")
        c = compute_c(beta, gram2, tau, p_p)
        gamma = compute_gamma(beta, c, tau, p_p)
        return cls(beta=beta, gram2=gram2, tau=tau, p_p=p_p, c=c, gamma=gamma)

    @property
    def M(self) -> int:
        return self.beta.shape[0]

    @property
    def K(self) -> int:
        return self.beta.shape[1]


def channel_stats(topology: Topology, pilots: PilotBook, params: SimParams) -> ChannelStats:
    return ChannelStats.build(topology.beta, pilots.gram2, pilots.tau, params.p_p)


def assemble_user_matrices(stats: ChannelStats, k: int):
    """Vectors/diagonals of user k's SINR terms.

    Returns ``(Gamma_k, Delta_k, Ddiag_k, Rdiag_k)`` where ``Gamma_k`` is the
    (M,) vector of gamma_mk, ``Delta_k[:, k']`` holds gamma_mk beta_mk'/beta_mk,
    ``Ddiag_k[:, k']`` holds the diagonal beta_mk' gamma_mk, and ``Rdiag_k``
    is the diagonal gamma_mk.
    """
    if not 0 <= k < stats.K:
        raise IndexError(f"user index {k} out of range for K={stats.K}")
    gamma_k = stats.gamma[:, k]
    delta = (gamma_k / stats.beta[:, k])[:, None] * stats.beta
    ddiag = gamma_k[:, None] * stats.beta
    return gamma_k, delta, ddiag, gamma_k.copy()
