"""Closed-form statistical uplink SINR and rate.

For receiver coefficients u_k (unit norm) and powers q the per-user SINR is

    q_k (Gamma_k^T u_k)^2
    ---------------------------------------------------------------------
    sum_{k'!=k} q_k' g2_kk' (Delta_kk'^T u_k)^2
        + sum_{k'} q_k' u_k^T diag(beta_k' gamma_k) u_k
        + (1/rho) u_k^T diag(gamma_k) u_k

with g2 the squared pilot Gram matrix.  All terms are evaluated as O(M K)
dot products; no dense M x M matrix is ever formed.  Every matrix involved
has real nonnegative entries, so receiver coefficients are treated as real
vectors throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chanstats import ChannelStats


def _quadratic_terms(stats: ChannelStats, U: np.ndarray):
    """Shared building blocks for the SINR denominator, for all users at once.

    Returns ``(gtu, dtu, dquad, rquad)``: gtu[k] = Gamma_k^T u_k,
    dtu[k, k'] = Delta_kk'^T u_k, dquad[k, k'] = u_k^T D_kk' u_k and
    rquad[k] = u_k^T R_k u_k.
    """
    gtu = np.einsum("mk,mk->k", stats.gamma, U)
    w = stats.gamma * U / stats.beta
    dtu = w.T @ stats.beta
    u2g = U * U * stats.gamma
    dquad = u2g.T @ stats.beta
    rquad = u2g.sum(axis=0)
    return gtu, dtu, dquad, rquad


def sinr_all(stats: ChannelStats, q: np.ndarray, U: np.ndarray, rho: float) -> np.ndarray:
    """Statistical SINR of every user for filters U (M x K) and powers q (K,)."""
    q = np.asarray(q, dtype=float)
    gtu, dtu, dquad, rquad = _quadratic_terms(stats, U)
    contamination = stats.gram2 * dtu**2
    np.fill_diagonal(contamination, 0.0)
    denom = contamination @ q + dquad @ q + rquad / rho
    return q * gtu**2 / denom


def sinr_k(stats: ChannelStats, q, u_k: np.ndarray, rho: float, k: int) -> float:
    """Statistical SINR of user k for a single filter u_k (M,)."""
    q = np.asarray(q, dtype=float)
    gamma_k = stats.gamma[:, k]
    beta_k = stats.beta[:, k]
    gtu = gamma_k @ u_k
    dtu = (gamma_k * u_k / beta_k) @ stats.beta          # (K,) Delta_kk'^T u_k
    dquad = (u_k * u_k * gamma_k) @ stats.beta           # (K,) u^T D_kk' u
    rquad = (u_k * u_k) @ gamma_k

    contamination = stats.gram2[k] * dtu**2
    denom = contamination @ q - contamination[k] * q[k] + dquad @ q + rquad / rho
    return float(q[k] * gtu**2 / denom)


def rate(sinr) -> np.ndarray:
    """Achievable rate in bits/s/Hz: log2(1 + SINR)."""
    return np.log2(1.0 + np.asarray(sinr, dtype=float))


@dataclass(frozen=True)
class Solution:
    """Receiver filters, powers and the resulting per-user SINR/rate."""

    U: np.ndarray      # (M, K), unit-norm columns
    q: np.ndarray      # (K,) powers within [0, p_max]
    sinr: np.ndarray   # (K,) linear
    rate: np.ndarray   # (K,) bits/s/Hz

    @classmethod
    def evaluate(cls, stats: ChannelStats, U, q, rho: float) -> "Solution":
        U = np.asarray(U, dtype=float)
        q = np.asarray(q, dtype=float)
        s = sinr_all(stats, q, U, rho)
        return cls(U=U, q=q, sinr=s, rate=rate(s))

    @property
    def min_rate(self) -> float:
        return float(self.rate.min())
