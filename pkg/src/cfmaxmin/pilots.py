"""Pilot sequences and their Gram structure.

Pilots are columns of the tau x tau identity (canonical orthonormal basis),
so inner products between assigned sequences are exactly 0 or 1 and the
squared Gram matrix is free of round-off.  In orthogonal mode every user
gets its own basis sequence; in random mode each user draws one of the tau
sequences uniformly at random, so users may collide.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MODES = ("orthogonal", "random")


@dataclass(frozen=True)
class PilotBook:
    tau: int
    mode: str
    assignment: np.ndarray  # (K,) index of each user's basis sequence
    phi: np.ndarray         # (tau, K) pilot matrix, one column per user
    gram2: np.ndarray       # (K, K) squared inner products |phi_k^H phi_k'|^2

    @property
    def gram(self) -> np.ndarray:
        # With 0/1 inner products the Gram matrix equals its square.
        return self.gram2


def assign_pilots(K: int, tau: int, mode: str, rng: np.random.Generator | None = None) -> PilotBook:
    """Build the pilot book for K users.

    Orthogonal mode requires tau >= K (distinct sequences); random mode
    draws assignments i.i.d. uniform over the tau basis sequences.
    """
    if mode not in MODES:
        raise ValueError(f"unknown pilot mode {mode!r}")
    if tau < 1:
        raise ValueError("tau must be at least 1")
    if mode == "orthogonal":
        if tau < K:
            raise ValueError(f"orthogonal pilots need tau >= K (got tau={tau}, K={K})")
        assignment = np.arange(K)
    else:
        if rng is None:
            raise ValueError("random pilot assignment needs an rng")
        assignment = rng.integers(0, tau, size=K)

    phi = np.zeros((tau, K))
    phi[assignment, np.arange(K)] = 1.0
    gram2 = (assignment[:, None] == assignment[None, :]).astype(float)
    return PilotBook(tau=tau, mode=mode, assignment=assignment, phi=phi, gram2=gram2)
