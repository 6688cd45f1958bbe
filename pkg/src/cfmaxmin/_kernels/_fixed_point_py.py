"""Pure-NumPy fallback for the power-control fixed-point kernel."""

from __future__ import annotations

import numpy as np


def fixed_point_iterate(coupling, noise, p_max, t, tol, max_iters):
    """Monotone power iteration toward the minimal power vector meeting target t.

    ``coupling`` is the K x K interference matrix (self-interference on the
    diagonal), ``noise`` the per-user constant term.  Starting from q = 0 the
    Jacobi update

        q_k <- min(p_max_k, t * (sum_{k'!=k} coupling_kk' q_k' + noise_k)
                             / (1 - t * coupling_kk))

    increases monotonically; it converges to the minimal feasible power
    vector when one exists and stalls at the clamp otherwise.  The caller
    must ensure t * coupling_kk < 1 for all k.

    Returns ``(q, iterations, converged)``.
    """
    coupling = np.asarray(coupling, dtype=float)
    noise = np.asarray(noise, dtype=float)
    p_max = np.asarray(p_max, dtype=float)

    diag = np.diagonal(coupling)
    off = coupling - np.diag(diag)
    gain = t / (1.0 - t * diag)

    q = np.zeros_like(noise)
    for it in range(1, int(max_iters) + 1):
        q_new = np.minimum(p_max, gain * (off @ q + noise))
        delta = np.max(np.abs(q_new - q))
        q = q_new
        if delta <= tol:
            return q, it, True
    return q, int(max_iters), False
