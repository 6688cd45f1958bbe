import numpy as np
import pytest

import cfmaxmin as cf


def make_instance(rng, M=8, K=4, tau=2, mode="random", beta_spread=4.0):
    """Random desk-scale instance: log-spread gains, random pilots, random SNRs.

    Returns ``(stats, rho)``; magnitudes are kept around unity so solver
    tests exercise generic conditioning rather than the physical scale
    (which generate_topology covers).
    """
    beta = 10.0 ** rng.uniform(-beta_spread, 0.0, size=(M, K))
    tau_eff = max(tau, K) if mode == "orthogonal" else tau
    pilots = cf.assign_pilots(K, tau_eff, mode, rng)
    p_p = 10.0 ** rng.uniform(1.0, 3.0)
    stats = cf.ChannelStats.build(beta, pilots.gram2, pilots.tau, p_p)
    rho = 10.0 ** rng.uniform(1.0, 3.0)
    return stats, rho


def random_unit_columns(rng, M, K):
    U = rng.uniform(0.05, 1.0, size=(M, K))
    return U / np.linalg.norm(U, axis=0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
