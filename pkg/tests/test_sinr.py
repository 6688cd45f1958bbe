import numpy as np
import pytest

import cfmaxmin as cf
from tests.conftest import make_instance, random_unit_columns


def dense_reference_sinr(stats, q, U, rho, k):
    """Literal dense evaluation of the rate's quadratic forms (test oracle)."""
    M = stats.M
    u = U[:, k]
    gamma_k = stats.gamma[:, k]
    A = q[k] * np.outer(gamma_k, gamma_k)
    B = np.zeros((M, M))
    for kp in range(stats.K):
        if kp != k:
            delta = gamma_k * stats.beta[:, kp] / stats.beta[:, k]
            B += q[kp] * stats.gram2[k, kp] * np.outer(delta, delta)
        B += q[kp] * np.diag(stats.beta[:, kp] * gamma_k)
    B += np.diag(gamma_k) / rho
    return (u @ A @ u) / (u @ B @ u)


def test_hand_degenerate_case():
    stats = cf.ChannelStats.build([[1.0]], [[1.0]], 1, 1.0)
    u = np.array([1.0])
    assert cf.sinr_k(stats, [1.0], u, 1.0, 0) == pytest.approx(0.25, abs=1e-15)


def test_rate_values():
    assert cf.rate(0.0) == 0.0
    assert cf.rate(1.0) == 1.0
    assert cf.rate(0.25) == pytest.approx(0.321928, abs=1e-6)


def test_zero_power_zero_sinr(rng):
    stats, rho = make_instance(rng, M=6, K=3, tau=2)
    U = random_unit_columns(rng, 6, 3)
    q = np.array([0.7, 0.0, 0.4])
    assert cf.sinr_k(stats, q, U[:, 1], rho, 1) == 0.0


def test_numerator_linear_denominator_affine(rng):
    # SINR_k = q_k * const / (affine in q): q_k/SINR_k must be affine in q
    stats, rho = make_instance(rng, M=6, K=4, tau=2)
    U = random_unit_columns(rng, 6, 4)
    k = 2

    def denom(q):
        return q[k] / cf.sinr_k(stats, q, U[:, k], rho, k)

    qa = rng.uniform(0.1, 1.0, 4)
    qb = rng.uniform(0.1, 1.0, 4)
    mid = denom((qa + qb) / 2)
    assert mid == pytest.approx((denom(qa) + denom(qb)) / 2, rel=1e-12)


def test_sign_and_scale_invariance(rng):
    stats, rho = make_instance(rng, M=5, K=3, tau=3, mode="orthogonal")
    U = random_unit_columns(rng, 5, 3)
    q = rng.uniform(0.1, 1.0, 3)
    s_pos = cf.sinr_all(stats, q, U, rho)
    s_neg = cf.sinr_all(stats, q, -U, rho)
    np.testing.assert_allclose(s_pos, s_neg, rtol=1e-14)


def test_monotonicity_in_powers_and_snr(rng):
    stats, rho = make_instance(rng, M=6, K=4, tau=2)
    U = random_unit_columns(rng, 6, 4)
    q = rng.uniform(0.2, 0.8, 4)
    base = cf.sinr_k(stats, q, U[:, 0], rho, 0)

    q_more_interf = q.copy()
    q_more_interf[2] *= 1.5
    assert cf.sinr_k(stats, q_more_interf, U[:, 0], rho, 0) < base

    q_more_signal = q.copy()
    q_more_signal[0] *= 1.5
    assert cf.sinr_k(stats, q_more_signal, U[:, 0], rho, 0) > base

    assert cf.sinr_k(stats, q, U[:, 0], rho * 2, 0) > base


def test_orthogonal_pilots_drop_contamination(rng):
    stats, rho = make_instance(rng, M=6, K=4, tau=4, mode="orthogonal")
    U = random_unit_columns(rng, 6, 4)
    q = rng.uniform(0.1, 1.0, 4)
    # reference without the contamination quadratic at all
    for k in range(4):
        u = U[:, k]
        gamma_k = stats.gamma[:, k]
        denom = (u * u * gamma_k) @ stats.beta @ q + (u * u) @ gamma_k / rho
        expected = q[k] * (gamma_k @ u) ** 2 / denom
        assert cf.sinr_k(stats, q, u, rho, k) == pytest.approx(expected, rel=1e-12)


def test_matches_dense_reference(rng):
    for mode in ("orthogonal", "random"):
        stats, rho = make_instance(rng, M=9, K=5, tau=2, mode=mode)
        U = random_unit_columns(rng, 9, 5)
        q = rng.uniform(0.05, 1.0, 5)
        fast = cf.sinr_all(stats, q, U, rho)
        for k in range(5):
            dense = dense_reference_sinr(stats, q, U, rho, k)
            assert fast[k] == pytest.approx(dense, rel=1e-10)
            assert cf.sinr_k(stats, q, U[:, k], rho, k) == pytest.approx(dense, rel=1e-10)


def test_solution_evaluate(rng):
    stats, rho = make_instance(rng, M=6, K=3, tau=2)
    U = random_unit_columns(rng, 6, 3)
    q = rng.uniform(0.1, 1.0, 3)
    sol = cf.Solution.evaluate(stats, U, q, rho)
    np.testing.assert_allclose(sol.rate, np.log2(1 + sol.sinr), rtol=1e-14)
    np.testing.assert_allclose(sol.sinr, cf.sinr_all(stats, q, U, rho), rtol=1e-14)
    assert sol.min_rate == sol.rate.min()
