import json

import numpy as np
import pytest

import cfmaxmin as cf
from cfmaxmin.montecarlo import _StreamingMoments
from cfmaxmin.sinr import _quadratic_terms


def small_setup(seed=0, M=8, K=3, tau=2, mode="random", p_p=None):
    params = cf.SimParams(M=M, K=K, tau=tau, seed=seed,
                          **({"p_p": p_p} if p_p else {}))
    rng = np.random.default_rng(seed)
    topo = cf.generate_topology(params, rng)
    pilots = cf.assign_pilots(K, tau, mode, rng)
    return topo, pilots, params


def test_draws_deterministic():
    topo, pilots, params = small_setup()
    d1 = cf.draw_channel(topo, pilots, params, np.random.default_rng(4), n_draws=10)
    d2 = cf.draw_channel(topo, pilots, params, np.random.default_rng(4), n_draws=10)
    np.testing.assert_array_equal(d1.ghat, d2.ghat)
    np.testing.assert_array_equal(d1.symbols, d2.symbols)


def test_channel_and_estimate_variances():
    topo, pilots, params = small_setup(seed=2)
    stats = cf.channel_stats(topo, pilots, params)
    draws = cf.draw_channel(topo, pilots, params, np.random.default_rng(8), n_draws=40_000)
    var_g = np.mean(np.abs(draws.g) ** 2, axis=0)
    var_ghat = np.mean(np.abs(draws.ghat) ** 2, axis=0)
    np.testing.assert_allclose(var_g, topo.beta, rtol=0.05)
    np.testing.assert_allclose(var_ghat, stats.gamma, rtol=0.05)


def test_estimate_reconstruction_and_shared_pilot_noise():
    topo, pilots, params = small_setup(seed=3, K=4, tau=1)  # all users share one pilot
    stats = cf.channel_stats(topo, pilots, params)
    d = cf.draw_channel(topo, pilots, params, np.random.default_rng(1), n_draws=5)
    scale = np.sqrt(pilots.tau * params.p_p)
    eff_noise = d.pilot_noise[:, :, pilots.assignment]
    rebuilt = stats.c * (scale * (d.g @ pilots.gram) + eff_noise)
    np.testing.assert_allclose(rebuilt, d.ghat, rtol=1e-12)
    # users on one sequence observe the same effective pilot noise
    np.testing.assert_array_equal(eff_noise[..., 0], eff_noise[..., 1])


def test_orthogonal_pilots_estimate_from_own_channel_only():
    topo, pilots, params = small_setup(seed=4, K=3, tau=3, mode="orthogonal")
    stats = cf.channel_stats(topo, pilots, params)
    d = cf.draw_channel(topo, pilots, params, np.random.default_rng(2), n_draws=4)
    scale = np.sqrt(pilots.tau * params.p_p)
    own = stats.c * (scale * d.g + d.pilot_noise[:, :, pilots.assignment])
    np.testing.assert_allclose(d.ghat, own, rtol=1e-12)


def test_high_pilot_power_gives_faithful_estimates():
    # tau * p_p * beta >> 1 on every link (physical beta ~ 1e-15..1e-8)
    topo, pilots, params = small_setup(seed=5, K=2, tau=2, mode="orthogonal", p_p=1e18)
    d = cf.draw_channel(topo, pilots, params, np.random.default_rng(3), n_draws=20_000)
    g = d.g[:, :, 0].ravel()
    ghat = d.ghat[:, :, 0].ravel()
    num = np.abs(np.mean(ghat * g.conj()))
    corr = num / np.sqrt(np.mean(np.abs(g) ** 2) * np.mean(np.abs(ghat) ** 2))
    assert corr > 0.999


def test_zero_power_report():
    topo, pilots, params = small_setup(seed=6)
    stats = cf.channel_stats(topo, pilots, params)
    U = np.full((8, 3), 1 / np.sqrt(8))
    d = cf.draw_channel(topo, pilots, params, np.random.default_rng(5), n_draws=2_000)
    rep = cf.empirical_terms(d, U, np.zeros(3), stats, params.rho)
    np.testing.assert_array_equal(rep.ds2_emp, np.zeros(3))
    np.testing.assert_array_equal(rep.bu_emp, np.zeros(3))
    np.testing.assert_array_equal(rep.iui_emp, np.zeros(3))
    assert np.all(rep.tn_emp > 0)
    assert rep.low_confidence


def test_decomposition_reconstructs_received_signal():
    topo, pilots, params = small_setup(seed=7)
    stats = cf.channel_stats(topo, pilots, params)
    U = np.full((8, 3), 1 / np.sqrt(8))
    d = cf.draw_channel(topo, pilots, params, np.random.default_rng(6), n_draws=3_000)
    rep = cf.empirical_terms(d, U, np.full(3, 0.8), stats, params.rho)
    assert rep.decomposition_error < 1e-10


def test_terms_match_closed_form_smallscale():
    topo, pilots, params = small_setup(seed=8, M=10, K=3, tau=2)
    rep = cf.run_oracle(topo, pilots, params, np.random.default_rng(9), n_draws=60_000)
    errs = rep.max_relative_errors()
    assert errs["ds2"] < 0.03
    assert errs["bu"] < 0.05
    assert errs["iui"] < 0.05
    assert errs["tn"] < 0.05
    assert errs["sinr"] < 0.03
    assert not rep.low_confidence


def test_pilot_sharing_contamination_dominates_at_scale():
    # two users forced onto one sequence over near-homogeneous gains: the
    # coherent contamination term sums amplitudes (~M^2 in power) while the
    # incoherent spread sums powers (~M), so it dominates at large M
    M = 64
    rng = np.random.default_rng(10)
    beta = rng.uniform(0.5, 2.0, size=(M, 2))
    topo = cf.Topology(ap_pos=np.zeros((M, 2)), user_pos=np.zeros((2, 2)),
                       beta=beta, shadow_z=np.zeros((M, 2)))
    params = cf.SimParams(M=M, K=2, tau=1, rho=1.0, p_p=1.0)
    pilots = cf.assign_pilots(2, 1, "random", rng)
    stats = cf.channel_stats(topo, pilots, params)
    assert stats.gram2[0, 1] == 1.0  # single sequence: guaranteed collision
    U = np.full((M, 2), 1 / np.sqrt(M))
    d = cf.draw_channel(topo, pilots, params, np.random.default_rng(11), n_draws=20_000)
    rep = cf.empirical_terms(d, U, np.ones(2), stats, params.rho)
    _, dtu, dquad, _ = _quadratic_terms(stats, U)
    coherent = params.rho * stats.gram2[0, 1] * dtu[0, 1] ** 2
    incoherent = params.rho * dquad[0, 1]
    assert coherent > 5 * incoherent
    assert rep.iui_emp[0] == pytest.approx(rep.iui_closed[0], rel=0.08)


def test_closed_form_holds_at_solved_operating_point():
    # validate the rate expression at the optimizer's own (U, q), not just
    # at uniform filters: this is the point the solver actually reports
    params = cf.SimParams(M=12, K=4, tau=2, seed=31)
    rng = np.random.default_rng(31)
    topo = cf.generate_topology(params, rng)
    pilots = cf.assign_pilots(4, 2, "random", rng)
    stats = cf.channel_stats(topo, pilots, params)
    sol, _ = cf.solve_p1(stats, params)
    d = cf.draw_channel(topo, pilots, params, np.random.default_rng(32), n_draws=60_000)
    rep = cf.empirical_terms(d, sol.U, sol.q, stats, params.rho)
    assert rep.max_relative_errors()["sinr"] < 0.04
    np.testing.assert_allclose(rep.sinr_closed, sol.sinr, rtol=1e-12)


def test_streaming_moments_match_two_pass(rng):
    x = rng.standard_normal((1000, 4)) + 1j * rng.standard_normal((1000, 4))
    acc = _StreamingMoments()
    for chunk in np.split(x, [100, 350, 600]):
        acc.update(chunk)
    np.testing.assert_allclose(acc.mean, x.mean(axis=0), rtol=1e-12)
    np.testing.assert_allclose(acc.var, np.var(x, axis=0), rtol=1e-12)
    np.testing.assert_allclose(acc.mean_abs2, np.mean(np.abs(x) ** 2, axis=0), rtol=1e-12)


def test_report_json(tmp_path):
    topo, pilots, params = small_setup(seed=12)
    rep = cf.run_oracle(topo, pilots, params, np.random.default_rng(0), n_draws=2_000)
    data = json.loads(rep.to_json())
    assert data["draws"] == 2_000
    assert data["low_confidence"] is True
    assert set(data["max_relative_errors"]) == {"ds2", "bu", "iui", "tn", "sinr"}
