"""Network geometry and large-scale fading.

APs and users are dropped uniformly at random on a D x D square that wraps
around at the edges (torus), so the simulation area has no boundary effects.
The large-scale gain beta_mk combines a three-slope path-loss model with
log-normal shadowing applied beyond the far breakpoint distance.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

BOLTZMANN = 1.381e-23  # J/K


def noise_power(bandwidth_hz: float, noise_figure_db: float, temperature_k: float) -> float:
    """Receiver noise power in watts: BW * k_B * T0 * 10^(NF/10)."""
    if bandwidth_hz <= 0 or temperature_k <= 0 or noise_figure_db < 0:
        raise ValueError("bandwidth and temperature must be positive, noise figure >= 0 dB")
    return bandwidth_hz * BOLTZMANN * temperature_k * 10.0 ** (noise_figure_db / 10.0)


# Default link budget: 20 MHz bandwidth, 9 dB noise figure, 290 K, and
# 100 mW budgets for both pilot and data transmission.  SNRs are kept
# normalized (linear, dimensionless) everywhere downstream.
DEFAULT_NOISE_W = noise_power(20e6, 9.0, 290.0)
DEFAULT_PILOT_SNR = 0.1 / DEFAULT_NOISE_W
DEFAULT_DATA_SNR = 0.1 / DEFAULT_NOISE_W

# Minimum AP-user separation; avoids the log singularity at zero distance.
MIN_DISTANCE_M = 1.0


@dataclass(frozen=True)
class SimParams:
    """Static simulation parameters.

    Powers are normalized SNRs (linear scale): ``rho`` for uplink data,
    ``p_p`` for pilots, ``p_max`` for the per-user power-control ceiling.
    """

    M: int
    K: int
    D_km: float = 1.0
    tau: int = 1
    sigma_sh_db: float = 8.0
    rho: float = DEFAULT_DATA_SNR
    p_p: float = DEFAULT_PILOT_SNR
    p_max: float = 1.0
    carrier_mhz: float = 1900.0
    ap_height_m: float = 15.0
    user_height_m: float = 1.65
    d0_m: float = 10.0
    d1_m: float = 50.0
    seed: int = 0

    def __post_init__(self):
        if self.M < 1 or self.K < 1:
            raise ValueError("M and K must be at least 1")
        if self.tau < 1:
            raise ValueError("tau must be at least 1")
        if self.D_km <= 0:
            raise ValueError("D_km must be positive")
        if self.rho <= 0 or self.p_p <= 0 or self.p_max <= 0:
            raise ValueError("rho, p_p and p_max must be positive")
        if not 0 < self.d0_m < self.d1_m:
            raise ValueError("breakpoints must satisfy 0 < d0 < d1")

    @property
    def side_m(self) -> float:
        return self.D_km * 1000.0


@dataclass(frozen=True)
class Topology:
    """One network realization: positions in meters and per-link gains."""

    ap_pos: np.ndarray      # (M, 2)
    user_pos: np.ndarray    # (K, 2)
    beta: np.ndarray        # (M, K) linear power gains
    shadow_z: np.ndarray    # (M, K) standard-normal shadowing draws

    def to_json(self) -> str:
        payload = {k: np.asarray(v).tolist() for k, v in asdict(self).items()}
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "Topology":
        payload = json.loads(text)
        return cls(**{k: np.asarray(v, dtype=float) for k, v in payload.items()})


def wrap_distance(a, b, side_m):
    """Torus distance between points on the wrap-around square.

    Per coordinate the shorter way around the edge is taken, which equals
    the minimum Euclidean distance over the nine shifted images of ``b``.
    Broadcasts over leading axes; the last axis holds (x, y).
    """
    delta = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    delta = np.minimum(delta, side_m - delta)
    return np.hypot(delta[..., 0], delta[..., 1])


def _fixed_loss_db(params: SimParams) -> float:
    # COST231-Hata constant term; frequency in MHz, heights in meters.
    f = params.carrier_mhz
    log_f = np.log10(f)
    return (
        46.3
        + 33.9 * log_f
        - 13.82 * np.log10(params.ap_height_m)
        - (1.1 * log_f - 0.7) * params.user_height_m
        + (1.56 * log_f - 0.8)
    )


def path_loss_db(params: SimParams, distance_m):
    """Three-slope path loss in dB (negative gain).

    35 dB/decade beyond d1, 20 dB/decade between d0 and d1, flat below d0.
    Distances are floored at MIN_DISTANCE_M; the model is continuous at
    both breakpoints.
    """
    d_km = np.maximum(np.asarray(distance_m, dtype=float), MIN_DISTANCE_M) / 1000.0
    d0_km = params.d0_m / 1000.0
    d1_km = params.d1_m / 1000.0
    L = _fixed_loss_db(params)

    far = -L - 35.0 * np.log10(d_km)
    mid = -L - 15.0 * np.log10(d1_km) - 20.0 * np.log10(d_km)
    near = -L - 15.0 * np.log10(d1_km) - 20.0 * np.log10(d0_km)
    return np.where(d_km > d1_km, far, np.where(d_km > d0_km, mid, near))


def large_scale_fading(params: SimParams, distance_m, shadow_z):
    """Linear power gain: three-slope path loss times log-normal shadowing.

    Shadowing (sigma_sh dB, standard-normal z) is applied only beyond the
    far breakpoint d1, where the slope model itself is valid.
    """
    pl_db = path_loss_db(params, distance_m)
    shadow_db = np.where(
        np.asarray(distance_m, dtype=float) > params.d1_m,
        params.sigma_sh_db * np.asarray(shadow_z, dtype=float),
        0.0,
    )
    return 10.0 ** ((pl_db + shadow_db) / 10.0)


def generate_topology(params: SimParams, rng: np.random.Generator) -> Topology:
    """Draw AP/user positions i.i.d. uniform on the square and compute beta."""
    side = params.side_m
    ap_pos = rng.uniform(0.0, side, size=(params.M, 2))
    user_pos = rng.uniform(0.0, side, size=(params.K, 2))
    shadow_z = rng.standard_normal((params.M, params.K))
    dist = wrap_distance(ap_pos[:, None, :], user_pos[None, :, :], side)
    beta = large_scale_fading(params, dist, shadow_z)
    return Topology(ap_pos=ap_pos, user_pos=user_pos, beta=beta, shadow_z=shadow_z)
