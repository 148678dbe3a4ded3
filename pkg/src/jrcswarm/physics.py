"""Link-budget formulas for the radar and communication links of a JRC UAV swarm.

All quantities are linear SI units (W, m, Hz, bit/s). Functions accept scalars
or numpy arrays and broadcast elementwise unless stated otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from jrcswarm.errors import DegenerateGeometryError, InvalidPowerError

LN2 = math.log(2.0)
FOUR_PI_CUBED = (4.0 * math.pi) ** 3


class Position3D(NamedTuple):
    """Cartesian position in meters; ``h`` is altitude above ground."""

    x: float
    y: float
    h: float


@dataclass(frozen=True)
class RadarParams:
    """Monostatic radar constants (linear units; noise figure already linear)."""

    tx_gain_gT: float = 20.0
    rx_gain_gR: float = 20.0
    carrier_freq_fc: float = 5e9
    rcs_sigma: float = 1.0
    radar_bandwidth_Br: float = 20e6
    boltzmann_k: float = 1.38e-23
    noise_temp_T0: float = 290.0
    noise_figure_F: float = 10 ** (5 / 10)
    probing_loss_l: float = 0.8
    snr_min_eta: float = 10.0
    light_speed_C: float = 3e8

    @property
    def wavelength(self) -> float:
        return self.light_speed_C / self.carrier_freq_fc

    @property
    def noise_factor_gamma(self) -> float:
        """k * T0 * F * l, in J."""
        return self.boltzmann_k * self.noise_temp_T0 * self.noise_figure_F * self.probing_loss_l

    @property
    def snr_per_watt_at_1m(self) -> float:
        lam = self.wavelength
        num = self.tx_gain_gT * self.rx_gain_gR * lam * lam * self.rcs_sigma
        return num / (FOUR_PI_CUBED * self.noise_factor_gamma * self.radar_bandwidth_Br)


@dataclass(frozen=True)
class CommParams:
    """UAV to FBS uplink constants."""

    carrier_freq_fc: float = 5e9
    light_speed_C: float = 3e8
    comm_bandwidth_Bc: float = 40e6
    los_prob_xi: float = 0.95
    nlos_prob_xi: float = 0.5
    los_atten_mu: float = 0.5
    nlos_atten_mu: float = 2.0
    noise_density_delta0: float = 0.5e-10
    rate_min_Rmin: float = 0.1e6
    fbs_rx_gain_ghR: float = 20.0

    @property
    def free_space_K0(self) -> float:
        return (4.0 * math.pi * self.carrier_freq_fc / self.light_speed_C) ** 2

    @property
    def excess_loss(self) -> float:
        return self.los_prob_xi * self.los_atten_mu + self.nlos_prob_xi * self.nlos_atten_mu

    @property
    def noise_power(self) -> float:
        return self.comm_bandwidth_Bc * self.noise_density_delta0


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(lin):
    return 10.0 * np.log10(lin)


def _scalar_or_array(value):
    arr = np.asarray(value)
    return float(arr) if arr.ndim == 0 else arr


def distance3d(a, b):
    """Euclidean distance between positions; trailing axis holds (x, y, h)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    diff = a - b
    return _scalar_or_array(np.sqrt(np.sum(diff * diff, axis=-1)))


def _require_positive_distance(d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0.0):
        raise DegenerateGeometryError("distance must be > 0 (coincident nodes)")
    return d


def radar_snr(p_radar, d, rp: RadarParams):
    """Received radar echo SNR for transmit power ``p_radar`` at range ``d``."""
    d = _require_positive_distance(d)
    p = np.asarray(p_radar, dtype=float)
    return _scalar_or_array(p * rp.snr_per_watt_at_1m / d**4)


def radar_range(p_radar, rp: RadarParams):
    """Largest range at which the SNR still meets ``rp.snr_min_eta``."""
    p = np.asarray(p_radar, dtype=float)
    if np.any(p <= 0.0):
        raise InvalidPowerError(f"radar power must be > 0, got {p_radar!r}")
    return _scalar_or_array((p * rp.snr_per_watt_at_1m / rp.snr_min_eta) ** 0.25)


def channel_gain(d, cp: CommParams):
    """Average UAV-FBS power gain with fixed LoS/NLoS mixture."""
    d = _require_positive_distance(d)
    return _scalar_or_array(1.0 / (cp.free_space_K0 * d * d * cp.excess_loss))


def sinr_all(p_comm, gains, cp: CommParams, tx_gain_gT: float, interference: bool = True):
    """SINR of every UAV at the FBS.

    ``gains`` has shape (..., M); leading axes index candidate geometries.
    Each interference sum adds the other UAVs' received powers in ascending
    order, so the result does not depend on UAV ordering.
    """
    p = np.asarray(p_comm, dtype=float)
    g = np.asarray(gains, dtype=float)
    received = p * (tx_gain_gT * cp.fbs_rx_gain_ghR) * g
    noise = cp.noise_power
    if not interference or received.shape[-1] == 1:
        return received / noise
    m = received.shape[-1]
    others = np.repeat(received[..., None, :], m, axis=-2)
    idx = np.arange(m)
    others[..., idx, idx] = 0.0
    others.sort(axis=-1)
    return received / (others.sum(axis=-1) + noise)


def sinr(m: int, p_comm_all, gains_all, cp: CommParams, tx_gain_gT: float,
         interference: bool = True) -> float:
    """SINR of UAV ``m`` given every UAV's comm power and channel gain."""
    p = np.asarray(p_comm_all, dtype=float)
    g = np.asarray(gains_all, dtype=float)
    if p.shape != g.shape or p.ndim != 1 or p.size == 0:
        raise ValueError("p_comm_all and gains_all must be equal-length 1-D sequences")
    if not 0 <= m < p.size:
        raise IndexError(f"uav index {m} out of range for {p.size} UAVs")
    return float(sinr_all(p, g, cp, tx_gain_gT, interference)[m])


def data_rate(sinr_val, cp: CommParams):
    """Shannon rate in bit/s."""
    s = np.asarray(sinr_val, dtype=float)
    return _scalar_or_array(cp.comm_bandwidth_Bc * np.log1p(s) / LN2)


def required_sinr(cp: CommParams) -> float:
    """SINR at which the Shannon rate equals ``cp.rate_min_Rmin``."""
    return math.expm1(cp.rate_min_Rmin * LN2 / cp.comm_bandwidth_Bc)


def uplink_rates(uav_pos, p_comm, fbs, cp: CommParams, tx_gain_gT: float,
                 interference: bool = True) -> np.ndarray:
    """Rates of all UAVs for one or many FBS positions.

    ``uav_pos`` is (M, 3); ``fbs`` is (3,) or (K, 3). Returns (M,) or (K, M).
    """
    uav_pos = np.asarray(uav_pos, dtype=float)
    fbs = np.asarray(fbs, dtype=float)
    d = np.sqrt(np.sum((fbs[..., None, :] - uav_pos) ** 2, axis=-1))
    gains = channel_gain(d, cp)
    s = sinr_all(p_comm, gains, cp, tx_gain_gT, interference)
    return cp.comm_bandwidth_Bc * np.log1p(s) / LN2
