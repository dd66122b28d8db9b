"""Propagation and link-rate model.

Log-distance pathloss, RSRP as transmit power minus pathloss, and a
capped-Shannon rate per resource block with interference weighted by the
neighbours' resource block utilization.
"""

from __future__ import annotations

import numpy as np

MIN_DISTANCE_KM = 0.001
RB_BANDWIDTH_HZ = 180e3
THERMAL_NOISE_DBM_HZ = -174.0


def pathloss_db(distance_km):
    """95 + 27 log10(d[km]), with d clamped below at 1 m.

    Accepts scalars or arrays. Non-positive or NaN distances raise.
    """
    d = np.asarray(distance_km, dtype=float)
    if np.any(np.isnan(d)) or np.any(d <= 0.0):
        raise ValueError(f"distance must be positive and finite, got {distance_km!r}")
    pl = 95.0 + 27.0 * np.log10(np.maximum(d, MIN_DISTANCE_KM))
    return float(pl) if pl.ndim == 0 else pl


def distances_km(topo) -> np.ndarray:
    """3-D UE-to-BS distances, shape (num_ue, num_bs)."""
    diff = topo.ue_positions[:, None, :] - topo.bs_positions[None, :, :]
    horiz = np.hypot(diff[..., 0], diff[..., 1])
    dz = topo.bs_antenna_height - topo.ue_antenna_height
    return np.sqrt(horiz**2 + dz**2) / 1000.0


def rsrp_dbm(bs: int, ue: int, topo, shadowing_db: np.ndarray | None = None) -> float:
    d = distances_km(topo)[ue, bs]
    value = topo.tx_power_dbm - pathloss_db(d)
    if shadowing_db is not None:
        value += shadowing_db[ue, bs]
    return float(value)


def rsrp_matrix(topo, shadowing_db: np.ndarray | None = None) -> np.ndarray:
    rsrp = topo.tx_power_dbm - pathloss_db(distances_km(topo))
    if shadowing_db is not None:
        rsrp = rsrp + shadowing_db
    return rsrp


def noise_per_rb_dbm(noise_figure_db: float = 9.0) -> float:
    return THERMAL_NOISE_DBM_HZ + 10.0 * np.log10(RB_BANDWIDTH_HZ) + noise_figure_db


def sinr_matrix(rsrp: np.ndarray, loads: np.ndarray, n_rb: int,
                noise_figure_db: float = 9.0) -> np.ndarray:
    """Linear SINR of UE u if served by BS m, shape (num_ue, num_bs).

    Received power is spread evenly over the ``n_rb`` blocks; every other
    BS interferes in proportion to its utilization ``loads``.
    """
    rx_mw = 10.0 ** (rsrp / 10.0) / n_rb
    noise_mw = 10.0 ** (noise_per_rb_dbm(noise_figure_db) / 10.0)
    weighted = rx_mw * np.asarray(loads, dtype=float)[None, :]
    interference = weighted.sum(axis=1, keepdims=True) - weighted
    return rx_mw / (noise_mw + interference)


def rate_per_rb_bits(rsrp: np.ndarray, loads: np.ndarray, n_rb: int, tti: float,
                     noise_figure_db: float = 9.0, max_se: float = 5.55) -> np.ndarray:
    """Bits one RB carries in one TTI for each (UE, serving BS) pair."""
    sinr = sinr_matrix(rsrp, loads, n_rb, noise_figure_db)
    se = np.minimum(np.log2(1.0 + sinr), max_se)
    return RB_BANDWIDTH_HZ * se * tti
