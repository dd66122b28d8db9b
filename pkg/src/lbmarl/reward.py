"""Per-BS reward: throughput scaled by a latency bracket and an RBU sigmoid.

    delay term   d(D)  = 1 + c / (1 + exp(-o (D - F))),   F = 2/3 PDB
    per-UE term  delta = -1 if the UE is disconnected, else d(D_avg)
    RBU term     e2(p) = 1 + c / (2 + 2 exp(-a (p - D_rbu)))
    BS reward    R_j   = e2(p_j) * (U_c + sum(delta)) / U_c * sum(R_i)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit


@dataclass(frozen=True)
class RewardParams:
    c: float = -2.0
    o: float = 75.0
    a: float = 20.0
    pdb: float = 0.150
    target_rbu: float = 0.8
    # starved-but-attached UEs are scored at this multiple of the PDB
    starved_delay_factor: float = 5.0

    def __post_init__(self):
        if not (self.o > 0 and self.a > 0 and self.pdb > 0):
            raise ValueError("o, a and pdb must be positive")
        if not 0.0 < self.target_rbu < 1.0:
            raise ValueError("target_rbu must lie in (0, 1)")

    @property
    def target_delay(self) -> float:
        return 2.0 / 3.0 * self.pdb


def daleth(d_avg, params: RewardParams):
    d = np.asarray(d_avg, dtype=float)
    if np.any(np.isnan(d)):
        raise ValueError("average delay is NaN")
    out = 1.0 + params.c * expit(params.o * (d - params.target_delay))
    return float(out) if out.ndim == 0 else out


def delta_i(connected: bool, d_avg, params: RewardParams) -> float:
    """-1 for a disconnected UE, else the delay term.

    ``d_avg`` of None/NaN means nothing was delivered in the window; such a
    UE is charged the drop-horizon delay.
    """
    if not connected:
        return -1.0
    if d_avg is None or np.isnan(d_avg):
        d_avg = params.starved_delay_factor * params.pdb
    return daleth(d_avg, params)


def epsilon1(deltas) -> float:
    d = np.asarray(deltas, dtype=float)
    if d.size == 0:
        return 0.0
    if np.any(d < -1.0) or np.any(d > 1.0):
        raise ValueError("delta values must lie in [-1, 1]")
    return float(d.mean())


def epsilon2(p, params: RewardParams):
    p = np.asarray(p, dtype=float)
    if np.any(np.isnan(p)) or np.any(p < 0.0) or np.any(p > 1.0):
        raise ValueError("RBU must lie in [0, 1]")
    out = 1.0 + 0.5 * params.c * expit(params.a * (p - params.target_rbu))
    return float(out) if out.ndim == 0 else out


def bs_reward(throughputs, deltas, p: float, params: RewardParams) -> float:
    """Reward of one BS; throughputs and deltas are per assigned UE."""
    r = np.asarray(throughputs, dtype=float)
    d = np.asarray(deltas, dtype=float)
    if r.shape != d.shape:
        raise ValueError("throughputs and deltas must have equal length")
    u_c = len(d)
    if u_c == 0:
        return 0.0
    return float(epsilon2(p, params) * (u_c + d.sum()) / u_c * r.sum())


def ue_deltas(kpi, params: RewardParams) -> np.ndarray:
    return np.array([delta_i(bool(kpi.connected[u]), kpi.per_ue_avg_delay[u], params)
                     for u in range(len(kpi.connected))])


def compute_rewards(kpi, params: RewardParams, averaging: str = "per_bs") -> np.ndarray:
    """Reward of every BS for one window.

    per_bs: each BS averages over the UEs it served when the window opened,
    so a UE it handed away still counts against it (as -1 if left detached).
    global: one network-wide mean over all N_T UEs, detached ones included,
    multiplies every BS.
    """
    deltas = ue_deltas(kpi, params)
    out = np.zeros(len(kpi.bs_members))
    if averaging == "per_bs":
        groups = kpi.start_members if kpi.start_members is not None else kpi.bs_members
        for j, members in enumerate(groups):
            out[j] = bs_reward(kpi.per_ue_throughput[members], deltas[members],
                               kpi.per_bs_rbu[j], params)
    elif averaging == "global":
        eps1 = epsilon1(deltas)
        for j, members in enumerate(kpi.bs_members):
            if len(members):
                out[j] = (epsilon2(kpi.per_bs_rbu[j], params) * (1.0 + eps1)
                          * kpi.per_ue_throughput[members].sum())
    else:
        raise ValueError(f"unknown averaging {averaging!r}")
    return out


def qos_rewards(kpi, params: RewardParams) -> np.ndarray:
    """Throughput-free variant: e2(p_j) * (1 + mean delta) per BS."""
    deltas = ue_deltas(kpi, params)
    out = np.zeros(len(kpi.bs_members))
    for j, members in enumerate(kpi.bs_members):
        if len(members):
            out[j] = epsilon2(kpi.per_bs_rbu[j], params) * (1.0 + epsilon1(deltas[members]))
    return out
