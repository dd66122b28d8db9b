from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class NetworkTopology:
    """Static geometry and radio settings of one scenario."""

    bs_positions: np.ndarray
    ue_positions: np.ndarray
    inter_site_distance: float = 720.0
    bandwidth_rb: int = 25
    rbg_size: int = 2
    tx_power_dbm: float = 20.0
    bs_antenna_height: float = 30.0
    ue_antenna_height: float = 1.5

    def __post_init__(self):
        self.bs_positions = np.asarray(self.bs_positions, dtype=float).reshape(-1, 2)
        self.ue_positions = np.asarray(self.ue_positions, dtype=float).reshape(-1, 2)
        if self.num_bs < 2:
            raise ValueError("need at least 2 base stations")
        if self.num_ue < 1:
            raise ValueError("need at least 1 UE")
        if self.bandwidth_rb < 1:
            raise ValueError("bandwidth_rb must be >= 1")
        if not 1 <= self.rbg_size <= 4:
            raise ValueError("rbg_size must be in [1, 4]")
        if not self.inter_site_distance > 0:
            raise ValueError("inter_site_distance must be positive")
        if not (np.all(np.isfinite(self.bs_positions)) and np.all(np.isfinite(self.ue_positions))):
            raise ValueError("positions must be finite")

    @property
    def num_bs(self) -> int:
        return len(self.bs_positions)

    @property
    def num_ue(self) -> int:
        return len(self.ue_positions)

    def rbg_sizes(self) -> np.ndarray:
        return rbg_sizes(self.bandwidth_rb, self.rbg_size)


def rbg_sizes(n_rb: int, group: int) -> np.ndarray:
    """RB count of each resource block group; the last one may be short."""
    n_groups = -(-n_rb // group)
    sizes = np.full(n_groups, group, dtype=np.int64)
    sizes[-1] = n_rb - group * (n_groups - 1)
    return sizes


def linear_layout(num_bs: int, isd: float) -> np.ndarray:
    """BSs on a line, centred on the middle site."""
    x = (np.arange(num_bs) - (num_bs - 1) / 2.0) * isd
    return np.column_stack([x, np.zeros(num_bs)])


def place_ues(num_ue: int, bs_positions: np.ndarray, isd: float, rng: np.random.Generator,
              edge_fraction: float = 0.4, edge_radius=(0.4, 0.5)) -> np.ndarray:
    """Edge discs around the outer BSs, remaining UEs spread over the middle cell.

    ``edge_fraction`` of the UEs go to annuli of radius ``edge_radius`` x ISD
    around the non-middle sites (round-robin); the rest fall uniformly in a
    disc of radius ISD/2 around the middle site.
    """
    bs_positions = np.asarray(bs_positions, dtype=float)
    middle = len(bs_positions) // 2
    outer = [j for j in range(len(bs_positions)) if j != middle]
    n_edge = int(round(edge_fraction * num_ue))
    out = np.empty((num_ue, 2))
    lo, hi = edge_radius
    for u in range(num_ue):
        if u < n_edge:
            centre = bs_positions[outer[u % len(outer)]]
            r = rng.uniform(lo, hi) * isd
        else:
            centre = bs_positions[middle]
            r = 0.5 * isd * np.sqrt(rng.uniform())
        theta = rng.uniform(0.0, 2.0 * np.pi)
        out[u] = centre + r * np.array([np.cos(theta), np.sin(theta)])
    return out
