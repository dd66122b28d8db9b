"""Gym-style wrapper pairing the simulator with the per-BS reward."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .netsim import NetworkSimulator
from .reward import RewardParams, compute_rewards, qos_rewards


class LoadBalancingEnv:
    """reset() -> obs (M, 3); step(cios) -> (obs, rewards (M,), KpiReport).

    Rewards are in bit/s times ``reward_scale`` (1e-6 gives Mbit/s).
    """

    def __init__(self, sim: NetworkSimulator, reward_params: RewardParams | None = None,
                 averaging: str = "per_bs", reward_scale: float = 1e-6,
                 reward_kind: str = "throughput"):
        self.sim = sim
        self.reward_params = reward_params or RewardParams(pdb=sim.params.pdb)
        self.averaging = averaging
        self.reward_scale = reward_scale
        self.reward_kind = reward_kind

    @property
    def n_agents(self) -> int:
        return self.sim.num_bs

    @property
    def cio_bounds(self) -> tuple[float, float]:
        return self.sim.params.cio_min, self.sim.params.cio_max

    def reset(self) -> np.ndarray:
        return self.sim.reset()

    def step(self, cios):
        obs, kpi = self.sim.step(cios)
        if self.reward_kind == "qos":
            rewards = qos_rewards(kpi, self.reward_params)
        else:
            rewards = compute_rewards(kpi, self.reward_params, self.averaging) * self.reward_scale
        return obs, rewards, kpi


@dataclass
class EpisodeAccumulator:
    """Sums window KPIs into per-episode metrics."""

    n_agents: int
    rewards: np.ndarray = field(init=False)
    delay_sum: float = 0.0
    delivered: int = 0
    dropped: int = 0
    generated: int = 0
    bits: float = 0.0
    rbu_sum: float = 0.0
    steps: int = 0
    sim_seconds: float = 0.0
    n_ue: int = 0

    def __post_init__(self):
        self.rewards = np.zeros(self.n_agents)

    def add(self, rewards, kpi) -> None:
        self.rewards += rewards
        self.delay_sum += float(kpi.delay_sum.sum())
        self.delivered += int(kpi.delivered_packets.sum())
        self.dropped += int(kpi.dropped_packets.sum())
        self.generated += int(kpi.generated_packets.sum())
        self.bits += float(kpi.per_ue_throughput.sum() * kpi.duration)
        self.rbu_sum += float(kpi.per_bs_rbu.mean())
        self.steps += 1
        self.sim_seconds += kpi.duration
        self.n_ue = len(kpi.per_ue_throughput)

    def summary(self) -> dict:
        return {
            "reward": float(self.rewards.sum()),
            "agent_rewards": self.rewards.copy(),
            "mean_delay_s": self.delay_sum / self.delivered if self.delivered else float("nan"),
            "plr": self.dropped / self.generated if self.generated else 0.0,
            "mean_throughput_bps": (self.bits / (self.n_ue * self.sim_seconds)
                                    if self.sim_seconds else 0.0),
            "mean_rbu": self.rbu_sum / self.steps if self.steps else 0.0,
            "sim_seconds": self.sim_seconds,
        }
