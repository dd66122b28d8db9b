from __future__ import annotations

import numpy as np

from ..env import EpisodeAccumulator
from .maddpg import Maddpg, MaddpgConfig


def phase_seed(root: np.random.SeedSequence, phase: int) -> np.random.SeedSequence:
    """Seed of ensemble member ``phase``; plain MADDPG uses phase 0."""
    return np.random.SeedSequence(root.entropy, spawn_key=tuple(root.spawn_key) + (phase,))


def ou_sigma(cfg: MaddpgConfig, episode: int, episodes: int) -> float:
    frac = episode / max(1, episodes - 1)
    return cfg.ou_sigma_start + (cfg.ou_sigma_end - cfg.ou_sigma_start) * frac


def train_maddpg(env, cfg: MaddpgConfig, episodes: int, iterations: int,
                 seed: np.random.SeedSequence, on_episode=None) -> Maddpg:
    """Train one MADDPG learner; ``on_episode(episode, summary)`` after each episode."""
    obs = env.reset()
    learner = Maddpg(env.n_agents, obs.shape[1], cfg, seed)
    for ep in range(episodes):
        learner.noise.sigma = ou_sigma(cfg, ep, episodes)
        learner.noise.reset()
        obs = env.reset() if ep else obs
        acc = EpisodeAccumulator(env.n_agents)
        for _ in range(iterations):
            actions = learner.act(obs, explore=True)
            nxt, rewards, kpi = env.step(actions)
            learner.store(obs, actions, rewards, nxt, ep)
            learner.update()
            acc.add(rewards, kpi)
            obs = nxt
        if on_episode is not None:
            on_episode(ep, acc.summary())
    return learner
