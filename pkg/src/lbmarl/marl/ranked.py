"""Reward-ranked buffer of observation windows."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class RankedSequenceBuffer:
    sequences: np.ndarray  # (n, W, d)
    scores: np.ndarray     # summed reward per window
    labels: np.ndarray     # subpolicy that produced the window
    capacity: int

    def __len__(self) -> int:
        return len(self.scores)

    @staticmethod
    def union(buffers) -> "RankedSequenceBuffer":
        buffers = list(buffers)
        return RankedSequenceBuffer(
            np.concatenate([b.sequences for b in buffers]),
            np.concatenate([b.scores for b in buffers]),
            np.concatenate([b.labels for b in buffers]),
            sum(b.capacity for b in buffers),
        )


def sliding_windows(obs, rewards, window: int, episodes=None):
    """Stride-1 windows of ``window`` consecutive observations and their reward sums.

    Windows never straddle an episode boundary when ``episodes`` is given.
    Returns (sequences (n, W, d), scores (n,)).
    """
    obs = np.asarray(obs, dtype=float)
    rewards = np.asarray(rewards, dtype=float)
    n = len(obs)
    d = obs.shape[1] if obs.ndim == 2 else 0
    if n < window:
        return np.zeros((0, window, d)), np.zeros(0)
    starts = np.arange(n - window + 1)
    if episodes is not None:
        ep = np.asarray(episodes)
        starts = starts[ep[starts] == ep[starts + window - 1]]
    idx = starts[:, None] + np.arange(window)[None, :]
    return obs[idx], rewards[idx].sum(axis=1)


def keep_count(n_sequences: int, k: int) -> int:
    return min(n_sequences, math.ceil(n_sequences / k))


def rank_sequences(sequences, scores, k: int, label: int = 0) -> RankedSequenceBuffer:
    """Sort by score (newest wins ties) and keep the top ceil(N_s / K)."""
    scores = np.asarray(scores, dtype=float)
    n = len(scores)
    order = np.lexsort((-np.arange(n), -scores))
    keep = order[:keep_count(n, k)]
    return RankedSequenceBuffer(np.asarray(sequences)[keep], scores[keep],
                                np.full(len(keep), label, dtype=np.int64), keep_count(n, k))


def build_ranked_buffer(replay, agent: int, window: int, k: int, label: int = 0,
                        obs_scale=None) -> RankedSequenceBuffer:
    """Ranked windows of one agent's local observations from a replay buffer."""
    x, _, r, _, ep = replay.ordered()
    obs = x[:, agent, :]
    if obs_scale is not None:
        obs = obs * obs_scale
    seqs, scores = sliding_windows(obs, r[:, agent], window, ep)
    return rank_sequences(seqs, scores, k, label)
