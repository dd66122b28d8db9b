from __future__ import annotations

import numpy as np


class ReplayBuffer:
    """FIFO transition store: joint obs x (N, d), actions a (N,), rewards r (N,), next obs."""

    def __init__(self, capacity: int, n_agents: int, obs_dim: int, rng: np.random.Generator):
        self.capacity = int(capacity)
        self.rng = rng
        self.x = np.zeros((capacity, n_agents, obs_dim))
        self.a = np.zeros((capacity, n_agents))
        self.r = np.zeros((capacity, n_agents))
        self.x2 = np.zeros((capacity, n_agents, obs_dim))
        self.episode = np.zeros(capacity, dtype=np.int64)
        self.next = 0
        self.size = 0

    def __len__(self) -> int:
        return self.size

    def add(self, x, a, r, x2, episode: int = 0) -> None:
        i = self.next
        self.x[i], self.a[i], self.r[i], self.x2[i] = x, a, r, x2
        self.episode[i] = episode
        self.next = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, n: int):
        if n > self.size:
            raise ValueError(f"cannot sample {n} from {self.size} transitions")
        idx = self.rng.choice(self.size, size=n, replace=False)
        return self.x[idx], self.a[idx], self.r[idx], self.x2[idx]

    def ordered(self):
        """All stored transitions, oldest first: (x, a, r, x2, episode)."""
        if self.size < self.capacity:
            idx = np.arange(self.size)
        else:
            idx = (self.next + np.arange(self.capacity)) % self.capacity
        return self.x[idx], self.a[idx], self.r[idx], self.x2[idx], self.episode[idx]
