from __future__ import annotations

import numpy as np


class OuProcess:
    """Ornstein-Uhlenbeck noise: dx = theta (mu - x) dt + sigma sqrt(dt) N(0, 1)."""

    def __init__(self, size: int, theta: float = 0.15, sigma: float = 0.2, mu: float = 0.0,
                 dt: float = 1.0, rng: np.random.Generator | None = None):
        self.size = size
        self.theta = theta
        self.sigma = sigma
        self.mu = mu
        self.dt = dt
        self.rng = rng if rng is not None else np.random.default_rng()
        self.reset()

    def reset(self, x0=None) -> None:
        self.state = np.full(self.size, self.mu, dtype=float) if x0 is None else np.array(x0, float)

    def sample(self) -> np.ndarray:
        drift = self.theta * (self.mu - self.state) * self.dt
        shock = self.sigma * np.sqrt(self.dt) * self.rng.standard_normal(self.size)
        self.state = self.state + drift + shock
        return self.state.copy()
