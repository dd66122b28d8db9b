"""Centralized clipped double Q-learning over a discretized joint CIO table."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .env import EpisodeAccumulator
from .nn import Adam, DenseNet, load_module, polyak_update, save_module
from .marl.checkpoint import read_manifest, write_manifest
from .marl.replay import ReplayBuffer


class DiscreteActionTable:
    """Bijection between joint action indices and per-BS CIO tuples."""

    def __init__(self, levels, n_bs: int, cio_min: float = -9.0, cio_max: float = 9.0):
        self.levels = np.asarray(levels, dtype=float)
        if np.any(self.levels < cio_min) or np.any(self.levels > cio_max):
            raise ValueError("CIO level outside the allowed range")
        self.n_bs = n_bs
        self.shape = (len(self.levels),) * n_bs

    @property
    def size(self) -> int:
        return len(self.levels) ** self.n_bs

    def index_to_action(self, index: int) -> np.ndarray:
        return self.levels[list(np.unravel_index(int(index), self.shape))]

    def action_to_index(self, action) -> int:
        idx = [int(np.flatnonzero(np.isclose(self.levels, v))[0]) for v in action]
        return int(np.ravel_multi_index(idx, self.shape))


def cdql_target(rewards, q1_next, q2_next, gamma: float) -> np.ndarray:
    """y = r + gamma * min_i Q_i(s', argmax_a' Q_i(s', a')), row-wise."""
    q1_next = np.atleast_2d(q1_next)
    q2_next = np.atleast_2d(q2_next)
    v1 = q1_next[np.arange(len(q1_next)), np.argmax(q1_next, axis=1)]
    v2 = q2_next[np.arange(len(q2_next)), np.argmax(q2_next, axis=1)]
    return np.asarray(rewards, dtype=float) + gamma * np.minimum(v1, v2)


def epsilon_after(n_updates: int, eps0: float = 1.0, eps_min: float = 0.001,
                  decay: float = 0.995) -> float:
    return max(eps_min, eps0 * decay ** n_updates)


@dataclass
class CdqlConfig:
    hidden: tuple = (128, 128)
    lr: float = 1e-3
    gamma: float = 0.95
    tau: float = 0.01
    batch_size: int = 100
    buffer_capacity: int = 100_000
    epsilon: float = 1.0
    epsilon_min: float = 0.001
    epsilon_decay: float = 0.995
    levels: tuple = (-9.0, -6.0, -3.0, 0.0, 3.0, 6.0, 9.0)
    cio_min: float = -9.0
    cio_max: float = 9.0
    reward: str = "shared"  # or "qos": throughput-free per-BS reward, still summed


class CdqlAgent:
    def __init__(self, n_bs: int, obs_dim: int, cfg: CdqlConfig, seed: np.random.SeedSequence):
        self.cfg = cfg
        self.table = DiscreteActionTable(cfg.levels, n_bs, cfg.cio_min, cfg.cio_max)
        init_seq, replay_seq, explore_seq = seed.spawn(3)
        init_rng = np.random.default_rng(init_seq)
        self.explore_rng = np.random.default_rng(explore_seq)
        scale = np.ones(obs_dim)
        scale[-1] = 1.0 / max(abs(cfg.cio_min), abs(cfg.cio_max))
        self.obs_scale = np.tile(scale, n_bs)
        sizes = [n_bs * obs_dim, *cfg.hidden, self.table.size]
        self.q = [DenseNet(sizes, rng=init_rng), DenseNet(sizes, rng=init_rng)]
        self.targets = [net.copy() for net in self.q]
        self.opts = [Adam(cfg.lr), Adam(cfg.lr)]
        # actions are stored as indices in the single action column
        self.replay = ReplayBuffer(cfg.buffer_capacity, 1, n_bs * obs_dim,
                                   np.random.default_rng(replay_seq))
        self.epsilon = cfg.epsilon
        self.updates = 0

    def state(self, obs) -> np.ndarray:
        return np.asarray(obs, dtype=float).reshape(-1) * self.obs_scale

    def greedy(self, obs) -> int:
        return int(np.argmax(self.q[0](self.state(obs))))

    def select_action(self, obs, epsilon: float | None = None) -> int:
        eps = self.epsilon if epsilon is None else epsilon
        if not 0.0 <= eps <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.explore_rng.random() < eps:
            return int(self.explore_rng.integers(self.table.size))
        return self.greedy(obs)

    def store(self, obs, action_index: int, reward: float, next_obs, episode: int = 0) -> None:
        self.replay.add(self.state(obs)[None], [action_index], [reward], self.state(next_obs)[None],
                        episode)

    def update(self) -> float | None:
        cfg = self.cfg
        if len(self.replay) < cfg.batch_size:
            return None
        s, a, r, s2 = self.replay.sample(cfg.batch_size)
        s, s2, a, r = s[:, 0], s2[:, 0], a[:, 0].astype(np.int64), r[:, 0]
        y = cdql_target(r, self.targets[0](s2), self.targets[1](s2), cfg.gamma)
        rows = np.arange(len(a))
        loss = 0.0
        for net, opt in zip(self.q, self.opts):
            q, cache = net.forward(s)
            err = q[rows, a] - y
            loss += float(np.mean(err * err))
            grad = np.zeros_like(q)
            grad[rows, a] = 2.0 * err / len(err)
            opt.step(net, net.backward(cache, grad)[0])
        for net, target in zip(self.q, self.targets):
            polyak_update(target, net, cfg.tau)
        self.updates += 1
        if self.epsilon > cfg.epsilon_min:
            self.epsilon = max(cfg.epsilon_min, self.epsilon * cfg.epsilon_decay)
        return loss / 2.0

    def save(self, directory, config_hash: str) -> None:
        root = Path(directory)
        root.mkdir(parents=True, exist_ok=True)
        for i, (net, target) in enumerate(zip(self.q, self.targets), start=1):
            save_module(root / f"q{i}.params", net)
            save_module(root / f"target_q{i}.params", target)
        cfg = asdict(self.cfg)
        write_manifest(root, {"method": "cdql", "tag": "baseline", "config_hash": config_hash,
                              "n_bs": self.table.n_bs,
                              "obs_dim": len(self.obs_scale) // self.table.n_bs,
                              "cdql": json.loads(json.dumps(cfg))})

    @classmethod
    def load(cls, directory, expected_hash: str | None = None) -> "CdqlAgent":
        root = Path(directory)
        manifest = read_manifest(root, expected_hash, "cdql")
        raw = dict(manifest["cdql"])
        raw["hidden"] = tuple(raw["hidden"])
        raw["levels"] = tuple(raw["levels"])
        agent = cls(manifest["n_bs"], manifest["obs_dim"], CdqlConfig(**raw),
                    np.random.SeedSequence(0))
        for i in (1, 2):
            agent.q[i - 1] = load_module(root / f"q{i}.params")
            agent.targets[i - 1] = load_module(root / f"target_q{i}.params")
        return agent


def train_cdql(env, cfg: CdqlConfig, episodes: int, iterations: int,
               seed: np.random.SeedSequence, on_episode=None) -> CdqlAgent:
    """Train on the sum of the per-BS rewards."""
    obs = env.reset()
    agent = CdqlAgent(env.n_agents, obs.shape[1], cfg, seed)
    for ep in range(episodes):
        obs = env.reset() if ep else obs
        acc = EpisodeAccumulator(env.n_agents)
        for _ in range(iterations):
            idx = agent.select_action(obs)
            nxt, rewards, kpi = env.step(agent.table.index_to_action(idx))
            agent.store(obs, idx, float(rewards.sum()), nxt, ep)
            agent.update()
            acc.add(rewards, kpi)
            obs = nxt
        if on_episode is not None:
            on_episode(ep, acc.summary())
    return agent
