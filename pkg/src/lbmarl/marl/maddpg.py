"""MADDPG with centralized critics for CIO control.

One ``Maddpg`` instance is one ensemble member: a deterministic actor per
agent over its local observation, and a critic per agent over the joint
observation and joint action.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nn import Adam, DenseNet, polyak_update
from .noise import OuProcess
from .replay import ReplayBuffer


@dataclass
class MaddpgConfig:
    hidden: tuple = (128, 128)
    actor_lr: float = 1e-4
    critic_lr: float = 1e-3
    gamma: float = 0.95
    tau: float = 0.01
    batch_size: int = 100
    buffer_capacity: int = 100_000
    cio_min: float = -9.0
    cio_max: float = 9.0
    ou_theta: float = 0.15
    ou_sigma_start: float = 0.2
    ou_sigma_end: float = 0.02

    @property
    def half_range(self) -> float:
        return 0.5 * (self.cio_max - self.cio_min)

    def obs_scale(self, obs_dim: int = 3) -> np.ndarray:
        # observation is [ue_ratio, rbu, cio_db]
        scale = np.ones(obs_dim)
        scale[-1] = 1.0 / max(abs(self.cio_min), abs(self.cio_max))
        return scale


class Actor:
    """Local observation -> CIO in dB through a tanh head spanning the CIO range."""

    def __init__(self, obs_dim: int, cfg: MaddpgConfig, rng=None, net: DenseNet | None = None):
        self.obs_scale = cfg.obs_scale(obs_dim)
        self.net = net or DenseNet([obs_dim, *cfg.hidden, 1], "tanh",
                                   (cfg.cio_min, cfg.cio_max), rng)

    def forward(self, obs):
        out, cache = self.net.forward(np.atleast_2d(obs) * self.obs_scale)
        return out[:, 0], cache

    def backward(self, cache, grad_a):
        return self.net.backward(cache, np.asarray(grad_a)[:, None])[0]

    def __call__(self, obs) -> np.ndarray:
        return self.forward(obs)[0]


class CentralCritic:
    """Q_i(x, a_1..a_N) over the flattened joint observation and joint action."""

    def __init__(self, n_agents: int, obs_dim: int, cfg: MaddpgConfig, rng=None,
                 net: DenseNet | None = None):
        self.n_agents = n_agents
        self.obs_scale = np.tile(cfg.obs_scale(obs_dim), n_agents)
        self.act_scale = 1.0 / cfg.half_range
        self.net = net or DenseNet([n_agents * (obs_dim + 1), *cfg.hidden, 1], rng=rng)

    def forward(self, x, a):
        x = np.asarray(x, dtype=float)
        inp = np.concatenate([x.reshape(len(x), -1) * self.obs_scale,
                              np.asarray(a, dtype=float) * self.act_scale], axis=1)
        q, cache = self.net.forward(inp)
        return q[:, 0], cache

    def backward(self, cache, grad_q):
        grads, g_in = self.net.backward(cache, np.asarray(grad_q)[:, None])
        return grads, g_in[:, -self.n_agents:] * self.act_scale


def select_action(actor, obs, noise=None, low: float = -9.0, high: float = 9.0) -> float:
    """Actor output plus an optional exploration offset (dB), clamped to [low, high]."""
    a = float(actor(np.asarray(obs)[None])[0])
    if noise is not None:
        a += float(noise)
    return float(np.clip(a, low, high))


def critic_target(rewards, next_x, target_actors, target_critic, gamma: float) -> np.ndarray:
    """y = r + gamma * Q'(x', mu'_1(o'_1), ..., mu'_N(o'_N)). No terminal masking."""
    rewards = np.asarray(rewards, dtype=float)
    if gamma == 0.0:
        return rewards.copy()
    next_a = np.column_stack([mu(next_x[:, k]) for k, mu in enumerate(target_actors)])
    q_next, _ = target_critic.forward(next_x, next_a)
    return rewards + gamma * q_next


def critic_update(critic, opt, x, a, y) -> float:
    """One Adam step on mean (y - Q(x, a))^2; returns the pre-step loss."""
    q, cache = critic.forward(x, a)
    err = q - y
    loss = float(np.mean(err * err))
    if not np.isfinite(loss):
        raise FloatingPointError(f"critic loss is {loss}; q range [{q.min()}, {q.max()}]")
    grads, _ = critic.backward(cache, 2.0 * err / len(err))
    opt.step(critic.net, grads)
    return loss


def actor_update(actor, opt, critic, agent: int, x, a) -> float:
    """Ascent step on mean Q(x, a with a_agent <- mu(o_agent)); returns the pre-step objective."""
    mu, a_cache = actor.forward(x[:, agent])
    joint = np.array(a, dtype=float, copy=True)
    joint[:, agent] = mu
    q, c_cache = critic.forward(x, joint)
    _, grad_a = critic.backward(c_cache, -np.ones(len(q)) / len(q))
    grads = actor.backward(a_cache, grad_a[:, agent])
    if not all(np.all(np.isfinite(g)) for g in grads):
        raise FloatingPointError("non-finite actor gradient")
    opt.step(actor.net, grads)
    return float(q.mean())


class Maddpg:
    """One MADDPG learner (all agents' actors, critics, targets and the shared replay)."""

    def __init__(self, n_agents: int, obs_dim: int, cfg: MaddpgConfig,
                 seed: np.random.SeedSequence):
        self.n_agents = n_agents
        self.obs_dim = obs_dim
        self.cfg = cfg
        init_seq, replay_seq, noise_seq = seed.spawn(3)
        init_rng = np.random.default_rng(init_seq)
        self.actors = [Actor(obs_dim, cfg, init_rng) for _ in range(n_agents)]
        self.critics = [CentralCritic(n_agents, obs_dim, cfg, init_rng) for _ in range(n_agents)]
        self.target_actors = [Actor(obs_dim, cfg, net=a.net.copy()) for a in self.actors]
        self.target_critics = [CentralCritic(n_agents, obs_dim, cfg, net=c.net.copy())
                               for c in self.critics]
        self.actor_opts = [Adam(cfg.actor_lr) for _ in range(n_agents)]
        self.critic_opts = [Adam(cfg.critic_lr) for _ in range(n_agents)]
        self.replay = ReplayBuffer(cfg.buffer_capacity, n_agents, obs_dim,
                                   np.random.default_rng(replay_seq))
        self.noise = OuProcess(n_agents, cfg.ou_theta, cfg.ou_sigma_start,
                               rng=np.random.default_rng(noise_seq))

    def act(self, obs, explore: bool = False) -> np.ndarray:
        offsets = self.noise.sample() * self.cfg.half_range if explore else np.zeros(self.n_agents)
        return np.array([select_action(self.actors[i], obs[i], offsets[i],
                                       self.cfg.cio_min, self.cfg.cio_max)
                         for i in range(self.n_agents)])

    def store(self, x, a, r, x2, episode: int = 0) -> None:
        self.replay.add(x, a, r, x2, episode)

    def update(self) -> dict | None:
        cfg = self.cfg
        if len(self.replay) < cfg.batch_size:
            return None
        critic_losses, objectives = [], []
        for i in range(self.n_agents):
            x, a, r, x2 = self.replay.sample(cfg.batch_size)
            y = critic_target(r[:, i], x2, self.target_actors, self.target_critics[i], cfg.gamma)
            objectives.append(actor_update(self.actors[i], self.actor_opts[i],
                                           self.critics[i], i, x, a))
            critic_losses.append(critic_update(self.critics[i], self.critic_opts[i], x, a, y))
        for online, target in zip(self.actors + self.critics,
                                  self.target_actors + self.target_critics):
            polyak_update(target.net, online.net, cfg.tau)
        return {"critic_loss": critic_losses, "actor_objective": objectives}
