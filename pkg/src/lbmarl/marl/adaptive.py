"""Adaptive policies: K MADDPG members per agent plus a sequence-based selector."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .maddpg import MaddpgConfig, select_action
from .predictor import PredictorConfig, train_predictor
from .ranked import RankedSequenceBuffer, build_ranked_buffer
from .training import phase_seed, train_maddpg


@dataclass
class MaddpgAp:
    """Trained ensemble. ``members[k]`` exposes actors/critics/targets for every agent."""

    members: list
    predictors: list
    window: int
    cfg: MaddpgConfig
    predictor_accuracy: list = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.members)

    @property
    def n_agents(self) -> int:
        return len(self.predictors)


def split_episodes(episodes: int, k: int) -> list[int]:
    base, extra = divmod(episodes, k)
    return [base + (1 if p < extra else 0) for p in range(k)]


def train_maddpg_ap(env, cfg: MaddpgConfig, pcfg: PredictorConfig, k: int, window: int,
                    episodes: int, iterations: int, seed: np.random.SeedSequence,
                    on_episode=None) -> MaddpgAp:
    """Train K members one after another, then one predictor per agent.

    ``on_episode(phase, episode, summary)`` is called after every episode.
    Each member's replay is turned into per-agent ranked windows labelled
    with the member index; the per-agent union trains that agent's predictor.
    """
    members = []
    ranked: list[list[RankedSequenceBuffer]] = [[] for _ in range(env.n_agents)]
    for phase, n_ep in enumerate(split_episodes(episodes, k)):
        cb = None
        if on_episode is not None:
            cb = (lambda p: (lambda ep, s: on_episode(p, ep, s)))(phase)
        learner = train_maddpg(env, cfg, n_ep, iterations, phase_seed(seed, phase), cb)
        scale = cfg.obs_scale(learner.obs_dim)
        for i in range(env.n_agents):
            ranked[i].append(build_ranked_buffer(learner.replay, i, window, k, phase, scale))
        learner.replay = None
        members.append(learner)

    rng = np.random.default_rng(phase_seed(seed, 10_000))
    predictors, accs = [], []
    for i in range(env.n_agents):
        clf, acc = train_predictor(RankedSequenceBuffer.union(ranked[i]), k, window, pcfg, rng)
        predictors.append(clf)
        accs.append(acc)
    return MaddpgAp(members, predictors, window, cfg, accs)


class AdaptiveExecutor:
    """Noise-free execution: each agent keeps its last W observations and lets
    its predictor pick the member that acts. Member 0 acts until the window fills."""

    def __init__(self, ap: MaddpgAp):
        self.ap = ap
        self.obs_scale = ap.cfg.obs_scale()
        self.windows = [deque(maxlen=ap.window) for _ in range(ap.n_agents)]
        self.last_choice = np.zeros(ap.n_agents, dtype=np.int64)

    def reset(self) -> None:
        for w in self.windows:
            w.clear()
        self.last_choice[:] = 0

    def choose(self, agent: int) -> int:
        w = self.windows[agent]
        if len(w) < self.ap.window or self.ap.k == 1:
            return 0
        probs = self.ap.predictors[agent].predict_proba(np.array(w))
        return int(np.argmax(probs))

    def act(self, obs) -> np.ndarray:
        cfg = self.ap.cfg
        actions = np.zeros(self.ap.n_agents)
        for i in range(self.ap.n_agents):
            self.windows[i].append(np.asarray(obs[i], dtype=float) * self.obs_scale)
            k = self.choose(i)
            self.last_choice[i] = k
            actions[i] = select_action(self.ap.members[k].actors[i], obs[i], None,
                                       cfg.cio_min, cfg.cio_max)
        return actions
