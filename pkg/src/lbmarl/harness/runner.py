"""Training and execution stages for one (scenario, seed) run, and sweeps over many."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..cdql import CdqlAgent, train_cdql
from ..env import EpisodeAccumulator, LoadBalancingEnv
from ..marl import AdaptiveExecutor, load_maddpg_ap, save_maddpg_ap, train_maddpg_ap
from ..marl.checkpoint import read_manifest
from ..netsim import NetworkSimulator, NetworkTopology, linear_layout, place_ues
from .config import ExperimentConfig, config_hash, training_hash
from .metrics import RunRecord, export_metrics, write_metrics, write_timings

log = logging.getLogger(__name__)

# child streams of one run's root seed
_SIM_TRAIN, _LEARNER, _SIM_EXEC = 0, 1, 2


def run_seed(seed: int, scenario: int, stream: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), int(scenario)], spawn_key=(stream,))


def build_topology(cfg: ExperimentConfig, scenario: int, seed: int) -> NetworkTopology:
    net = cfg.network
    bs = linear_layout(net.num_bs, net.inter_site_distance)
    if cfg.placement_seed is None:
        rng = np.random.default_rng([int(seed), int(scenario)])
    else:
        rng = np.random.default_rng(int(cfg.placement_seed))
    ues = place_ues(int(scenario), bs, net.inter_site_distance, rng, net.edge_fraction,
                    tuple(net.edge_radius))
    return NetworkTopology(bs, ues, net.inter_site_distance, net.bandwidth_rb, net.rbg_size,
                           net.tx_power_dbm, net.bs_antenna_height, net.ue_antenna_height)


def build_env(cfg: ExperimentConfig, scenario: int, seed: int, stream: int) -> LoadBalancingEnv:
    sim = NetworkSimulator(build_topology(cfg, scenario, seed), cfg.sim,
                           run_seed(seed, scenario, stream))
    kind = "qos" if cfg.method == "cdql" and cfg.cdql.reward == "qos" else "throughput"
    return LoadBalancingEnv(sim, cfg.reward.params(cfg.sim.pdb), cfg.reward.averaging,
                            cfg.reward.scale, kind)


def checkpoint_dir(out_dir, cfg: ExperimentConfig, scenario: int, seed: int) -> Path:
    return Path(out_dir) / "checkpoints" / f"{cfg.method}_n{scenario}_s{seed}"


@dataclass
class StageResult:
    records: list = field(default_factory=list)
    checkpoint: Path | None = None
    wall_clock_s: float = 0.0


class _Recorder:
    def __init__(self, cfg, stage, scenario, seed):
        self.meta = dict(stage=stage, method=cfg.method, scenario=scenario, seed=seed,
                         config_hash=config_hash(cfg))
        self.records = []
        self.sim_time = 0.0

    def __call__(self, phase: int, summary: dict) -> None:
        self.sim_time += summary["sim_seconds"]
        self.records.append(RunRecord.from_summary(
            summary, phase=phase, episode=len(self.records), sim_time_s=self.sim_time,
            **self.meta))


def run_training(cfg: ExperimentConfig, scenario: int, seed: int, out_dir) -> StageResult:
    """Train one method on one scenario and write its checkpoint under ``out_dir``."""
    t0 = time.perf_counter()
    rec = _Recorder(cfg, "train", scenario, seed)
    if cfg.method == "fixed-cio":
        return StageResult([], None, time.perf_counter() - t0)
    env = build_env(cfg, scenario, seed, _SIM_TRAIN)
    tr = cfg.training
    learner_seed = run_seed(seed, scenario, _LEARNER)
    ckpt = checkpoint_dir(out_dir, cfg, scenario, seed)
    thash = training_hash(cfg, scenario, seed)
    if cfg.method in ("maddpg-ap", "maddpg"):
        k = cfg.adaptive.k if cfg.method == "maddpg-ap" else 1
        ap = train_maddpg_ap(env, cfg.maddpg, cfg.predictor, k, cfg.adaptive.window,
                             tr.episodes, tr.iterations, learner_seed,
                             lambda phase, ep, s: rec(phase, s))
        save_maddpg_ap(ckpt, ap, thash, cfg.method)
    elif cfg.method == "cdql":
        agent = train_cdql(env, cfg.cdql, tr.episodes, tr.iterations, learner_seed,
                           lambda ep, s: rec(0, s))
        agent.save(ckpt, thash)
    else:
        raise ValueError(f"unknown method {cfg.method!r}")
    log.info("trained %s n=%d seed=%d in %.1fs", cfg.method, scenario, seed,
             time.perf_counter() - t0)
    return StageResult(rec.records, ckpt, time.perf_counter() - t0)


def _controller(cfg: ExperimentConfig, scenario: int, seed: int, ckpt):
    """(reset, act) pair for the execution stage. Loading never writes to ``ckpt``."""
    if cfg.method == "fixed-cio":
        fixed = np.full(cfg.network.num_bs, cfg.fixed_cio_db)
        return (lambda: None), (lambda obs: fixed)
    if ckpt is None:
        raise FileNotFoundError(f"{cfg.method} execution needs a checkpoint directory")
    thash = training_hash(cfg, scenario, seed)
    if cfg.method == "cdql":
        agent = CdqlAgent.load(ckpt, thash)
        return (lambda: None), (lambda obs: agent.table.index_to_action(agent.greedy(obs)))
    executor = AdaptiveExecutor(load_maddpg_ap(ckpt, thash, cfg.method))
    return executor.reset, executor.act


def run_execution(cfg: ExperimentConfig, scenario: int, seed: int, ckpt=None) -> StageResult:
    """Noise-free rollout of a trained (or fixed) controller; no learning."""
    t0 = time.perf_counter()
    if ckpt is not None:
        read_manifest(ckpt, training_hash(cfg, scenario, seed), cfg.method)
    reset, act = _controller(cfg, scenario, seed, ckpt)
    env = build_env(cfg, scenario, seed, _SIM_EXEC)
    rec = _Recorder(cfg, "execute", scenario, seed)
    for _ in range(cfg.execution.episodes):
        obs = env.reset()
        reset()
        acc = EpisodeAccumulator(env.n_agents)
        for _ in range(cfg.execution.iterations):
            obs, rewards, kpi = env.step(act(obs))
            acc.add(rewards, kpi)
        rec(0, acc.summary())
    return StageResult(rec.records, ckpt, time.perf_counter() - t0)


def run_one(cfg: ExperimentConfig, scenario: int, seed: int, out_dir):
    """Train then execute; returns (records, timing rows)."""
    tr = run_training(cfg, scenario, seed, out_dir)
    ex = run_execution(cfg, scenario, seed, tr.checkpoint)
    timings = [("train", cfg.method, scenario, seed, f"{tr.wall_clock_s:.3f}"),
               ("execute", cfg.method, scenario, seed, f"{ex.wall_clock_s:.3f}")]
    return tr.records + ex.records, timings


def _run_one_star(args):
    return run_one(*args)


def sweep(cfg: ExperimentConfig, out_dir, workers: int = 1):
    """Every (scenario, seed) of the config, each with its own simulator.

    Results are gathered in (scenario, seed) order whatever the worker count.
    """
    jobs = [(cfg, int(n), int(s), out_dir) for n in cfg.scenarios for s in cfg.seeds]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_run_one_star, jobs))
    else:
        results = [run_one(*job) for job in jobs]
    records = [r for recs, _ in results for r in recs]
    timings = [t for _, ts in results for t in ts]
    conv = (cfg.convergence.window, cfg.convergence.tail, cfg.convergence.tol)
    export_metrics(records, out_dir, convergence=conv)
    write_timings(timings, Path(out_dir) / "timings.csv")
    return records


def write_stage(result: StageResult, out_dir, name: str = "metrics.csv") -> Path:
    return write_metrics(result.records, Path(out_dir) / name)
