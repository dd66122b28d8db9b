"""Experiment configuration: nested dataclasses loaded from YAML.

Every field has a default, so an empty file is a valid config. Unknown keys
anywhere in the tree are rejected together, by dotted path.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..cdql import CdqlConfig
from ..marl import MaddpgConfig, PredictorConfig
from ..netsim import SimParams
from ..reward import RewardParams

METHODS = ("maddpg-ap", "maddpg", "cdql", "fixed-cio")


@dataclass
class NetworkConfig:
    num_bs: int = 3
    inter_site_distance: float = 720.0
    bandwidth_rb: int = 25
    rbg_size: int = 2
    tx_power_dbm: float = 20.0
    bs_antenna_height: float = 30.0
    ue_antenna_height: float = 1.5
    edge_fraction: float = 0.4
    edge_radius: tuple = (0.4, 0.5)


@dataclass
class RewardConfig:
    c: float = -2.0
    o: float = 75.0
    a: float = 20.0
    target_rbu: float = 0.8
    starved_delay_factor: float = 5.0
    averaging: str = "per_bs"
    scale: float = 1e-6

    def params(self, pdb: float) -> RewardParams:
        return RewardParams(c=self.c, o=self.o, a=self.a, pdb=pdb, target_rbu=self.target_rbu,
                            starved_delay_factor=self.starved_delay_factor)


@dataclass
class AdaptiveConfig:
    k: int = 3
    window: int = 5


@dataclass
class StageConfig:
    episodes: int = 300
    iterations: int = 50


@dataclass
class ConvergenceConfig:
    window: int = 10
    tail: int = 20
    tol: float = 0.05


@dataclass
class ExperimentConfig:
    method: str = "maddpg-ap"
    scenarios: list = field(default_factory=lambda: [30, 35, 40, 45, 50])
    seeds: list = field(default_factory=lambda: [0, 1, 2, 3, 4])
    # None: UE placement follows the run seed; an int pins it across seeds
    placement_seed: int | None = None
    fixed_cio_db: float = 0.0
    network: NetworkConfig = field(default_factory=NetworkConfig)
    sim: SimParams = field(default_factory=SimParams)
    reward: RewardConfig = field(default_factory=RewardConfig)
    maddpg: MaddpgConfig = field(default_factory=MaddpgConfig)
    adaptive: AdaptiveConfig = field(default_factory=AdaptiveConfig)
    predictor: PredictorConfig = field(default_factory=PredictorConfig)
    cdql: CdqlConfig = field(default_factory=CdqlConfig)
    training: StageConfig = field(default_factory=StageConfig)
    execution: StageConfig = field(default_factory=lambda: StageConfig(150, 50))
    convergence: ConvergenceConfig = field(default_factory=ConvergenceConfig)

    def validate(self) -> "ExperimentConfig":
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if not self.scenarios or any(int(n) < 1 for n in self.scenarios):
            raise ValueError("scenarios must be a non-empty list of positive UE counts")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        for name in ("training", "execution"):
            stage = getattr(self, name)
            if stage.episodes < 1 or stage.iterations < 1:
                raise ValueError(f"{name} needs at least one episode and one iteration")
        if self.adaptive.k < 1 or self.adaptive.window < 1:
            raise ValueError("adaptive.k and adaptive.window must be positive")
        if not self.sim.cio_min <= self.fixed_cio_db <= self.sim.cio_max:
            raise ValueError("fixed_cio_db outside the CIO range")
        return self


class ConfigError(ValueError):
    pass


def _build(cls, raw, path: str, bad: list):
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ConfigError(f"{path or 'config'} must be a mapping, got {type(raw).__name__}")
    known = {f.name: f for f in dataclasses.fields(cls)}
    bad.extend(f"{path}{k}" for k in raw if k not in known)
    kwargs = {}
    for name, value in raw.items():
        if name not in known:
            continue
        default = getattr(cls(), name)
        if dataclasses.is_dataclass(default):
            kwargs[name] = _build(type(default), value, f"{path}{name}.", bad)
        elif isinstance(default, tuple) and isinstance(value, list):
            kwargs[name] = tuple(value)
        else:
            kwargs[name] = value
    return cls(**kwargs)


def from_dict(raw: dict | None) -> ExperimentConfig:
    bad: list[str] = []
    cfg = _build(ExperimentConfig, raw or {}, "", bad)
    if bad:
        raise ConfigError("unknown config keys: " + ", ".join(sorted(bad)))
    return cfg.validate()


def load_config(path) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig().validate()
    with open(path) as fh:
        return from_dict(yaml.safe_load(fh))


def to_dict(cfg) -> dict:
    return json.loads(json.dumps(dataclasses.asdict(cfg)))


def dump_config(cfg: ExperimentConfig, path) -> None:
    Path(path).write_text(yaml.safe_dump(to_dict(cfg), sort_keys=True))


def _digest(obj) -> str:
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def config_hash(cfg: ExperimentConfig) -> str:
    return _digest(to_dict(cfg))


# fields that do not influence what a single training run produces
_RUN_INDEPENDENT = ("scenarios", "seeds", "execution", "convergence", "fixed_cio_db")


def training_hash(cfg: ExperimentConfig, scenario: int, seed: int) -> str:
    """Identity of one trained checkpoint: the learning-relevant config plus scenario and seed."""
    d = to_dict(cfg)
    for key in _RUN_INDEPENDENT:
        d.pop(key)
    d["scenario"], d["seed"] = int(scenario), int(seed)
    return _digest(d)
