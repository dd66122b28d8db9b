"""Checkpoint directory for trained ensembles.

    manifest.json
    agent_<i>/subpolicy_<k>/{actor,target_actor,critic,target_critic}.params
    agent_<i>/predictor.params

The manifest records method, K, W, dimensions and the training config hash.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

from ..nn import load_module, save_module
from .adaptive import MaddpgAp
from .maddpg import Actor, CentralCritic, MaddpgConfig

FORMAT_VERSION = 1
NET_FILES = ("actor", "target_actor", "critic", "target_critic")


class CheckpointMismatch(ValueError):
    pass


@dataclass
class LoadedMember:
    actors: list
    critics: list
    target_actors: list
    target_critics: list


def write_manifest(directory, manifest: dict) -> None:
    path = Path(directory) / "manifest.json"
    path.write_text(json.dumps({"format_version": FORMAT_VERSION, **manifest},
                               sort_keys=True, indent=2) + "\n")


def read_manifest(directory, expected_hash: str | None = None, method: str | None = None) -> dict:
    path = Path(directory) / "manifest.json"
    if not path.exists():
        raise FileNotFoundError(f"no checkpoint manifest at {path}")
    manifest = json.loads(path.read_text())
    if manifest.get("format_version") != FORMAT_VERSION:
        raise CheckpointMismatch(f"unsupported checkpoint format {manifest.get('format_version')}")
    if expected_hash is not None and manifest.get("config_hash") != expected_hash:
        raise CheckpointMismatch(
            f"checkpoint config hash {manifest.get('config_hash')} != current {expected_hash}")
    if method is not None and manifest.get("method") != method:
        raise CheckpointMismatch(f"checkpoint method {manifest.get('method')!r} != {method!r}")
    return manifest


def save_maddpg_ap(directory, ap: MaddpgAp, config_hash: str, method: str = "maddpg-ap") -> None:
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    for i in range(ap.n_agents):
        for k, member in enumerate(ap.members):
            sub = root / f"agent_{i}" / f"subpolicy_{k}"
            sub.mkdir(parents=True, exist_ok=True)
            for name in NET_FILES:
                save_module(sub / f"{name}.params", getattr(member, name + "s")[i].net)
        save_module(root / f"agent_{i}" / "predictor.params", ap.predictors[i])
    write_manifest(root, {
        "method": method, "k": ap.k, "window": ap.window, "n_agents": ap.n_agents,
        "obs_dim": ap.members[0].actors[0].net.sizes[0], "config_hash": config_hash,
        "maddpg": asdict(ap.cfg), "predictor_accuracy": ap.predictor_accuracy,
    })


def load_maddpg_ap(directory, expected_hash: str | None = None,
                   method: str | None = None) -> MaddpgAp:
    root = Path(directory)
    manifest = read_manifest(root, expected_hash, method)
    raw = dict(manifest["maddpg"])
    raw["hidden"] = tuple(raw["hidden"])
    cfg = MaddpgConfig(**raw)
    n, k, d = manifest["n_agents"], manifest["k"], manifest["obs_dim"]
    members = []
    for kk in range(k):
        nets = {name: [] for name in NET_FILES}
        for i in range(n):
            sub = root / f"agent_{i}" / f"subpolicy_{kk}"
            for name in NET_FILES:
                net = load_module(sub / f"{name}.params")
                if "actor" in name:
                    wrap = Actor(d, cfg, net=net)
                else:
                    wrap = CentralCritic(n, d, cfg, net=net)
                nets[name].append(wrap)
        members.append(LoadedMember(nets["actor"], nets["critic"], nets["target_actor"],
                                    nets["target_critic"]))
    predictors = [load_module(root / f"agent_{i}" / "predictor.params") for i in range(n)]
    return MaddpgAp(members, predictors, manifest["window"], cfg,
                    list(manifest.get("predictor_accuracy", [])))
