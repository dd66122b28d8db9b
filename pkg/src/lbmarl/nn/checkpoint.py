"""Parameter files.

Layout (version 1):
    line 1   b"LBMARL-PARAMS 1\n"
    line 2   UTF-8 JSON header + b"\n": {"config": {...}, "shapes": [[...], ...]}
    rest     every array as little-endian float64, row-major, in header order
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dense import DenseNet
from .recurrent import RecurrentClassifier

MAGIC = b"LBMARL-PARAMS 1\n"


def save_params(path, params, config: dict | None = None) -> None:
    header = {"config": config or {}, "shapes": [list(p.shape) for p in params]}
    with Path(path).open("wb") as fh:
        fh.write(MAGIC)
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        for p in params:
            fh.write(np.ascontiguousarray(p, dtype="<f8").tobytes())


def load_params(path):
    """Returns (list of arrays, config dict)."""
    raw = Path(path).read_bytes()
    if not raw.startswith(MAGIC):
        raise ValueError(f"{path}: not a parameter file (bad magic)")
    end = raw.index(b"\n", len(MAGIC))
    header = json.loads(raw[len(MAGIC):end])
    offset = end + 1
    params = []
    for shape in header["shapes"]:
        n = int(np.prod(shape, dtype=np.int64))
        arr = np.frombuffer(raw, dtype="<f8", count=n, offset=offset).reshape(shape)
        params.append(arr.astype(np.float64))
        offset += 8 * n
    if offset != len(raw):
        raise ValueError(f"{path}: trailing bytes after parameters")
    return params, header["config"]


def save_module(path, module) -> None:
    save_params(path, module.params, module.config())


def load_module(path):
    params, cfg = load_params(path)
    kinds = {"dense": DenseNet, "lstm": RecurrentClassifier}
    if cfg.get("kind") not in kinds:
        raise ValueError(f"{path}: unknown module kind {cfg.get('kind')!r}")
    module = kinds[cfg["kind"]].from_config(cfg)
    module.set_params(params)
    return module
