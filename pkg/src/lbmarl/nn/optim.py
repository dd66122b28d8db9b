from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class AdamState:
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)


def _param_list(target):
    return target.params if hasattr(target, "params") else target


def adam_step(state: AdamState, params, grads) -> None:
    """Bias-corrected Adam update, in place.

    ``params`` is a list of arrays or a Module. A non-finite gradient raises
    FloatingPointError before anything is modified.
    """
    plist = _param_list(params)
    if len(plist) != len(grads):
        raise ValueError("params and grads differ in length")
    for p, g in zip(plist, grads):
        if p.shape != np.shape(g):
            raise ValueError(f"gradient shape {np.shape(g)} does not match {p.shape}")
        if not np.all(np.isfinite(g)):
            raise FloatingPointError("non-finite gradient; Adam step aborted")
    if not state.m:
        state.m = [np.zeros_like(p) for p in plist]
        state.v = [np.zeros_like(p) for p in plist]
    state.t += 1
    bc1 = 1.0 - state.beta1 ** state.t
    bc2 = 1.0 - state.beta2 ** state.t
    for p, g, m, v in zip(plist, grads, state.m, state.v):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        p -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
    if hasattr(params, "touch"):
        params.touch()


class Adam:
    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.state = AdamState(lr, beta1, beta2, eps)

    def step(self, params, grads) -> None:
        adam_step(self.state, params, grads)


def polyak_update(target, online, tau: float):
    """target <- tau * online + (1 - tau) * target, in place; returns target."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    tl, ol = _param_list(target), _param_list(online)
    if len(tl) != len(ol):
        raise ValueError("parameter lists differ in length")
    for t, o in zip(tl, ol):
        t *= 1.0 - tau
        t += tau * o
    if hasattr(target, "touch"):
        target.touch()
    return target
