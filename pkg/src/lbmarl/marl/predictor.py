from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..nn import Adam, RecurrentClassifier
from .ranked import RankedSequenceBuffer


@dataclass
class PredictorConfig:
    hidden: int = 64
    epochs: int = 30
    batch_size: int = 64
    lr: float = 1e-3
    holdout: float = 0.2


def accuracy(clf: RecurrentClassifier, x, y) -> float:
    if len(y) == 0:
        return float("nan")
    probs, _ = clf.forward(x)
    return float(np.mean(np.argmax(probs, axis=1) == y))


def train_predictor(data: RankedSequenceBuffer, n_classes: int, window: int,
                    cfg: PredictorConfig, rng: np.random.Generator,
                    clf: RecurrentClassifier | None = None):
    """Fit a sequence -> subpolicy classifier by mini-batch NLL.

    Returns (classifier, hold-out accuracy). With a single class there is
    nothing to learn and the accuracy is 1 by construction.
    """
    x, y = data.sequences, np.asarray(data.labels, dtype=np.int64)
    d = x.shape[2] if x.ndim == 3 else 3
    clf = clf or RecurrentClassifier(d, cfg.hidden, n_classes, window, rng)
    if n_classes == 1:
        return clf, 1.0
    missing = sorted(set(range(n_classes)) - set(y.tolist()))
    if missing:
        warnings.warn(f"no training sequences for subpolicies {missing}", RuntimeWarning,
                      stacklevel=2)
    if len(y) == 0:
        return clf, float("nan")
    perm = rng.permutation(len(y))
    n_hold = int(round(cfg.holdout * len(y)))
    if n_hold >= len(y):
        n_hold = 0
    hold, train = perm[:n_hold], perm[n_hold:]
    opt = Adam(cfg.lr)
    for _ in range(cfg.epochs):
        order = rng.permutation(train)
        for s in range(0, len(order), cfg.batch_size):
            b = order[s:s + cfg.batch_size]
            _, grads = clf.loss_and_grads(x[b], y[b])
            opt.step(clf, grads)
    if n_hold == 0:
        return clf, accuracy(clf, x[train], y[train])
    return clf, accuracy(clf, x[hold], y[hold])
