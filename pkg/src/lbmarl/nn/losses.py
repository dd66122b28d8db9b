from __future__ import annotations

import warnings

import numpy as np

PROB_FLOOR = 1e-12


def softmax(logits) -> np.ndarray:
    z = np.asarray(logits, dtype=float)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def nll_loss(probs, label):
    """Negative log-likelihood of ``label`` and its gradient w.r.t. the logits.

    Works for one distribution (label an int) or a batch (labels an int
    array, loss and gradient averaged over the batch). A zero probability at
    the label is floored at 1e-12 and reported with a RuntimeWarning.
    """
    p = np.asarray(probs, dtype=float)
    single = p.ndim == 1
    p2 = p[None, :] if single else p
    y = np.atleast_1d(np.asarray(label, dtype=np.int64))
    if np.any(y < 0) or np.any(y >= p2.shape[1]):
        raise ValueError("label out of range")
    picked = p2[np.arange(len(y)), y]
    if np.any(picked < PROB_FLOOR):
        warnings.warn("probability at label below floor; clamped", RuntimeWarning, stacklevel=2)
    losses = -np.log(np.maximum(picked, PROB_FLOOR))
    grad = p2.copy()
    grad[np.arange(len(y)), y] -= 1.0
    if single:
        return float(losses[0]), grad[0]
    return float(losses.mean()), grad / len(y)
