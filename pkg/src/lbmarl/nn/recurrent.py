from __future__ import annotations

import numpy as np

from .dense import Module, uniform_init
from .losses import nll_loss, softmax


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


class RecurrentClassifier(Module):
    """Single-layer LSTM over a fixed-length window, softmax read-out of the last state.

    Parameters: Wx (d, 4H), Wh (H, 4H), b (4H,), Wo (H, K), bo (K,), with
    gate blocks ordered input, forget, cell, output.
    """

    def __init__(self, input_size: int, hidden_size: int, n_classes: int, window: int,
                 rng: np.random.Generator | None = None):
        super().__init__()
        if n_classes < 1:
            raise ValueError("need at least one class")
        self.input_size = int(input_size)
        self.hidden_size = int(hidden_size)
        self.n_classes = int(n_classes)
        self.window = int(window)
        rng = rng if rng is not None else np.random.default_rng(0)
        d, h, k = self.input_size, self.hidden_size, self.n_classes
        self.params = [
            uniform_init(h, (d, 4 * h), rng),
            uniform_init(h, (h, 4 * h), rng),
            uniform_init(h, (4 * h,), rng),
            uniform_init(h, (h, k), rng),
            uniform_init(h, (k,), rng),
        ]

    def forward(self, x):
        """x: (B, W, d) -> (probs (B, K), cache)."""
        x = np.asarray(x, dtype=float)
        if x.ndim != 3 or x.shape[1] != self.window or x.shape[2] != self.input_size:
            raise ValueError(f"expected (batch, {self.window}, {self.input_size}), got {x.shape}")
        wx, wh, b, wo, bo = self.params
        n, hs = x.shape[0], self.hidden_size
        h = np.zeros((n, hs))
        c = np.zeros((n, hs))
        steps = []
        for t in range(self.window):
            a = x[:, t] @ wx + h @ wh + b
            i = _sigmoid(a[:, :hs])
            f = _sigmoid(a[:, hs:2 * hs])
            g = np.tanh(a[:, 2 * hs:3 * hs])
            o = _sigmoid(a[:, 3 * hs:])
            c_prev, h_prev = c, h
            c = f * c + i * g
            tc = np.tanh(c)
            h = o * tc
            steps.append((h_prev, c_prev, i, f, g, o, tc))
        logits = h @ wo + bo
        cache = {"x": x, "steps": steps, "h": h, "version": self.version, "owner": id(self)}
        return softmax(logits), cache

    def backward(self, cache, grad_logits):
        self._check_cache(cache)
        wx, wh, b, wo, bo = self.params
        x = cache["x"]
        g_logits = np.asarray(grad_logits, dtype=float)
        d_wo = cache["h"].T @ g_logits
        d_bo = g_logits.sum(axis=0)
        d_wx = np.zeros_like(wx)
        d_wh = np.zeros_like(wh)
        d_b = np.zeros_like(b)
        dh = g_logits @ wo.T
        dc = np.zeros_like(dh)
        for t in reversed(range(self.window)):
            h_prev, c_prev, i, f, g, o, tc = cache["steps"][t]
            do = dh * tc
            dc = dc + dh * o * (1.0 - tc * tc)
            da = np.concatenate([
                dc * g * i * (1.0 - i),
                dc * c_prev * f * (1.0 - f),
                dc * i * (1.0 - g * g),
                do * o * (1.0 - o),
            ], axis=1)
            d_wx += x[:, t].T @ da
            d_wh += h_prev.T @ da
            d_b += da.sum(axis=0)
            dh = da @ wh.T
            dc = dc * f
        return [d_wx, d_wh, d_b, d_wo, d_bo]

    def loss_and_grads(self, x, labels):
        probs, cache = self.forward(x)
        loss, g = nll_loss(probs, labels)
        return loss, self.backward(cache, g)

    def predict_proba(self, seq) -> np.ndarray:
        return recurrent_forward(self, seq)

    def config(self) -> dict:
        return {"kind": "lstm", "input_size": self.input_size, "hidden_size": self.hidden_size,
                "n_classes": self.n_classes, "window": self.window}

    @classmethod
    def from_config(cls, cfg: dict) -> "RecurrentClassifier":
        return cls(cfg["input_size"], cfg["hidden_size"], cfg["n_classes"], cfg["window"])


def recurrent_forward(clf: RecurrentClassifier, sequence) -> np.ndarray:
    """K class probabilities for one (W, d) sequence."""
    seq = np.asarray(sequence, dtype=float)
    if seq.ndim != 2 or seq.shape[0] != clf.window:
        raise ValueError(f"sequence must have length {clf.window}, got shape {seq.shape}")
    return clf.forward(seq[None])[0][0]
