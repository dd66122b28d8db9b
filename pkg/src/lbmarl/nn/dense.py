from __future__ import annotations

import numpy as np


class Module:
    """Holds a flat list of parameter arrays and a version counter.

    The counter is bumped by every in-place update so forward caches taken
    before the update can be recognised as stale.
    """

    params: list

    def __init__(self):
        self.version = 0

    def touch(self) -> None:
        self.version += 1

    def set_params(self, params) -> None:
        for dst, src in zip(self.params, params, strict=True):
            if dst.shape != np.shape(src):
                raise ValueError(f"shape mismatch {dst.shape} vs {np.shape(src)}")
            dst[...] = src
        self.touch()

    def num_params(self) -> int:
        return sum(p.size for p in self.params)

    def _check_cache(self, cache) -> None:
        if cache["version"] != self.version or cache["owner"] != id(self):
            raise RuntimeError("stale forward cache: parameters changed since forward()")


def uniform_init(fan_in: int, shape, rng: np.random.Generator) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


class DenseNet(Module):
    """Feed-forward net with ReLU hidden layers.

    output: "identity", or "tanh" which maps the last layer onto
    [low, high] as mid + half * tanh(z).
    """

    def __init__(self, sizes, output: str = "identity", bounds=(-1.0, 1.0),
                 rng: np.random.Generator | None = None):
        super().__init__()
        if len(sizes) < 2:
            raise ValueError("need at least input and output sizes")
        if output not in ("identity", "tanh"):
            raise ValueError(f"unknown output activation {output!r}")
        self.sizes = [int(s) for s in sizes]
        self.output = output
        self.bounds = (float(bounds[0]), float(bounds[1]))
        rng = rng if rng is not None else np.random.default_rng(0)
        self.params = []
        for fan_in, fan_out in zip(self.sizes[:-1], self.sizes[1:]):
            self.params.append(uniform_init(fan_in, (fan_in, fan_out), rng))
            self.params.append(uniform_init(fan_in, (fan_out,), rng))

    @property
    def n_layers(self) -> int:
        return len(self.params) // 2

    def _head(self):
        lo, hi = self.bounds
        return 0.5 * (lo + hi), 0.5 * (hi - lo)

    def forward(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        h = x[None, :] if single else x
        if h.shape[-1] != self.sizes[0]:
            raise ValueError(f"expected input dim {self.sizes[0]}, got {h.shape[-1]}")
        acts = [h]
        zs = []
        for li in range(self.n_layers):
            w, b = self.params[2 * li], self.params[2 * li + 1]
            z = h @ w + b
            zs.append(z)
            if li < self.n_layers - 1:
                h = np.maximum(z, 0.0)
            elif self.output == "tanh":
                mid, half = self._head()
                h = mid + half * np.tanh(z)
            else:
                h = z
            acts.append(h)
        cache = {"acts": acts, "zs": zs, "version": self.version, "owner": id(self),
                 "single": single}
        return (h[0] if single else h), cache

    def __call__(self, x):
        return self.forward(x)[0]

    def backward(self, cache, grad_out):
        """Gradients of sum(grad_out * output) w.r.t. params and the input."""
        self._check_cache(cache)
        acts, zs = cache["acts"], cache["zs"]
        g = np.asarray(grad_out, dtype=float)
        if cache["single"]:
            g = g[None, :]
        grads = [None] * len(self.params)
        for li in reversed(range(self.n_layers)):
            z = zs[li]
            if li < self.n_layers - 1:
                g = g * (z > 0.0)
            elif self.output == "tanh":
                t = np.tanh(z)
                g = g * self._head()[1] * (1.0 - t * t)
            grads[2 * li] = acts[li].T @ g
            grads[2 * li + 1] = g.sum(axis=0)
            g = g @ self.params[2 * li].T
        return grads, (g[0] if cache["single"] else g)

    def copy(self) -> "DenseNet":
        clone = DenseNet.__new__(DenseNet)
        Module.__init__(clone)
        clone.sizes = list(self.sizes)
        clone.output = self.output
        clone.bounds = self.bounds
        clone.params = [p.copy() for p in self.params]
        return clone

    def config(self) -> dict:
        return {"kind": "dense", "sizes": self.sizes, "output": self.output,
                "bounds": list(self.bounds)}

    @classmethod
    def from_config(cls, cfg: dict) -> "DenseNet":
        return cls(cfg["sizes"], cfg["output"], tuple(cfg["bounds"]))
