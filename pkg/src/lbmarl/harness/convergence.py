from __future__ import annotations

import numpy as np


def trailing_mean(series, window: int) -> np.ndarray:
    """Moving average over the last ``window`` points; shorter windows at the start."""
    x = np.asarray(series, dtype=float)
    c = np.concatenate([[0.0], np.cumsum(x)])
    idx = np.arange(1, len(x) + 1)
    lo = np.maximum(0, idx - window)
    return (c[idx] - c[lo]) / (idx - lo)


def detect_convergence(series, window: int = 10, tail: int = 20, tol: float = 0.05) -> int:
    """First episode from which the trailing mean stays within ``tol`` (relative)
    of the mean of the last ``tail`` episodes. Returns len(series) if it never settles."""
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or len(x) < max(window, tail):
        raise ValueError(f"need at least {max(window, tail)} episodes, got {len(x)}")
    if not np.all(np.isfinite(x)):
        raise ValueError("reward series contains non-finite values")
    target = x[-tail:].mean()
    band = tol * abs(target) + 1e-12 * max(1.0, abs(target))
    inside = np.abs(trailing_mean(x, window) - target) <= band
    if not inside[-1]:
        return len(x)
    outside = np.flatnonzero(~inside)
    return 0 if len(outside) == 0 else int(outside[-1] + 1)
