"""Head-of-line-delay-first RBG scheduler.

Stand-in for a channel/QoS-aware scheduler: backlogged UEs are served in
order of their oldest queued packet, each taking whole RBGs until its queue
is covered or the band runs out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit


@njit(cache=True)
def oldest_first(cands, age, n):
    """Sort the first n entries of ``cands`` by descending age, ties by index."""
    for a in range(1, n):
        key = cands[a]
        b = a - 1
        while b >= 0 and (age[cands[b]] < age[key]
                          or (age[cands[b]] == age[key] and cands[b] > key)):
            cands[b + 1] = cands[b]
            b -= 1
        cands[b + 1] = key


@njit(cache=True)
def greedy_allocate(cands, n, demand, rate_per_rb, rbg_sizes, alloc):
    """Fill ``alloc`` (RBG -> UE, -1 idle) following the order in cands[:n].

    Returns the number of RBGs handed out.
    """
    alloc[:] = -1
    g = 0
    n_groups = len(rbg_sizes)
    for c in range(n):
        u = cands[c]
        remaining = demand[u]
        while remaining > 0.0 and g < n_groups:
            alloc[g] = u
            remaining -= rbg_sizes[g] * rate_per_rb[u]
            g += 1
        if g >= n_groups:
            break
    return g


@dataclass
class Allocation:
    rbg_to_ue: np.ndarray
    granted_bits: np.ndarray
    rbu_tti: float


def schedule_tti(ue_demands, rate_per_rb, rbg_sizes, hol_age=None, eligible=None) -> Allocation:
    """Schedule one TTI of one cell.

    ue_demands: queued bits per UE. rate_per_rb: bits one RB carries for the
    UE in one TTI. hol_age: age of each UE's head-of-line packet (larger is
    served first); defaults to equal ages.
    """
    demand = np.asarray(ue_demands, dtype=float)
    if np.any(demand < 0):
        raise ValueError("demands must be non-negative")
    rate = np.asarray(rate_per_rb, dtype=float)
    sizes = np.asarray(rbg_sizes, dtype=np.int64)
    age = np.zeros(len(demand)) if hol_age is None else np.asarray(hol_age, dtype=float)
    ok = demand > 0
    if eligible is not None:
        ok &= np.asarray(eligible, dtype=bool)
    cands = np.flatnonzero(ok).astype(np.int64)
    oldest_first(cands, age, len(cands))
    alloc = np.empty(len(sizes), dtype=np.int64)
    used = greedy_allocate(cands, len(cands), demand, rate, sizes, alloc)
    granted = np.zeros(len(demand))
    for g in range(used):
        granted[alloc[g]] += sizes[g] * rate[alloc[g]]
    return Allocation(alloc, np.minimum(granted, demand), used / len(sizes))
