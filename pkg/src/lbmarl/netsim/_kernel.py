"""Compiled TTI loop for one observation window.

All simulator state lives in flat arrays owned by NetworkSimulator; this
module only mutates them. Per tick: traffic arrival, expiry drops, A3
evaluation for every UE against every neighbour, per-cell scheduling and
queue draining.
"""

import numpy as np
from numba import njit

from .handover import a3_holds, advance_timer
from .scheduler import greedy_allocate, oldest_first

# residual bits below this count as a fully sent packet
BITS_EPS = 1e-6


@njit(cache=True)
def _pop(u, q_head, q_len, q_total, q_bits, cap):
    q_total[u] -= q_bits[u, q_head[u]]
    q_head[u] = (q_head[u] + 1) % cap
    q_len[u] -= 1
    if q_len[u] == 0:
        q_total[u] = 0.0


@njit(cache=True)
def run_window(start_tick, arrivals, tti, packet_bits, drop_ticks,
               rsrp, cio, hys, ttt, attach_thr, ho_ticks, rate_t, rbg_sizes,
               serving, timers, block_until,
               q_enq, q_bits, q_head, q_len, q_total,
               rbu_samples, delivered_bits, delay_sum, delivered_pkts,
               dropped, generated, handovers):
    n_ticks, n_ue = arrivals.shape
    n_bs = rsrp.shape[1]
    cap = q_enq.shape[1]
    n_groups = len(rbg_sizes)
    cands = np.empty(n_ue, dtype=np.int64)
    age = np.zeros(n_ue)
    alloc = np.empty(n_groups, dtype=np.int64)
    grant = np.zeros(n_ue)

    for k in range(n_ticks):
        tick = start_tick + k
        for u in range(n_ue):
            for _ in range(arrivals[k, u]):
                generated[u] += 1
                if q_len[u] == cap:
                    _pop(u, q_head, q_len, q_total, q_bits, cap)
                    dropped[u] += 1
                pos = (q_head[u] + q_len[u]) % cap
                q_enq[u, pos] = tick
                q_bits[u, pos] = packet_bits
                q_len[u] += 1
                q_total[u] += packet_bits
            while q_len[u] > 0 and tick - q_enq[u, q_head[u]] >= drop_ticks:
                _pop(u, q_head, q_len, q_total, q_bits, cap)
                dropped[u] += 1

            s = serving[u]
            best = -1
            best_val = -np.inf
            if s < 0:
                for j in range(n_bs):
                    if rsrp[u, j] >= attach_thr and rsrp[u, j] + cio[j] > best_val:
                        best = j
                        best_val = rsrp[u, j] + cio[j]
                if best >= 0:
                    serving[u] = best
                continue
            for j in range(n_bs):
                if j == s:
                    continue
                holds = rsrp[u, j] >= attach_thr and a3_holds(
                    rsrp[u, s], rsrp[u, j], cio[s], cio[j], hys)
                t_new, fired = advance_timer(timers[u, j], holds, tti, ttt)
                timers[u, j] = t_new
                if fired and rsrp[u, j] + cio[j] > best_val:
                    best = j
                    best_val = rsrp[u, j] + cio[j]
            if best >= 0:
                serving[u] = best
                timers[u, :] = 0.0
                block_until[u] = tick + ho_ticks
                handovers[u] += 1

        for b in range(n_bs):
            n = 0
            for u in range(n_ue):
                if serving[u] == b and q_len[u] > 0 and tick >= block_until[u]:
                    cands[n] = u
                    age[u] = tick - q_enq[u, q_head[u]]
                    n += 1
            oldest_first(cands, age, n)
            used = greedy_allocate(cands, n, q_total, rate_t[b], rbg_sizes, alloc)
            rbu_samples[k, b] = used / n_groups
            for g in range(used):
                grant[alloc[g]] += rbg_sizes[g] * rate_t[b, alloc[g]]
            for c in range(n):
                u = cands[c]
                bits = grant[u]
                grant[u] = 0.0
                while bits > 0.0 and q_len[u] > 0:
                    h = q_head[u]
                    take = min(bits, q_bits[u, h])
                    q_bits[u, h] -= take
                    q_total[u] -= take
                    bits -= take
                    delivered_bits[u] += take
                    if q_bits[u, h] <= BITS_EPS:
                        delay_sum[u] += (tick + 1 - q_enq[u, h]) * tti
                        delivered_pkts[u] += 1
                        _pop(u, q_head, q_len, q_total, q_bits, cap)
