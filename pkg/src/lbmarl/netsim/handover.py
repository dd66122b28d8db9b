"""A3-event handover with cell individual offsets and time-to-trigger."""

from __future__ import annotations

import enum

from numba import njit

# tolerance for accumulated float timers (8 x 1 ms must reach 8 ms)
TIMER_EPS = 1e-9


class HandoverDecision(enum.Enum):
    NONE = "none"
    PENDING = "pending"
    TRIGGER = "trigger"


@njit(cache=True)
def a3_holds(rsrp_serving, rsrp_neighbor, cio_serving, cio_neighbor, hys):
    return rsrp_neighbor + cio_neighbor > hys + rsrp_serving + cio_serving


@njit(cache=True)
def advance_timer(timer, holds, dt, ttt):
    """Returns (new_timer, fired)."""
    if not holds:
        return 0.0, False
    timer += dt
    return timer, timer >= ttt - TIMER_EPS


def evaluate_a3(ue, neighbor: int, rsrp_serving: float, rsrp_neighbor: float,
                cio_serving: float, cio_neighbor: float, hys: float, dt: float,
                ttt: float = 0.008) -> HandoverDecision:
    """One A3 evaluation of ``neighbor`` for ``ue``, updating its TTT timer.

    ``ue`` is anything with a mutable ``ttt_timers`` sequence (a UeState).
    """
    holds = a3_holds(rsrp_serving, rsrp_neighbor, cio_serving, cio_neighbor, hys)
    timer, fired = advance_timer(float(ue.ttt_timers[neighbor]), holds, dt, ttt)
    ue.ttt_timers[neighbor] = timer
    if fired:
        return HandoverDecision.TRIGGER
    return HandoverDecision.PENDING if holds else HandoverDecision.NONE
