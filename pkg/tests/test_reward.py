import numpy as np
import pytest
from hypothesis import given, strategies as st

from lbmarl.netsim import NetworkSimulator, SimParams
from lbmarl.reward import (RewardParams, bs_reward, compute_rewards, daleth, delta_i, epsilon1,
                           epsilon2, qos_rewards)

import oracles
from conftest import make_topology

P = RewardParams()


def test_target_delay_is_two_thirds_pdb():
    assert P.target_delay == pytest.approx(0.1, abs=1e-15)


def test_daleth_midpoint():
    assert daleth(P.target_delay, P) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("d,quoted", [(0.0, 0.998894), (0.2, -0.998894)])
def test_daleth_examples(d, quoted):
    assert daleth(d, P) == pytest.approx(float(oracles.daleth(d)), abs=1e-12)
    assert daleth(d, P) == pytest.approx(quoted, abs=5e-7)


def test_daleth_nan_rejected():
    with pytest.raises(ValueError):
        daleth(float("nan"), P)


def test_delta_examples():
    assert delta_i(False, 0.01, P) == -1.0
    assert delta_i(True, P.target_delay, P) == pytest.approx(0.0, abs=1e-15)
    assert delta_i(True, 0.0, P) == pytest.approx(0.998894, abs=5e-7)


def test_starved_ue_scored_at_drop_horizon():
    assert delta_i(True, float("nan"), P) == daleth(0.75, P)
    assert delta_i(True, None, P) == pytest.approx(-1.0, abs=1e-12)


def test_epsilon1_examples():
    assert epsilon1([-1, 1, 0]) == 0.0
    assert epsilon1([-1, -1]) == -1.0
    assert epsilon1([0.998894, 0.998894]) == pytest.approx(0.998894, abs=1e-15)
    assert epsilon1([]) == 0.0
    with pytest.raises(ValueError):
        epsilon1([1.5])


def test_epsilon2_examples():
    assert epsilon2(0.8, P) == pytest.approx(0.5, abs=1e-15)
    assert epsilon2(1.0, P) == pytest.approx(float(oracles.epsilon2(1.0)), abs=1e-12)
    assert epsilon2(1.0, P) == pytest.approx(0.017986, abs=5e-7)
    assert epsilon2(0.0, P) == pytest.approx(float(oracles.epsilon2(0.0)), abs=1e-12)
    assert epsilon2(0.0, P) == pytest.approx(0.9999999, abs=5e-8)


@pytest.mark.parametrize("p", [-0.01, 1.01, float("nan")])
def test_epsilon2_domain(p):
    with pytest.raises(ValueError):
        epsilon2(p, P)


def test_bs_reward_examples():
    # e2 = 0.5 at the target RBU
    assert bs_reward([1e6, 3e6], [0, 0], 0.8, P) == pytest.approx(2e6, rel=1e-14)
    assert bs_reward([5e6, 1e6], [-1, -1], 0.3, P) == 0.0
    assert bs_reward([], [], 0.5, P) == 0.0


@given(st.floats(0, 2), st.floats(0, 2))
def test_daleth_monotone_decreasing(a, b):
    if a < b:
        assert daleth(a, P) >= daleth(b, P)


@given(st.floats(0, 1), st.floats(0, 1))
def test_epsilon2_monotone_decreasing(a, b):
    if a < b:
        assert epsilon2(a, P) >= epsilon2(b, P)


def test_ranges_on_grid():
    d = daleth(np.linspace(0, 5, 20001), P)
    e = epsilon2(np.linspace(0, 1, 20001), P)
    assert np.all((d >= -1) & (d <= 1))
    assert np.all((e > 0) & (e < 1))
    # the open bound is only visible in float64 while 1 - |d| exceeds the rounding step
    inner = np.linspace(0, 0.5, 2001)
    di = daleth(inner, P)
    assert np.all((di > -1) & (di < 1))
    for x in inner[::200]:
        assert daleth(x, P) == pytest.approx(float(oracles.daleth(x)), abs=1e-12)


@given(st.lists(st.floats(0, 1e7), min_size=1, max_size=10), st.floats(0.01, 100),
       st.floats(0, 1), st.data())
def test_bs_reward_is_linear_in_throughput(rates, lam, p, data):
    deltas = data.draw(st.lists(st.floats(-1, 1), min_size=len(rates), max_size=len(rates)))
    base = bs_reward(rates, deltas, p, P)
    assert bs_reward(np.array(rates) * lam, deltas, p, P) == pytest.approx(lam * base, rel=1e-12,
                                                                           abs=1e-6)


def test_compute_rewards_matches_bs_reward():
    sim = NetworkSimulator(make_topology(12), SimParams(traffic="poisson", packet_interval=0.002))
    sim.step([0, 0, 0])
    _, kpi = sim.step([3.0, -3.0, 0.0])
    r = compute_rewards(kpi, P)
    for j, members in enumerate(kpi.start_members):
        deltas = [delta_i(bool(kpi.connected[u]), kpi.per_ue_avg_delay[u], P) for u in members]
        assert r[j] == bs_reward(kpi.per_ue_throughput[members], deltas, kpi.per_bs_rbu[j], P)
    assert compute_rewards(kpi, P, "global").shape == (3,)
    assert np.all(qos_rewards(kpi, P) <= 2.0)
    with pytest.raises(ValueError):
        compute_rewards(kpi, P, "bogus")


def test_handed_away_ue_counts_for_its_old_cell():
    sim = NetworkSimulator(make_topology(12), SimParams())
    _, kpi = sim.step([-9.0, 9.0, -9.0])
    moved = np.flatnonzero(np.isin(np.arange(12), kpi.start_members[0])
                           & (kpi.serving != 0))
    assert len(moved) > 0
    assert set(moved) <= set(kpi.start_members[0])


def sum_form(rates, deltas, p):
    """The reward written before the algebraic reduction: e2 * (sum R + e1 * sum R)."""
    total = float(np.sum(rates))
    return epsilon2(p, P) * (total + epsilon1(deltas) * total)


@given(st.lists(st.floats(0, 1e7), min_size=1, max_size=12), st.floats(0, 1), st.data())
def test_sum_form_equals_bracket_form(rates, p, data):
    deltas = data.draw(st.lists(st.floats(-1, 1), min_size=len(rates), max_size=len(rates)))
    a, b = sum_form(rates, deltas, p), bs_reward(rates, deltas, p, P)
    assert abs(a - b) <= 1e-12 * max(1.0, abs(b), float(np.sum(rates)))
