import csv

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lbmarl.netsim import (DETACHED, BsState, HandoverDecision, KPI_COLUMNS, KpiCsvWriter,
                           NetworkSimulator, NetworkTopology, SimParams, UeState, a3_holds,
                           evaluate_a3, observation, pathloss_db, rbg_sizes, rbu_expectation,
                           rsrp_dbm, schedule_tti)

from conftest import make_topology


def mp_pathloss(d_km):
    mpmath.mp.dps = 40
    return float(95 + 27 * mpmath.log10(mpmath.mpf(d_km)))


def flat_topology(ue_positions, bs_positions=((0.0, 0.0), (720.0, 0.0)), tx=20.0):
    # equal antenna heights make the 3-D distance equal the ground distance
    return NetworkTopology(np.array(bs_positions), np.array(ue_positions), tx_power_dbm=tx,
                           bs_antenna_height=1.5, ue_antenna_height=1.5)


# pathloss and RSRP

def test_pathloss_at_one_km_is_intercept():
    assert pathloss_db(1.0) == pytest.approx(95.0, abs=1e-12)


def test_pathloss_clamp_floor():
    assert pathloss_db(0.001) == pytest.approx(14.0, abs=1e-12)
    assert pathloss_db(1e-6) == pytest.approx(14.0, abs=1e-12)


def test_pathloss_isd_matches_oracle():
    assert pathloss_db(0.72) == pytest.approx(mp_pathloss(0.72), abs=1e-12)
    assert pathloss_db(0.72) == pytest.approx(91.147, abs=1e-3)


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan")])
def test_pathloss_domain_error(bad):
    with pytest.raises(ValueError):
        pathloss_db(bad)


@given(st.floats(0.001, 50.0), st.floats(0.001, 50.0))
def test_pathloss_monotone(a, b):
    if a < b:
        assert pathloss_db(a) <= pathloss_db(b)


@pytest.mark.parametrize("tx,dist,expected", [(20.0, 1000.0, -75.0), (0.0, 1000.0, -95.0)])
def test_rsrp_examples(tx, dist, expected):
    topo = flat_topology([(dist, 0.0)], tx=tx)
    assert rsrp_dbm(0, 0, topo) == pytest.approx(expected, abs=1e-9)


def test_rsrp_at_isd_matches_oracle():
    topo = flat_topology([(720.0, 0.0)])
    assert rsrp_dbm(0, 0, topo) == pytest.approx(20.0 - mp_pathloss(0.72), abs=1e-9)
    assert rsrp_dbm(0, 0, topo) == pytest.approx(-71.147, abs=1e-3)


def test_rsrp_uses_antenna_heights():
    topo = NetworkTopology(np.array([[0.0, 0.0], [720.0, 0.0]]), np.array([[0.0, 0.0]]))
    # 28.5 m vertical separation only
    assert rsrp_dbm(0, 0, topo) == pytest.approx(20.0 - mp_pathloss(0.0285), abs=1e-9)


def test_topology_validation():
    with pytest.raises(ValueError):
        NetworkTopology(np.zeros((1, 2)), np.zeros((1, 2)))
    with pytest.raises(ValueError):
        NetworkTopology(np.zeros((2, 2)), np.zeros((1, 2)), rbg_size=5)
    with pytest.raises(ValueError):
        NetworkTopology(np.zeros((2, 2)), np.array([[np.inf, 0.0]]))


# A3 / TTT

def _ue(m=2):
    return UeState(0, np.zeros(m))


def test_a3_neighbor_stronger_is_pending_then_triggers():
    ue = _ue()
    dec = [evaluate_a3(ue, 1, -85.0, -80.0, 0.0, 0.0, 2.0, 0.001) for _ in range(8)]
    assert a3_holds(-85.0, -80.0, 0.0, 0.0, 2.0)
    assert dec[:7] == [HandoverDecision.PENDING] * 7
    assert dec[7] == HandoverDecision.TRIGGER


def test_a3_equal_rsrp_blocked_by_hysteresis():
    ue = _ue()
    ue.ttt_timers[1] = 0.005
    assert evaluate_a3(ue, 1, -85.0, -85.0, 0.0, 0.0, 2.0, 0.001) == HandoverDecision.NONE
    assert ue.ttt_timers[1] == 0.0


def test_a3_negative_cio_suppresses():
    ue = _ue()
    for _ in range(20):
        assert evaluate_a3(ue, 1, -85.0, -80.0, 0.0, -9.0, 2.0, 0.001) == HandoverDecision.NONE


@given(st.floats(-120, -60), st.floats(-120, -60), st.floats(-9, 9), st.floats(-9, 9),
       st.floats(0, 9))
def test_a3_monotone_in_neighbor_cio(rs, rn, cs, cn, extra):
    if a3_holds(rs, rn, cs, cn, 2.0):
        assert a3_holds(rs, rn, cs, min(9.0, cn + extra), 2.0)


@given(st.lists(st.booleans(), min_size=1, max_size=40))
def test_ttt_needs_continuous_hold(pattern):
    ue = _ue()
    run = 0
    for holds in pattern:
        rn = -80.0 if holds else -90.0
        dec = evaluate_a3(ue, 1, -85.0, rn, 0.0, 0.0, 2.0, 0.001)
        run = run + 1 if holds else 0
        assert (dec == HandoverDecision.TRIGGER) == (run >= 8)
        if not holds:
            assert ue.ttt_timers[1] == 0.0
        if dec == HandoverDecision.TRIGGER:
            ue.ttt_timers[1] = 0.0
            run = 0


# scheduler

def test_rbg_partition_of_25_rbs():
    sizes = rbg_sizes(25, 2)
    assert len(sizes) == 13 and sizes[-1] == 1 and sizes.sum() == 25


def test_idle_cell():
    a = schedule_tti(np.zeros(4), np.full(4, 1000.0), rbg_sizes(25, 2))
    assert a.rbu_tti == 0.0 and np.all(a.granted_bits == 0)


def test_saturated_cell():
    a = schedule_tti(np.full(4, 1e9), np.full(4, 1000.0), rbg_sizes(25, 2))
    assert a.rbu_tti == 1.0
    assert a.granted_bits.sum() == pytest.approx(25 * 1000.0)


def test_oldest_head_of_line_served_first():
    sizes = rbg_sizes(4, 2)
    a = schedule_tti([1e6, 1e6, 1e6], [100.0] * 3, sizes, hol_age=[1.0, 5.0, 3.0])
    assert list(a.rbg_to_ue) == [1, 1]


@given(st.lists(st.floats(0, 1e5), min_size=1, max_size=12),
       st.lists(st.floats(1.0, 2000.0), min_size=12, max_size=12))
def test_scheduler_invariants(demands, rates):
    n = len(demands)
    a = schedule_tti(demands, rates[:n], rbg_sizes(25, 2))
    assert 0.0 <= a.rbu_tti <= 1.0
    assert np.all(a.granted_bits <= np.asarray(demands) + 1e-9)
    for g in range(int(round(a.rbu_tti * 13))):
        assert demands[a.rbg_to_ue[g]] > 0


def test_rbu_expectation_examples():
    assert rbu_expectation([0.5, 1.0, 0.75]) == pytest.approx(0.75)
    assert rbu_expectation([0, 0, 0, 0]) == 0.0
    assert rbu_expectation([0.4] * 200) == pytest.approx(0.4, abs=1e-15)
    with pytest.raises(ValueError):
        rbu_expectation([])


def test_observation_examples():
    bs = BsState(3.0, set(range(10)), np.array([0.2, 0.4]), 0.3)
    obs = observation(bs, 30)
    assert obs.ue_ratio == pytest.approx(1 / 3)
    assert (obs.rbu, obs.cio) == (0.3, 3.0)
    assert observation(BsState(0.0, set(), np.zeros(1), 0.0), 30).ue_ratio == 0.0


# simulator

def test_window_has_200_ticks():
    sim = NetworkSimulator(make_topology(6))
    obs, kpi = sim.step(np.zeros(3))
    assert sim.rbu_samples.shape == (200, 3)
    assert sim.tick == 200 and kpi.duration == pytest.approx(0.2)
    for j in range(3):
        assert obs[j, 1] == sim.rbu_samples[:, j].mean()


def test_symmetric_topology_splits_evenly():
    ues = [(-300.0, 50.0), (300.0, 50.0), (-200.0, -80.0), (200.0, -80.0)]
    topo = NetworkTopology(np.array([[-360.0, 0.0], [360.0, 0.0]]), np.array(ues))
    sim = NetworkSimulator(topo)
    obs, _ = sim.step([0.0, 0.0])
    assert obs[0, 0] == obs[1, 0] == 0.5


def test_single_ue_throughput_and_no_loss():
    sim = NetworkSimulator(flat_topology([(100.0, 0.0)]), SimParams(), seed=5)
    for _ in range(3):
        _, kpi = sim.step([0.0, 0.0])
        assert kpi.per_ue_throughput[0] == pytest.approx(200e3)
        assert kpi.plr == 0.0


def test_out_of_range_cio_rejected():
    sim = NetworkSimulator(make_topology(3))
    with pytest.raises(ValueError):
        sim.step([0.0, 9.5, 0.0])
    with pytest.raises(ValueError):
        sim.step([0.0, 0.0])


def test_far_ue_is_detached():
    sim = NetworkSimulator(flat_topology([(100.0, 0.0), (60000.0, 0.0)]))
    obs, kpi = sim.step([0.0, 0.0])
    assert sim.serving[1] == DETACHED and not kpi.connected[1]
    assert obs[:, 0].sum() == pytest.approx(0.5)


def test_cio_moves_edge_ue():
    topo = flat_topology([(330.0, 0.0)])
    sim = NetworkSimulator(topo)
    assert sim.serving[0] == 0
    _, kpi = sim.step([-9.0, 9.0])
    assert kpi.serving[0] == 1 and kpi.handovers == 1
    assert list(kpi.start_members[0]) == [0]


def _accounting_ok(sim):
    queued = sim.queued_packets()
    return np.array_equal(sim.total_generated, sim.total_delivered + sim.total_dropped + queued)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.tuples(*[st.floats(-9, 9)] * 3), min_size=1, max_size=4),
       st.integers(0, 3))
def test_simulator_invariants(actions, seed):
    sim = NetworkSimulator(make_topology(12, seed=seed),
                           SimParams(traffic="poisson", packet_interval=0.002), seed)
    for a in actions:
        obs, kpi = sim.step(a)
        detached = int((kpi.serving == DETACHED).sum())
        assert kpi.connected_counts.sum() + detached == 12
        assert obs[:, 0].sum() <= 1.0 + 1e-12
        assert (abs(obs[:, 0].sum() - 1.0) < 1e-12) == (detached == 0)
        assert np.all((sim.rbu_samples >= 0) & (sim.rbu_samples <= 1))
        assert all(obs[j, 1] == sim.rbu_samples[:, j].mean() for j in range(3))
        assert 0.0 <= kpi.plr <= 1.0 and np.all(kpi.per_ue_throughput >= 0)
        assert _accounting_ok(sim)


def test_overload_drops_after_budget():
    sim = NetworkSimulator(make_topology(15), SimParams(traffic="poisson", packet_interval=0.0004))
    for _ in range(6):
        _, kpi = sim.step(np.zeros(3))
    assert sim.total_dropped.sum() > 0
    assert _accounting_ok(sim)
    assert np.nanmax(kpi.per_ue_avg_delay) <= 0.75 + 1e-9


def test_determinism():
    def stream(seed):
        sim = NetworkSimulator(make_topology(10), SimParams(traffic="poisson",
                                                            packet_interval=0.002), seed)
        out = []
        for a in ([0, 0, 0], [3, -3, 6], [-9, 9, 0]):
            obs, kpi = sim.step(a)
            out.append((obs, kpi.per_ue_throughput, kpi.delay_sum, kpi.dropped_packets))
        return out
    a, b, c = stream(7), stream(7), stream(8)
    for x, y in zip(a, b):
        for u, v in zip(x, y):
            assert np.array_equal(u, v)
    assert any(not np.array_equal(x[1], y[1]) for x, y in zip(a, c))


def test_reset_restores_initial_state():
    sim = NetworkSimulator(make_topology(10))
    first = sim.reset()
    sim.step([9.0, -9.0, 9.0])
    again = sim.reset()
    assert np.array_equal(first[:, 0], again[:, 0])
    assert np.all(again[:, 2] == 0.0) and sim.queued_packets().sum() == 0


def test_kpi_csv_columns(tmp_path):
    sim = NetworkSimulator(make_topology(6))
    path = tmp_path / "kpi.csv"
    writer = KpiCsvWriter(path)
    for step in range(2):
        writer.append(step, sim.step(np.zeros(3))[1])
    rows = list(csv.reader(path.open()))
    assert tuple(rows[0]) == KPI_COLUMNS
    assert len(rows) == 1 + 2 * 3
    assert sum(int(r[4]) for r in rows[1:4]) == 6
