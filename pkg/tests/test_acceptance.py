"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line. For a plain
report outside pytest:

    python3 tests/test_acceptance.py [criterion numbers...]
"""

import json
import math
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from lbmarl.harness import convergence_episode, load_config, run_one
from lbmarl.marl import (MaddpgConfig, PredictorConfig, RankedSequenceBuffer, ReplayBuffer,
                         build_ranked_buffer, train_maddpg_ap, train_predictor)
from lbmarl.netsim import HandoverDecision, UeState, evaluate_a3
from lbmarl.reward import RewardParams, bs_reward, daleth, epsilon1, epsilon2

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

import gradcheck as gc  # noqa: E402
import oracles  # noqa: E402
from data.make_reference import (CFG as REF_CFG, EPISODES as REF_EPISODES,  # noqa: E402
                                 ITERATIONS as REF_ITERATIONS, SEED as REF_SEED, reference_env,
                                 trajectory)
from scenarios import scripted_game, separable_sequences  # noqa: E402

ROOT = HERE.parent
P = RewardParams()


# ---- 1. reward chain against the high-precision oracle


def criterion_1():
    rng = np.random.default_rng(1)
    n = 1000
    d = np.r_[0.0, 0.1, 1.0, rng.uniform(0, 1.0, n - 3)]
    p = np.r_[0.8, 1.0, 0.0, rng.uniform(0, 1, n - 3)]
    sizes = rng.integers(1, 11, n)
    rates = [rng.uniform(0, 2e5, k) for k in sizes]
    deltas = [rng.uniform(-1, 1, k) for k in sizes]

    t0 = time.perf_counter()
    got_d = [daleth(x, P) for x in d]
    got_e2 = [epsilon2(x, P) for x in p]
    got_e1 = [epsilon1(x) for x in deltas]
    got_r = [bs_reward(r, x, q, P) for r, x, q in zip(rates, deltas, p)]
    elapsed = time.perf_counter() - t0

    err = 0.0
    for i in range(n):
        err = max(err,
                  abs(got_d[i] - float(oracles.daleth(d[i]))),
                  abs(got_e2[i] - float(oracles.epsilon2(p[i]))),
                  abs(got_e1[i] - float(oracles.epsilon1(list(deltas[i])))),
                  abs(got_r[i] - float(oracles.bs_reward(list(rates[i]), list(deltas[i]), p[i]))))
    quoted = round(got_d[0], 6) == 0.998894 and round(epsilon2(1.0, P), 6) == 0.017986
    ok = err <= 1e-9 and elapsed < 1.0 and quoted
    return ok, f"max |err| {err:.2e} (<= 1e-9), {elapsed:.3f}s (< 1s), tabulated values {quoted}"


# ---- 2. sum form equals bracket form


def criterion_2():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(10_000):
        k = int(rng.integers(1, 13))
        rates = rng.uniform(0, 1e7, k)
        deltas = rng.uniform(-1, 1, k)
        p = rng.uniform(0, 1)
        total = float(rates.sum())
        lhs = epsilon2(p, P) * (total + epsilon1(deltas) * total)
        rhs = bs_reward(rates, deltas, p, P)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs), total))
    return worst <= 1e-12, f"max scaled difference {worst:.2e} over 10000 inputs (<= 1e-12)"


# ---- 3. finite-difference gradient checks


def criterion_3():
    t0 = time.perf_counter()
    worst = {"actor": 0.0, "critic": 0.0, "critic_action": 0.0, "predictor": 0.0}
    for seed in range(50):
        rng = np.random.default_rng(1000 + seed)
        net, lg = gc.actor_case(rng)
        worst["actor"] = max(worst["actor"], gc.check_module(net, lg))
        net, lg, action_check = gc.critic_case(rng)
        worst["critic"] = max(worst["critic"], gc.check_module(net, lg))
        worst["critic_action"] = max(worst["critic_action"], action_check())
        clf, lg = gc.lstm_case(rng)
        worst["predictor"] = max(worst["predictor"], gc.check_module(clf, lg))
    elapsed = time.perf_counter() - t0
    ok = max(worst.values()) < 1e-4 and elapsed < 30
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    return ok, f"50 parameterizations, worst rel err: {detail} (< 1e-4), {elapsed:.1f}s (< 30s)"


# ---- 4. scripted two-agent game


def criterion_4():
    t0 = time.perf_counter()
    used, acts = scripted_game(updates=2000, n_agents=2)
    elapsed = time.perf_counter() - t0
    gap = float(np.max(np.abs(acts - 3.0)))
    ok = used is not None and gap < 0.1 and elapsed < 60
    return ok, f"within 0.1 of 3 after {used} updates (< 2000), max gap {gap:.3f}, {elapsed:.1f}s"


# ---- 5. ranked buffer against a sort oracle


def _oracle_kept(rewards, episodes, window, k):
    starts = [s for s in range(len(rewards) - window + 1)
              if episodes[s] == episodes[s + window - 1]]
    scored = [(sum(rewards[s:s + window]), s) for s in starts]
    scored.sort(key=lambda t: (-t[0], -t[1]))  # newest first on ties
    return [s for _, s in scored[:math.ceil(len(scored) / k)]]


def criterion_5():
    rng = np.random.default_rng(5)
    failures = 0
    for _ in range(1000):
        n = int(rng.integers(1, 60))
        window = int(rng.integers(1, 7))
        k = int(rng.integers(1, 6))
        n_agents = int(rng.integers(1, 4))
        agent = int(rng.integers(n_agents))
        replay = ReplayBuffer(int(rng.integers(max(1, n // 2), n + 5)), n_agents, 3, rng)
        rewards = rng.integers(-3, 4, (n, n_agents)).astype(float)
        episodes = np.cumsum(rng.random(n) < 0.1)
        for t in range(n):
            x = np.full((n_agents, 3), float(t))
            replay.add(x, np.zeros(n_agents), rewards[t], x, int(episodes[t]))
        _, _, r, _, ep = replay.ordered()
        first = n - len(r)
        buf = build_ranked_buffer(replay, agent, window, k)
        got = (buf.sequences[:, 0, 0] - first).astype(int).tolist() if len(buf) else []
        want = _oracle_kept(r[:, agent].tolist(), ep.tolist(), window, k)
        if got != want:
            failures += 1
    return failures == 0, f"{1000 - failures}/1000 randomized buffers match the sort oracle"


# ---- 6. predictor


def criterion_6():
    rng = np.random.default_rng(6)
    x, y = separable_sequences(600, k=3, window=5, seed=6)
    _, acc_sep = train_predictor(RankedSequenceBuffer(x, np.zeros(len(y)), y, len(y)), 3, 5,
                                 PredictorConfig(), rng)
    x, _ = separable_sequences(3000, k=3, window=5, seed=7)
    y = rng.integers(0, 3, len(x))
    _, acc_rand = train_predictor(RankedSequenceBuffer(x, np.zeros(len(y)), y, len(y)), 3, 5,
                                  PredictorConfig(holdout=0.5), rng)
    ok = acc_sep >= 0.9 and abs(acc_rand - 1 / 3) <= 0.05
    return ok, (f"separable hold-out accuracy {acc_sep:.3f} (>= 0.9), random-label accuracy "
                f"{acc_rand:.3f} (1/3 +- 0.05)")


# ---- 7. A3 and time-to-trigger


def criterion_7():
    def ue():
        return UeState(0, np.zeros(2))

    a = ue()
    seq = [evaluate_a3(a, 1, -85.0, -80.0, 0.0, 0.0, 2.0, 0.001) for _ in range(8)]
    ex1 = seq[:7] == [HandoverDecision.PENDING] * 7 and seq[7] == HandoverDecision.TRIGGER
    b = ue()
    b.ttt_timers[1] = 0.005
    ex2 = (evaluate_a3(b, 1, -85.0, -85.0, 0.0, 0.0, 2.0, 0.001) == HandoverDecision.NONE
           and b.ttt_timers[1] == 0.0)
    c = ue()
    ex3 = all(evaluate_a3(c, 1, -85.0, -80.0, 0.0, -9.0, 2.0, 0.001) == HandoverDecision.NONE
              for _ in range(50))

    rng = np.random.default_rng(7)
    prop = True
    for _ in range(2000):
        # 7 holding ticks with one failing tick somewhere among them never triggers
        pattern = np.ones(8, dtype=bool)
        pattern[int(rng.integers(0, 8))] = False
        d = ue()
        fired = [evaluate_a3(d, 1, -85.0, -80.0 if h else -90.0, 0.0, 0.0, 2.0, 0.001)
                 for h in pattern]
        prop &= HandoverDecision.TRIGGER not in fired
    ok = ex1 and ex2 and ex3 and prop
    return ok, (f"examples: trigger after TTT {ex1}, hysteresis block {ex2}, CIO -9 block {ex3}; "
                f"timer-reset property {prop}")


# ---- 8. end-to-end directional check


def _run_method(method, seed, out):
    cfg = load_config(ROOT / "configs" / "scaled.yaml")
    cfg.method = method
    cfg.validate()
    scenario = int(cfg.scenarios[0])
    records, _ = run_one(cfg, scenario, seed, out)
    train = [r for r in records if r.stage == "train"]
    execute = [r for r in records if r.stage == "execute"]
    conv = cfg.convergence
    return {
        "delay": float(np.mean([r.mean_delay_s for r in execute])),
        "plr": float(np.mean([r.plr for r in execute])),
        "conv": (convergence_episode(train, conv.window, conv.tail, conv.tol) if train
                 else float("nan")),
    }


def criterion_8():
    t0 = time.perf_counter()
    res = {m: [] for m in ("fixed-cio", "maddpg-ap", "cdql")}
    with tempfile.TemporaryDirectory() as tmp:
        for seed in (0, 1, 2):
            for m in res:
                res[m].append(_run_method(m, seed, tmp))
    mean = {m: {k: float(np.mean([r[k] for r in rs])) for k in rs[0]} for m, rs in res.items()}
    ap, fixed, cdql = mean["maddpg-ap"], mean["fixed-cio"], mean["cdql"]
    qos = ap["delay"] < fixed["delay"] and ap["plr"] < fixed["plr"]
    faster = ap["conv"] < cdql["conv"]
    detail = (f"delay {ap['delay']:.4f}s vs fixed {fixed['delay']:.4f}s, "
              f"PLR {ap['plr']:.4f} vs fixed {fixed['plr']:.4f} (lower both: {qos}); "
              f"convergence episode {ap['conv']:.1f} vs CDQL {cdql['conv']:.1f} "
              f"(fewer: {faster}); {time.perf_counter() - t0:.0f}s")
    return qos and faster, detail


# ---- 9. determinism across processes


def criterion_9():
    with tempfile.TemporaryDirectory() as tmp:
        conf = Path(tmp) / "c.yaml"
        conf.write_text(
            "scenarios: [8]\nseeds: [0, 1]\n"
            "training: {episodes: 6, iterations: 10}\nexecution: {episodes: 2, iterations: 10}\n"
            "maddpg: {hidden: [16, 16], batch_size: 16}\npredictor: {hidden: 8, epochs: 2}\n")
        outputs = []
        for i, hashseed in enumerate(("1", "2")):
            out = Path(tmp) / f"run{i}"
            env = {**os.environ, "PYTHONHASHSEED": hashseed}
            subprocess.run([sys.executable, "-W", "ignore", "-m", "lbmarl.harness.cli", "sweep",
                            "--config", str(conf), "--out", str(out)],
                           check=True, env=env, capture_output=True)
            outputs.append((out / "metrics.csv").read_bytes())
        rows = outputs[0].count(b"\n") - 1
    ok = outputs[0] == outputs[1] and rows > 0
    return ok, f"two separate processes wrote byte-identical metrics.csv ({rows} rows): {ok}"


# ---- 10. K=1 reproduces the frozen plain-MADDPG reference


def criterion_10():
    ref = json.loads((HERE / "data" / "maddpg_reference.json").read_text())
    summaries = []
    cfg = MaddpgConfig(hidden=tuple(REF_CFG["hidden"]), batch_size=REF_CFG["batch_size"])
    ap = train_maddpg_ap(reference_env(), cfg, PredictorConfig(), 1, 5, REF_EPISODES,
                         REF_ITERATIONS, np.random.SeedSequence(REF_SEED),
                         lambda phase, ep, s: summaries.append(s))
    got = trajectory(summaries, ap.members[0].actors)
    keys = ("rewards", "agent_rewards", "mean_delay_s", "probe_actions")
    same = [k for k in keys if got[k] == ref[k]]
    ok = len(same) == len(keys)
    return ok, f"exact match on {len(same)}/{len(keys)} recorded series ({', '.join(same)})"


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}


def _report(n):
    ok, detail = CRITERIA[n]()
    return ok, f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.mark.parametrize("n", list(CRITERIA))
def test_criterion(n, capsys):
    ok, line = _report(n)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    wanted = [int(a) for a in sys.argv[1:]] or list(CRITERIA)
    results = []
    for n in wanted:
        ok, line = _report(n)
        print(line, flush=True)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
