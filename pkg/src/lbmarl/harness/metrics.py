"""Per-episode records and their CSV exports.

metrics.csv columns (fixed order, one row per episode):
    stage, method, scenario, seed, phase, episode, sim_time_s, reward,
    agent_rewards (semicolon-separated, one per BS), mean_delay_s, plr,
    mean_throughput_bps, mean_rbu, config_hash

summary.csv columns (one row per stage/method/scenario/metric, aggregated
over seeds after averaging each seed's episodes):
    stage, method, scenario, metric, n_seeds, mean, ci_low, ci_high, degenerate

Wall-clock durations go to timings.csv so that metrics.csv is a pure
function of config and seed.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from .convergence import detect_convergence

METRIC_COLUMNS = ("stage", "method", "scenario", "seed", "phase", "episode", "sim_time_s",
                  "reward", "agent_rewards", "mean_delay_s", "plr", "mean_throughput_bps",
                  "mean_rbu", "config_hash")
SUMMARY_COLUMNS = ("stage", "method", "scenario", "metric", "n_seeds", "mean", "ci_low",
                   "ci_high", "degenerate")
TIMING_COLUMNS = ("stage", "method", "scenario", "seed", "wall_clock_s")
SUMMARY_METRICS = ("reward", "mean_delay_s", "plr", "mean_throughput_bps", "mean_rbu")


@dataclass
class RunRecord:
    stage: str
    method: str
    scenario: int
    seed: int
    phase: int
    episode: int
    sim_time_s: float
    reward: float
    agent_rewards: tuple
    mean_delay_s: float
    plr: float
    mean_throughput_bps: float
    mean_rbu: float
    config_hash: str

    @classmethod
    def from_summary(cls, summary: dict, *, stage, method, scenario, seed, phase, episode,
                     sim_time_s, config_hash) -> "RunRecord":
        return cls(stage, method, int(scenario), int(seed), int(phase), int(episode),
                   float(sim_time_s), summary["reward"],
                   tuple(float(v) for v in summary["agent_rewards"]), summary["mean_delay_s"],
                   summary["plr"], summary["mean_throughput_bps"], summary["mean_rbu"],
                   config_hash)

    def row(self) -> list[str]:
        out = []
        for name in METRIC_COLUMNS:
            v = getattr(self, name)
            if name == "agent_rewards":
                out.append(";".join(repr(float(x)) for x in v))
            elif isinstance(v, float):
                out.append(repr(v))
            else:
                out.append(str(v))
        return out


def write_metrics(records, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRIC_COLUMNS)
        for rec in records:
            w.writerow(rec.row())
    return path


def read_metrics(path) -> list[RunRecord]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != METRIC_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
        for row in reader:
            out.append(RunRecord(
                row["stage"], row["method"], int(row["scenario"]), int(row["seed"]),
                int(row["phase"]), int(row["episode"]), float(row["sim_time_s"]),
                float(row["reward"]),
                tuple(float(v) for v in row["agent_rewards"].split(";") if v),
                float(row["mean_delay_s"]), float(row["plr"]),
                float(row["mean_throughput_bps"]), float(row["mean_rbu"]), row["config_hash"]))
    return out


def write_timings(rows, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TIMING_COLUMNS)
        w.writerows(rows)
    return path


def t_interval(values, level: float = 0.90) -> tuple[float, float, float, bool]:
    """(mean, low, high, degenerate). A single value gives a zero-width interval."""
    x = np.asarray(values, dtype=float)
    x = x[np.isfinite(x)]
    if len(x) == 0:
        return float("nan"), float("nan"), float("nan"), True
    mean = float(x.mean())
    if len(x) < 2:
        return mean, mean, mean, True
    half = stats.t.ppf(0.5 + level / 2.0, len(x) - 1) * x.std(ddof=1) / np.sqrt(len(x))
    return mean, float(mean - half), float(mean + half), False


def convergence_episode(records, window: int = 10, tail: int = 20, tol: float = 0.05) -> float:
    """Convergence of one training run; for ensembles, the mean over member phases."""
    by_phase = defaultdict(list)
    for r in sorted(records, key=lambda r: r.episode):
        by_phase[r.phase].append(r.reward)
    return float(np.mean([detect_convergence(v, window, tail, tol) for v in by_phase.values()]))


def summarize(records, level: float = 0.90, convergence=None) -> list[list]:
    """Per-seed episode means, then a t-interval across seeds.

    ``convergence`` (window, tail, tol) adds a convergence_episode metric for
    training-stage groups whose phases are long enough.
    """
    groups = defaultdict(lambda: defaultdict(list))
    for r in records:
        groups[(r.stage, r.method, r.scenario)][r.seed].append(r)
    rows = []
    for (stage, method, scenario), by_seed in sorted(groups.items()):
        per_metric = defaultdict(list)
        for seed in sorted(by_seed):
            recs = by_seed[seed]
            for m in SUMMARY_METRICS:
                per_metric[m].append(float(np.nanmean([getattr(r, m) for r in recs])))
            if stage == "train" and convergence is not None:
                try:
                    conv = convergence_episode(recs, *convergence)
                except ValueError:  # phases too short to judge
                    continue
                per_metric["convergence_episode"].append(conv)
        for m, values in per_metric.items():
            mean, lo, hi, degenerate = t_interval(values, level)
            rows.append([stage, method, scenario, m, len(values), repr(mean), repr(lo), repr(hi),
                         int(degenerate)])
    return rows


def export_metrics(records, out_dir, level: float = 0.90, convergence=None) -> tuple[Path, Path]:
    records = list(records)
    if not records:
        raise ValueError("no records to export")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    metrics = write_metrics(records, out / "metrics.csv")
    summary = out / "summary.csv"
    with open(summary, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        w.writerows(summarize(records, level, convergence))
    return metrics, summary
