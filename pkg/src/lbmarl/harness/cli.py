"""Command line entry point: ``lbmarl {train,execute,sweep,report}``."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys
from pathlib import Path

from .config import METHODS, dump_config, load_config
from .metrics import export_metrics, read_metrics, write_metrics, write_timings
from .runner import checkpoint_dir, run_execution, run_training, sweep

log = logging.getLogger("lbmarl")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lbmarl", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, single: bool):
        sp.add_argument("--config", type=Path, help="YAML experiment config (defaults if omitted)")
        sp.add_argument("--method", choices=METHODS)
        sp.add_argument("--out", type=Path, default=Path("runs"), help="output directory")
        sp.add_argument("--episodes", type=int, help="override the stage's episode count")
        if single:
            sp.add_argument("--scenario", type=int, help="number of UEs (default: first listed)")
            sp.add_argument("--seed", type=int, help="run seed (default: first listed)")
        else:
            sp.add_argument("--scenario", type=int, action="append",
                            help="restrict to these UE counts (repeatable)")
            sp.add_argument("--seed", type=int, action="append", help="restrict seeds (repeatable)")

    common(sub.add_parser("train", help="training stage for one scenario and seed"), True)
    ex = sub.add_parser("execute", help="execution stage from a trained checkpoint")
    common(ex, True)
    ex.add_argument("--checkpoint", type=Path, help="checkpoint directory (default: under --out)")
    ex.add_argument("--train-episodes", type=int,
                    help="training episode override used when the checkpoint was produced")
    sw = sub.add_parser("sweep", help="train and execute every configured scenario and seed")
    common(sw, False)
    sw.add_argument("--execute-episodes", type=int, help="override execution episodes")
    sw.add_argument("--workers", type=int, default=1)
    rp = sub.add_parser("report", help="summary.csv from existing metrics.csv")
    rp.add_argument("--out", type=Path, default=Path("runs"))
    rp.add_argument("--config", type=Path, help="config supplying the convergence rule")
    return p


def _configure(args, stage: str | None):
    cfg = load_config(args.config)
    if args.method:
        cfg.method = args.method
    if stage and args.episodes is not None:
        setattr(cfg, stage, dataclasses.replace(getattr(cfg, stage), episodes=args.episodes))
    if getattr(args, "train_episodes", None) is not None:
        cfg.training = dataclasses.replace(cfg.training, episodes=args.train_episodes)
    if getattr(args, "execute_episodes", None) is not None:
        cfg.execution = dataclasses.replace(cfg.execution, episodes=args.execute_episodes)
    return cfg.validate()


def _pick(cfg, args):
    scenario = args.scenario if args.scenario is not None else int(cfg.scenarios[0])
    seed = args.seed if args.seed is not None else int(cfg.seeds[0])
    return scenario, seed


def _print_summary(path: Path) -> None:
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            flag = " (single seed)" if row["degenerate"] == "1" else ""
            print(f"{row['stage']:8s} {row['method']:10s} n={row['scenario']:>3s} "
                  f"{row['metric']:20s} {float(row['mean']):.6g} "
                  f"[{float(row['ci_low']):.6g}, {float(row['ci_high']):.6g}]{flag}")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    out = args.out
    if args.command == "report":
        cfg = load_config(args.config)
        conv = (cfg.convergence.window, cfg.convergence.tail, cfg.convergence.tol)
        records = []
        for name in ("metrics.csv", "execution_metrics.csv"):
            if (out / name).exists():
                records += read_metrics(out / name)
        if not records:
            print(f"error: no metrics.csv under {out}", file=sys.stderr)
            return 2
        # sweep output already holds both stages in metrics.csv
        if (out / "execution_metrics.csv").exists():
            write_metrics(records, out / "combined_metrics.csv")
        _, summary = export_metrics(records, out, convergence=conv)
        _print_summary(summary)
        return 0

    stage = {"train": "training", "execute": "execution", "sweep": "training"}[args.command]
    cfg = _configure(args, stage)
    out.mkdir(parents=True, exist_ok=True)
    if args.command == "sweep":
        if args.scenario:
            cfg.scenarios = args.scenario
        if args.seed:
            cfg.seeds = args.seed
        dump_config(cfg, out / "config.yaml")
        sweep(cfg, out, args.workers)
        _print_summary(out / "summary.csv")
        return 0

    scenario, seed = _pick(cfg, args)
    if args.command == "train":
        res = run_training(cfg, scenario, seed, out)
        dump_config(cfg, out / "config.yaml")
        write_metrics(res.records, out / "metrics.csv")
        write_timings([("train", cfg.method, scenario, seed, f"{res.wall_clock_s:.3f}")],
                      out / "timings.csv")
        if res.checkpoint is not None:
            print(f"checkpoint: {res.checkpoint}")
    else:
        ckpt = args.checkpoint
        if ckpt is None and cfg.method != "fixed-cio":
            ckpt = checkpoint_dir(out, cfg, scenario, seed)
        try:
            res = run_execution(cfg, scenario, seed, ckpt)
        except (FileNotFoundError, ValueError) as err:
            print(f"error: {err}", file=sys.stderr)
            return 2
        write_metrics(res.records, out / "execution_metrics.csv")
        write_timings([("execute", cfg.method, scenario, seed, f"{res.wall_clock_s:.3f}")],
                      out / "execution_timings.csv")
    print(f"metrics: {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
