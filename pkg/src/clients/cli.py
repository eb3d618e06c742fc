from __future__ import annotations

import argparse
import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from src.analysis import check_rates
from src.clients.bench.runner import print_outcomes, run_batch
from src.clients.pipeline import RunConfig, StrategyMismatch, check_strategy, execute
from src.clients.report import write_report
from src.common.config import AppConfig, load_config
from src.common.logging import setup_logging
from src.common.protocol import FormatError, encode_record, render_scalar
from src.counterexamples import NAMES, generate, reference_trajectory
from src.fw import Trajectory
from src.sketch import validate_sketch

log = logging.getLogger(__name__)

STRATEGIES = ("open1", "open2", "closed", "linesearch")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _L_value(raw: str) -> Optional[float]:
    if raw == "auto":
        return None
    try:
        v = float(raw)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected 'auto' or a number, got {raw!r}") from e
    if v <= 0:
        raise argparse.ArgumentTypeError("L must be > 0")
    return v


def _positive(raw: str) -> int:
    v = int(raw)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {raw}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fwlab", description="Frank-Wolfe non-convergence lab")
    ap.add_argument("--config", default=None, help="YAML config (defaults built in)")
    ap.add_argument("--log-level", default=None)
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="generate, run and certify instances")
    run.add_argument("--ce", action="append", choices=NAMES, required=True)
    run.add_argument("--strategy", choices=STRATEGIES, default=None)
    run.add_argument("--force", action="store_true", help="allow a strategy the instance is not built for")
    run.add_argument("--depth", type=_positive, default=None)
    run.add_argument("--K", type=_positive, default=None)
    run.add_argument("--iters", type=_positive, default=None)
    run.add_argument("--L", type=_L_value, default=None, help="'auto' or a value")
    run.add_argument("--r-scale", type=float, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--out", default=None)
    run.add_argument("--jobs", type=_positive, default=1)

    ref = sub.add_parser("reference", help="print exact reference iterates as JSONL")
    ref.add_argument("--ce", choices=NAMES, required=True)
    ref.add_argument("--iters", type=int, default=None)
    ref.add_argument("--depth", type=_positive, default=None)
    ref.add_argument("--strategy", choices=("open1", "open2"), default=None)

    val = sub.add_parser("validate", help="check the sketch hypotheses of an instance")
    val.add_argument("--ce", choices=NAMES, required=True)
    val.add_argument("--depth", type=_positive, default=None)
    val.add_argument("--K", type=_positive, default=None)
    val.add_argument("--strategy", choices=("open1", "open2"), default=None)

    rates = sub.add_parser("rates", help="check a trajectory against its worst-case rate")
    rates.add_argument("--traj", required=True)
    rates.add_argument("--L", type=float, required=True)
    rates.add_argument("--diam", type=float, required=True)
    rates.add_argument("--f-min", type=float, default=0.0)
    rates.add_argument("--strategy", choices=STRATEGIES, required=True)

    rep = sub.add_parser("report", help="write figure.svg and rates.csv for run directories")
    rep.add_argument("paths", nargs="+")
    return ap


def _run_configs(cfg: AppConfig, args: argparse.Namespace) -> List[RunConfig]:
    out: List[RunConfig] = []
    for ce in args.ce:
        if args.out is None:
            path = None
        elif len(args.ce) == 1:
            path = Path(args.out)
        else:
            path = Path(args.out) / f"ce{ce}"
        out.append(
            RunConfig.from_app(
                cfg,
                ce,
                path,
                strategy=args.strategy,
                force=args.force,
                depth=args.depth,
                K=args.K,
                iterations=args.iters,
                L=args.L,
                r_scale=args.r_scale,
                seed=args.seed,
            )
        )
    return out


def cmd_run(cfg: AppConfig, args: argparse.Namespace, ap: argparse.ArgumentParser) -> int:
    configs = _run_configs(cfg, args)
    try:
        for rc in configs:
            check_strategy(rc)
    except StrategyMismatch as e:
        ap.error(str(e))
    if len(configs) == 1 and args.jobs == 1:
        outcomes = [execute(configs[0])]
    else:
        outcomes = asyncio.run(run_batch(configs, args.jobs))
    print_outcomes(outcomes)
    return EXIT_OK if all(o["passed"] for o in outcomes) else EXIT_FAIL


def cmd_reference(cfg: AppConfig, args: argparse.Namespace) -> int:
    instance = generate(args.ce, args.depth or cfg.run.depth, cfg.run.K, args.strategy)
    T = args.iters if args.iters is not None else cfg.run.iterations
    for t, x in enumerate(reference_trajectory(instance, T)):
        rec = {
            "t": t,
            "x": [render_scalar(x.x), render_scalar(x.y)],
            "x_float": [float(x.x), float(x.y)],
        }
        print(encode_record(rec))
    return EXIT_OK


def cmd_validate(cfg: AppConfig, args: argparse.Namespace) -> int:
    instance = generate(args.ce, args.depth or cfg.run.depth, args.K or cfg.run.K, args.strategy)
    if instance.spec is None:
        raise ValueError(f"instance {instance.name} has no sketch to validate")
    report = validate_sketch(instance.spec)
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_rates(args: argparse.Namespace) -> int:
    traj = Trajectory.read_jsonl(args.traj)
    entry = check_rates(traj, args.L, args.diam, args.f_min, args.strategy)
    print(json.dumps(entry, indent=2))
    return EXIT_OK if entry["passed"] else EXIT_FAIL


def cmd_report(args: argparse.Namespace) -> int:
    for path in args.paths:
        try:
            svg, csv = write_report(path)
        except FormatError as e:
            print(f"fwlab: error: {e}", file=sys.stderr)
            return EXIT_USAGE
        print(f"{svg}\n{csv}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config)
        setup_logging(args.log_level or cfg.logging.level)
        if args.command == "run":
            return cmd_run(cfg, args, ap)
        if args.command == "reference":
            return cmd_reference(cfg, args)
        if args.command == "validate":
            return cmd_validate(cfg, args)
        if args.command == "rates":
            return cmd_rates(args)
        return cmd_report(args)
    except (ValueError, FormatError) as e:
        log.debug("command failed", exc_info=True)
        print(f"fwlab: error: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
