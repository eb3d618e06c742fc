from __future__ import annotations

import argparse
import asyncio
import logging
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from src.clients.pipeline import RunConfig, execute
from src.common.config import load_config
from src.common.logging import setup_logging
from src.counterexamples import NAMES

log = logging.getLogger(__name__)

# ----------------------------
# Batch runner
# ----------------------------
#
# - independent instances run in worker processes, one job each
# - each run: the listed instances, timed end to end
#


@dataclass
class Stats:
    durations: List[float] = field(default_factory=list)
    ok: int = 0
    err: int = 0

    def add(self, dt: float, ok: bool) -> None:
        self.durations.append(dt)
        if ok:
            self.ok += 1
        else:
            self.err += 1

    @property
    def count(self) -> int:
        return len(self.durations)

    @property
    def avg(self) -> float:
        return statistics.fmean(self.durations) if self.durations else 0.0

    @property
    def p50(self) -> float:
        return statistics.median(self.durations) if self.durations else 0.0

    @property
    def p95(self) -> float:
        if not self.durations:
            return 0.0
        xs = sorted(self.durations)
        return xs[int(0.95 * (len(xs) - 1))]


def _failed(rc: RunConfig, e: BaseException) -> Dict[str, Any]:
    return {
        "ce": rc.ce,
        "out": str(rc.out),
        "passed": False,
        "verdict": "error",
        "seconds": 0.0,
        "summary": f"ce{rc.ce}: error: {e}",
        "error": str(e),
    }


async def run_batch(configs: Sequence[RunConfig], jobs: int = 1) -> List[Dict[str, Any]]:
    """Run every config in a process pool; results keep the input order."""
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=min(jobs, max(1, len(configs)))) as pool:
        tasks = [loop.run_in_executor(pool, execute, rc) for rc in configs]
        results = await asyncio.gather(*tasks, return_exceptions=True)
    out: List[Dict[str, Any]] = []
    for rc, r in zip(configs, results):
        if isinstance(r, BaseException):
            log.error("ce%s failed: %s", rc.ce, r)
            out.append(_failed(rc, r))
        else:
            out.append(r)
    return out


async def run_one(configs: Sequence[RunConfig], jobs: int) -> tuple[float, Stats, List[Dict[str, Any]]]:
    """Returns: (wall_seconds, per-instance stats, outcomes)"""
    t0 = time.perf_counter()
    outcomes = await run_batch(configs, jobs)
    wall = time.perf_counter() - t0
    stats = Stats()
    for o in outcomes:
        stats.add(float(o["seconds"]), bool(o["passed"]))
    return wall, stats, outcomes


def print_outcomes(outcomes: Sequence[Dict[str, Any]]) -> None:
    for o in outcomes:
        print(o["summary"])


def main(argv: Optional[Sequence[str]] = None) -> None:
    ap = argparse.ArgumentParser(description="time batches of instance runs")
    ap.add_argument("--config", default=None)
    ap.add_argument("--ce", action="append", choices=NAMES, default=None)
    ap.add_argument("--jobs", type=int, default=2)
    ap.add_argument("--runs", type=int, default=3)
    ap.add_argument("--iters", type=int, default=None)
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    cfg = load_config(args.config)
    setup_logging(cfg.logging.level)
    names = args.ce or list(NAMES)
    root = Path(args.out) if args.out else cfg.output.dir / "bench"
    configs = [RunConfig.from_app(cfg, ce, root / f"ce{ce}", iterations=args.iters) for ce in names]

    async def run_all():
        walls: List[float] = []
        for r in range(args.runs):
            batch = [replace(rc, out=rc.out / f"run{r}") for rc in configs]
            wall, st, outcomes = await run_one(batch, args.jobs)
            walls.append(wall)
            print(
                f"run {r+1}/{args.runs}: wall={wall:.3f}s avg_instance={st.avg:.3f}s "
                f"p50={st.p50:.3f}s p95={st.p95:.3f}s passed={st.ok}/{st.count}"
            )
            if r == args.runs - 1:
                print_outcomes(outcomes)

        print("\n=== Batch timing ===")
        print(f"instances={','.join(names)} jobs={args.jobs}")
        print(f"average_wall_over_{args.runs}_runs={statistics.fmean(walls) if walls else 0.0:.3f}s")

    asyncio.run(run_all())


if __name__ == "__main__":
    main()
