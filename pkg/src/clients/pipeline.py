from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Optional

from src.analysis import Certificate, certify
from src.common.config import AppConfig
from src.common.protocol import write_json
from src.counterexamples import Instance, canonical_name, generate, strategy_allowed
from src.fw import Trajectory, run_fw
from src.sketch import Objective, lipschitz_estimate

log = logging.getLogger(__name__)


class StrategyMismatch(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """One `fwlab run` job. `L=None` means estimate it from the objective."""

    ce: str
    out: Path
    strategy: Optional[str] = None
    depth: int = 40
    K: int = 2
    iterations: int = 2000
    L: Optional[float] = None
    r_scale: float = 1e-4
    eta0: float = 1.0
    seed: int = 0
    force: bool = False
    linesearch_tol: float = 1e-12
    lipschitz_samples: int = 2000
    lipschitz_factor: float = 2.0

    @staticmethod
    def from_app(cfg: AppConfig, ce: str, out: Optional[Path] = None, **overrides: Any) -> "RunConfig":
        """Config defaults, then non-None overrides (CLI flags win)."""
        base: Dict[str, Any] = {
            "ce": ce,
            "out": out if out is not None else cfg.output.dir / f"ce{canonical_name(ce)}",
            "depth": cfg.run.depth,
            "K": cfg.run.K,
            "iterations": cfg.run.iterations,
            "r_scale": cfg.run.r_scale,
            "eta0": cfg.run.eta0,
            "seed": cfg.run.seed,
            "linesearch_tol": cfg.solver.linesearch_tol,
            "lipschitz_samples": cfg.solver.lipschitz_samples,
            "lipschitz_factor": cfg.solver.lipschitz_factor,
        }
        base.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig(**base)

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["out"] = str(self.out)
        return d


@dataclass(frozen=True)
class RunOutcome:
    ce: str
    out: str
    passed: bool
    verdict: str
    seconds: float
    summary: str
    error: Optional[str] = None


def check_strategy(rc: RunConfig) -> Optional[str]:
    """Strategy the run will use; raises StrategyMismatch unless forced."""
    if rc.strategy is None or strategy_allowed(rc.ce, rc.strategy):
        return rc.strategy
    msg = f"strategy {rc.strategy!r} is not the one instance {rc.ce!r} is built for"
    if not rc.force:
        raise StrategyMismatch(msg + " (use --force)")
    log.warning("%s; forced", msg)
    return rc.strategy


def _estimate_L(rc: RunConfig, instance: Instance, obj: Objective) -> float:
    if instance.objective_kind == "zero":
        return 0.0
    L_hat = lipschitz_estimate(obj, instance.C, rc.lipschitz_samples, rc.seed)
    log.info("%s: sampled L=%.6g, using %.6g", instance.name, L_hat, rc.lipschitz_factor * L_hat)
    return rc.lipschitz_factor * L_hat


def resolve_L(rc: RunConfig, instance: Instance, obj: Objective) -> float:
    if rc.L is not None:
        return rc.L
    if instance.L is not None:
        return instance.L
    return _estimate_L(rc, instance, obj)


def execute(rc: RunConfig) -> Dict[str, Any]:
    """Generate, run and certify one instance and write its run directory.

    Returns a plain dict so process pools can ship it back.
    """
    t0 = time.perf_counter()
    kind = check_strategy(rc)
    instance = generate(rc.ce, rc.depth, rc.K, kind)
    kind = kind or instance.strategy
    obj = instance.make_objective(rc.r_scale, rc.eta0)
    L = resolve_L(rc, instance, obj)
    if kind == "closed" and L <= 0:
        raise StrategyMismatch(f"closed-loop steps need L > 0, got {L}")
    strategy = instance.step_strategy(kind, L, rc.linesearch_tol)
    traj = run_fw(instance.C, obj, strategy, instance.oracle, instance.x0, rc.iterations)
    cert = certify(instance, traj, L, obj=obj)
    write_run(rc.out, instance, traj, cert, {**rc.to_dict(), "strategy": kind, "L": L})
    seconds = time.perf_counter() - t0
    log.info("%s: %s (%.3fs)", instance.name, "passed" if cert.passed else "FAILED", seconds)
    return asdict(RunOutcome(rc.ce, str(rc.out), cert.passed, cert.verdict, seconds, cert.summary()))


def write_run(out: Path, instance: Instance, traj: Trajectory, cert: Certificate, run: Dict[str, Any]) -> None:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    traj.write_jsonl(out / "traj.jsonl")
    traj.write_csv(out / "traj.csv")
    write_json(out / "cert.json", cert.to_dict())
    write_json(out / "instance.json", {**instance.to_dict(), "run": run})
    log.info("wrote %s", out)
