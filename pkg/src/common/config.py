from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

DEPTH_ENV = "FWLAB_DEPTH_DEFAULT"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunDefaults:
    depth: int
    iterations: int
    r_scale: float
    eta0: float
    seed: int
    K: int


@dataclass(frozen=True)
class SolverConfig:
    linesearch_tol: float
    lipschitz_samples: int
    lipschitz_factor: float


@dataclass(frozen=True)
class OutputConfig:
    dir: Path


@dataclass(frozen=True)
class LoggingConfig:
    level: str


@dataclass(frozen=True)
class AppConfig:
    run: RunDefaults
    solver: SolverConfig
    output: OutputConfig
    logging: LoggingConfig


def _run_defaults(raw: Dict[str, Any]) -> RunDefaults:
    d = raw.get("run", {}) or {}
    return RunDefaults(
        depth=int(d.get("depth", 40)),
        iterations=int(d.get("iterations", 2000)),
        r_scale=float(d.get("r_scale", 1e-4)),
        eta0=float(d.get("eta0", 1.0)),
        seed=int(d.get("seed", 0)),
        K=int(d.get("K", 2)),
    )


def _solver(raw: Dict[str, Any]) -> SolverConfig:
    d = raw.get("solver", {}) or {}
    return SolverConfig(
        linesearch_tol=float(d.get("linesearch_tol", 1e-12)),
        lipschitz_samples=int(d.get("lipschitz_samples", 2000)),
        lipschitz_factor=float(d.get("lipschitz_factor", 2.0)),
    )


def _check(cfg: AppConfig) -> AppConfig:
    if cfg.run.depth < 2:
        raise ConfigError(f"run.depth must be >= 2, got {cfg.run.depth}")
    if cfg.run.iterations < 1:
        raise ConfigError(f"run.iterations must be >= 1, got {cfg.run.iterations}")
    if cfg.run.r_scale < 0:
        raise ConfigError("run.r_scale must be >= 0")
    if cfg.run.eta0 <= 0:
        raise ConfigError("run.eta0 must be > 0")
    if not (0 < cfg.solver.linesearch_tol <= 1e-6):
        raise ConfigError("solver.linesearch_tol must lie in (0, 1e-6]")
    if cfg.solver.lipschitz_samples < 100:
        raise ConfigError("solver.lipschitz_samples must be >= 100")
    if cfg.solver.lipschitz_factor <= 1:
        raise ConfigError("solver.lipschitz_factor must be > 1")
    return cfg


def apply_env(cfg: AppConfig, environ: Optional[Dict[str, str]] = None) -> AppConfig:
    env = os.environ if environ is None else environ
    raw = env.get(DEPTH_ENV)
    if raw is None or raw.strip() == "":
        return cfg
    try:
        depth = int(raw)
    except ValueError as e:
        raise ConfigError(f"{DEPTH_ENV} must be an integer, got {raw!r}") from e
    if depth < 2:
        raise ConfigError(f"{DEPTH_ENV} must be >= 2, got {depth}")
    return replace(cfg, run=replace(cfg.run, depth=depth))


def load_config(path: str | Path | None = None, environ: Optional[Dict[str, str]] = None) -> AppConfig:
    raw: Dict[str, Any] = {}
    if path is not None:
        p = Path(path)
        try:
            raw = yaml.safe_load(p.read_text(encoding="utf-8")) or {}
        except FileNotFoundError as e:
            raise ConfigError(f"config file not found: {p}") from e
        except yaml.YAMLError as e:
            raise ConfigError(f"invalid YAML in {p}: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError(f"config root must be a mapping: {p}")

    output_raw = raw.get("output", {}) or {}
    logging_raw = raw.get("logging", {}) or {}

    cfg = AppConfig(
        run=_run_defaults(raw),
        solver=_solver(raw),
        output=OutputConfig(dir=Path(output_raw.get("dir", "./runs"))),
        logging=LoggingConfig(level=str(logging_raw.get("level", "INFO"))),
    )
    return _check(apply_env(cfg, environ))
