from __future__ import annotations

from src.fw.oracle import SPECIFIED, LmoPolicy, OracleError, doubling_blocks, lmo, minimizer_set
from src.fw.solver import FrankWolfeError, Trajectory, TrajectoryPoint, run_fw
from src.fw.steps import (
    StepError,
    StepStrategy,
    closed_loop_gamma,
    landing_residual,
    line_search,
    open_loop_gamma,
    step_size,
)

__all__ = [
    "FrankWolfeError",
    "LmoPolicy",
    "OracleError",
    "SPECIFIED",
    "StepError",
    "StepStrategy",
    "Trajectory",
    "TrajectoryPoint",
    "closed_loop_gamma",
    "doubling_blocks",
    "landing_residual",
    "line_search",
    "lmo",
    "minimizer_set",
    "open_loop_gamma",
    "run_fw",
    "step_size",
]
