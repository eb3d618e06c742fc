from __future__ import annotations

import logging
import math
from typing import Any, Dict, Optional

from src.common.api import check_entry
from src.fw import Trajectory

log = logging.getLogger(__name__)

RATE_SLACK = 1e-9


class AnalysisError(ValueError):
    pass


def rate_bound(strategy: str, L: float, diam: float, t: int) -> float:
    if t < 1:
        raise AnalysisError("bounds start at t = 1")
    if not (L > 0 and diam > 0):
        raise AnalysisError("rate bound needs L > 0 and diam > 0")
    d2 = diam * diam
    if strategy == "open1":
        return L * d2 * (1.0 + math.log(t)) / (2.0 * t)
    if strategy == "open2":
        return 2.0 * L * d2 / (t + 2)
    if strategy in ("closed", "linesearch"):
        return 4.0 * L * d2 / (t + 2)
    raise AnalysisError(f"no rate bound for strategy {strategy!r}")


def check_rates(
    traj: Trajectory,
    L: float,
    diam: float,
    f_min: float = 0.0,
    strategy: Optional[str] = None,
) -> Dict[str, Any]:
    if not traj.points:
        raise AnalysisError("empty trajectory")
    kind = strategy or str(traj.meta.get("strategy", {}).get("kind", ""))
    worst = 0.0
    for p in traj.points[1:]:
        # L = 0 means f is affine on C; nothing above f_min is allowed
        bound = rate_bound(kind, L, diam, p.t) if L > 0 else 0.0
        excess = p.f - f_min
        if excess > bound * (1.0 + RATE_SLACK):
            log.info("rate bound violated at t=%d: %.6g > %.6g", p.t, excess, bound)
            return check_entry("rates", False, strategy=kind, t=p.t, excess=excess, bound=bound)
        if bound > 0:
            worst = max(worst, excess / bound)
    return check_entry("rates", True, strategy=kind, L=L, diam=diam, worst_fraction=worst)
