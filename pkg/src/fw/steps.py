from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Optional

import numpy as np

from src.common.api import require_fields
from src.sketch import Objective

log = logging.getLogger(__name__)

KINDS = ("open1", "open2", "closed", "linesearch")

SLOPE_NOISE_REL = 1e-6
SLOPE_NOISE_ABS = 1e-10


class StepError(ValueError):
    pass


@dataclass(frozen=True)
class StepStrategy:
    kind: str
    L: Optional[float] = None
    tol: float = 1e-12

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise StepError(f"unknown step strategy {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.kind == "closed" and (self.L is None or not self.L > 0):
            raise StepError("closed-loop strategy needs L > 0")
        if self.kind == "linesearch" and not (0 < self.tol <= 1e-6):
            raise StepError("line-search tolerance must lie in (0, 1e-6]")

    @classmethod
    def open1(cls) -> "StepStrategy":
        return cls("open1")

    @classmethod
    def open2(cls) -> "StepStrategy":
        return cls("open2")

    @classmethod
    def closed(cls, L: float) -> "StepStrategy":
        return cls("closed", L=float(L))

    @classmethod
    def linesearch(cls, tol: float = 1e-12) -> "StepStrategy":
        return cls("linesearch", tol=float(tol))

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": self.kind}
        if self.kind == "closed":
            out["L"] = self.L
        if self.kind == "linesearch":
            out["tol"] = self.tol
        return out

    @staticmethod
    def from_any(data: Dict[str, Any]) -> "StepStrategy":
        require_fields(data, ["kind"])
        kind = str(data["kind"])
        if kind == "closed":
            require_fields(data, ["L"])
            return StepStrategy.closed(float(data["L"]))
        if kind == "linesearch":
            return StepStrategy.linesearch(float(data.get("tol", 1e-12)))
        return StepStrategy(kind)


def open_loop_gamma(kind: str, t: int) -> Fraction:
    if t < 0:
        raise StepError("iteration index must be >= 0")
    if kind == "open1":
        return Fraction(1, t + 1)
    if kind == "open2":
        return Fraction(2, t + 2)
    raise StepError(f"{kind} is not an open-loop strategy")


def closed_loop_gamma(L: float, x: np.ndarray, v: np.ndarray, grad: np.ndarray) -> float:
    d = x - v
    dd = float(d @ d)
    if dd == 0.0:
        raise StepError("degenerate direction")
    gap = max(0.0, float(d @ grad))
    return min(gap / (L * dd), 1.0)


def _slope(obj: Objective, x: np.ndarray, d: np.ndarray, gamma: float) -> float:
    return float(d @ obj.value_and_gradient(x + gamma * d).grad)


def line_search(obj: Objective, x: np.ndarray, v: np.ndarray, tol: float = 1e-12) -> float:
    """argmin over [0, 1] of f(x + γ(v − x)) by bisection on the directional derivative."""
    d = v - x
    if not np.any(d):
        return 0.0
    lo, hi = 0.0, 1.0
    s_lo, s_hi = _slope(obj, x, d, lo), _slope(obj, x, d, hi)
    if s_lo >= 0.0:
        return 0.0
    if s_hi <= 0.0:
        return 1.0
    # shell location is numeric, so slope reversals below this are float noise
    noise = SLOPE_NOISE_REL * (abs(s_lo) + abs(s_hi)) + SLOPE_NOISE_ABS
    steps = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        s = _slope(obj, x, d, mid)
        if s < s_lo - noise or s > s_hi + noise:
            raise StepError(
                f"objective not convex along segment (slope {s:.6g} outside [{s_lo:.6g}, {s_hi:.6g}] by more than {noise:.3g})"
            )
        if s < 0.0:
            lo, s_lo = mid, s
        elif s > 0.0:
            hi, s_hi = mid, s
        else:
            return mid
        steps += 1
    log.debug("line search: %d bisections, bracket [%.17g, %.17g]", steps, lo, hi)
    return 0.5 * (lo + hi)


def step_size(
    strategy: StepStrategy,
    t: int,
    x: np.ndarray,
    v: np.ndarray,
    grad: np.ndarray,
    obj: Optional[Objective] = None,
) -> float:
    if strategy.kind in ("open1", "open2"):
        return float(open_loop_gamma(strategy.kind, t))
    if strategy.kind == "closed":
        return closed_loop_gamma(float(strategy.L), x, v, grad)
    if obj is None:
        raise StepError("line search needs the objective")
    return line_search(obj, x, v, strategy.tol)


def landing_residual(obj: Objective, x: np.ndarray, v: np.ndarray, gamma: float) -> float:
    d = v - x
    n = float(np.hypot(d[0], d[1]))
    if n == 0.0:
        return 0.0
    return abs(_slope(obj, x, d, gamma)) / n
