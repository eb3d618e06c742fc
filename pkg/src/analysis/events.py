from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np

from src.analysis.rates import AnalysisError
from src.common.protocol import Scalar
from src.counterexamples import DISPLACEMENT_THRESHOLD, Ce3Strips
from src.fw import Trajectory
from src.geom2d import Vec2

log = logging.getLogger(__name__)

Points = Union[Trajectory, Sequence[Vec2], np.ndarray]


def as_points(points: Points) -> np.ndarray:
    if isinstance(points, Trajectory):
        return points.xs()
    if isinstance(points, np.ndarray):
        return points.reshape(-1, 2).astype(float)
    return np.array([v.to_tuple() for v in points], dtype=float).reshape(-1, 2)


@dataclass
class NonCauchy:
    events: List[Tuple[int, int, float]] = field(default_factory=list)
    starts: int = 0
    epsilon: float = 0.0
    window: int = 1

    @property
    def covers_all(self) -> bool:
        return self.starts > 0 and len(self.events) == self.starts

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "window": self.window,
            "starts": self.starts,
            "covers_all": self.covers_all,
            "events": [list(e) for e in self.events],
        }


def non_cauchy_certificate(points: Points, epsilon: float, window: int) -> NonCauchy:
    """For each start t, the farthest x_t' with t < t' <= t + window; an event when it is >= epsilon."""
    if not epsilon > 0:
        raise AnalysisError("epsilon must be > 0")
    xs = as_points(points)
    T = len(xs) - 1
    if window < 1 or window > T:
        raise AnalysisError(f"window {window} larger than trajectory (horizon {T})")
    n = T - window + 1
    best = np.zeros(n)
    arg = np.zeros(n, dtype=int)
    for d in range(1, window + 1):
        diff = xs[d : d + n] - xs[:n]
        dist = np.hypot(diff[:, 0], diff[:, 1])
        better = dist > best
        best = np.where(better, dist, best)
        arg = np.where(better, d, arg)
    events = [(t, t + int(arg[t]), float(best[t])) for t in range(n) if best[t] >= epsilon]
    return NonCauchy(events, n, float(epsilon), window)


def band_crossings(points: Union[Trajectory, Sequence[Vec2]], half_width: Scalar = Fraction(1, 4)) -> Tuple[int, int]:
    if isinstance(points, Trajectory):
        xs = points.xs()[:, 0]
        w = float(half_width)
        return int(np.count_nonzero(xs <= -w)), int(np.count_nonzero(xs >= w))
    left = sum(1 for v in points if v.x <= -half_width)
    right = sum(1 for v in points if v.x >= half_width)
    return left, right


@dataclass
class Displacements:
    threshold: float
    events: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def count(self) -> int:
        return sum(1 for e in self.events if e["displacement"] >= self.threshold)

    @property
    def first_level(self) -> int:
        return self.events[0]["k"] if self.events else -1

    def to_dict(self) -> Dict[str, Any]:
        return {"threshold": self.threshold, "count": self.count, "first_level": self.first_level, "events": self.events}


def in_box(xs: np.ndarray, lo: Tuple[float, float], hi: Tuple[float, float], tol: float = 1e-12) -> np.ndarray:
    return (
        (xs[:, 0] >= lo[0] - tol)
        & (xs[:, 0] <= hi[0] + tol)
        & (xs[:, 1] >= lo[1] - tol)
        & (xs[:, 1] <= hi[1] + tol)
    )


def strip_box(a: Vec2, b: Vec2) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    (ax, ay), (bx, by) = a.to_tuple(), b.to_tuple()
    return (min(ax, bx), min(ay, by)), (max(ax, bx), max(ay, by))


def displacement_events(points: Points, strips: Ce3Strips, threshold: Scalar = DISPLACEMENT_THRESHOLD) -> Displacements:
    """Horizontal drift toward the oracle side between entering a strip and dropping below its H."""
    xs = as_points(points)
    out = Displacements(float(threshold))
    for s in strips.levels:
        lo, hi = strip_box(s.E, s.J)
        inside = np.flatnonzero(in_box(xs, lo, hi))
        if inside.size == 0:
            continue
        t0 = int(inside[0])
        below = np.flatnonzero(xs[t0:, 1] < float(s.H.y))
        t1 = t0 + int(below[0]) if below.size else len(xs) - 1
        heading = float(s.target.x)
        drift = heading * (xs[t0 : t1 + 1, 0] - xs[t0, 0])
        out.events.append(
            {"k": s.k, "t_enter": t0, "t_exit": t1, "displacement": float(drift.max()), "closed": bool(below.size)}
        )
    log.debug("displacements: %d strips visited, %d above %.4g", len(out.events), out.count, out.threshold)
    return out
