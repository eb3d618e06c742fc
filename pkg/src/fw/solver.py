from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np

from src.common.api import require_fields
from src.common.protocol import FormatError, read_jsonl, write_csv, write_jsonl
from src.fw.oracle import SPECIFIED, LmoPolicy, lmo
from src.fw.steps import StepError, StepStrategy, step_size
from src.geom2d import ConvexPolygon, Vec2
from src.sketch import Objective

log = logging.getLogger(__name__)

COLUMNS = ["t", "x", "v", "gamma", "f", "gap"]


class FrankWolfeError(ValueError):
    def __init__(self, message: str, t: Optional[int] = None):
        super().__init__(message)
        self.t = t


@dataclass(frozen=True)
class TrajectoryPoint:
    t: int
    x: Vec2
    v: Vec2
    gamma: Optional[float]
    f: float
    gap: float

    def to_record(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "x": [float(self.x.x), float(self.x.y)],
            "v": [float(self.v.x), float(self.v.y)],
            "gamma": self.gamma,
            "f": self.f,
            "gap": self.gap,
        }

    @staticmethod
    def from_record(rec: Dict[str, Any]) -> "TrajectoryPoint":
        require_fields(rec, COLUMNS)
        gamma = rec["gamma"]
        return TrajectoryPoint(
            t=int(rec["t"]),
            x=Vec2(float(rec["x"][0]), float(rec["x"][1])),
            v=Vec2(float(rec["v"][0]), float(rec["v"][1])),
            gamma=None if gamma is None else float(gamma),
            f=float(rec["f"]),
            gap=float(rec["gap"]),
        )


@dataclass
class Trajectory:
    points: List[TrajectoryPoint] = field(default_factory=list)
    meta: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def horizon(self) -> int:
        """Number of steps taken (records minus one)."""
        return max(0, len(self.points) - 1)

    def xs(self) -> np.ndarray:
        return np.array([[float(p.x.x), float(p.x.y)] for p in self.points], dtype=float).reshape(-1, 2)

    def vs(self) -> np.ndarray:
        return np.array([[float(p.v.x), float(p.v.y)] for p in self.points], dtype=float).reshape(-1, 2)

    def gammas(self) -> np.ndarray:
        return np.array([p.gamma for p in self.points if p.gamma is not None], dtype=float)

    def values(self) -> np.ndarray:
        return np.array([p.f for p in self.points], dtype=float)

    def gaps(self) -> np.ndarray:
        return np.array([p.gap for p in self.points], dtype=float)

    def records(self) -> List[Dict[str, Any]]:
        return [p.to_record() for p in self.points]

    def write_jsonl(self, path: str | Path) -> int:
        return write_jsonl(path, self.records())

    def write_csv(self, path: str | Path) -> None:
        write_csv(path, self.records(), COLUMNS)

    @staticmethod
    def from_records(records: Iterable[Dict[str, Any]], meta: Optional[Dict[str, Any]] = None) -> "Trajectory":
        try:
            pts = [TrajectoryPoint.from_record(r) for r in records]
        except (ValueError, TypeError, IndexError) as e:
            raise FormatError(f"invalid trajectory record: {e}") from e
        return Trajectory(pts, dict(meta or {}))

    @staticmethod
    def read_jsonl(path: str | Path) -> "Trajectory":
        traj = Trajectory.from_records(read_jsonl(path), {"source": str(path)})
        if not traj.points:
            raise FormatError(f"empty trajectory: {path}")
        return traj


def run_fw(
    c: ConvexPolygon,
    obj: Objective,
    strategy: StepStrategy,
    policy: LmoPolicy = SPECIFIED,
    x0: Optional[Vec2] = None,
    T: int = 100,
) -> Trajectory:
    """T steps of x_{t+1} = (1 − γ_t)x_t + γ_t v_t; T + 1 records, the last without γ."""
    if T < 0:
        raise FrankWolfeError("iteration count must be >= 0")
    start = x0 if x0 is not None else c.vertex(0)
    if not c.contains(start, tol=1e-12):
        raise FrankWolfeError(f"start point {start.to_tuple()} is not in the constraint set")

    x = start.to_array()
    previous: Optional[Vec2] = None
    points: List[TrajectoryPoint] = []
    t0 = time.perf_counter()
    log.info("run start: strategy=%s oracle=%s T=%d", strategy.kind, policy.mode, T)
    for t in range(T + 1):
        try:
            ev = obj.value_and_gradient(x)
        except ValueError as e:
            raise FrankWolfeError(f"objective evaluation failed at t={t}: {e}", t) from e
        g = ev.grad
        v_vec = lmo(c, ev.g, policy, t, previous)
        v = v_vec.to_array()
        gap = float((x - v) @ g)
        xv = Vec2(float(x[0]), float(x[1]))
        vv = Vec2(float(v[0]), float(v[1]))
        if t == T:
            points.append(TrajectoryPoint(t, xv, vv, None, ev.f, gap))
            break
        try:
            gamma = step_size(strategy, t, x, v, g, obj)
        except StepError:
            raise
        except ValueError as e:
            raise FrankWolfeError(f"objective evaluation failed at t={t}: {e}", t) from e
        points.append(TrajectoryPoint(t, xv, vv, gamma, ev.f, gap))
        x = (1.0 - gamma) * x + gamma * v
        previous = v_vec
    log.info("run finish: %d records in %.3fs, f_T=%.6g", len(points), time.perf_counter() - t0, points[-1].f)
    meta = {
        "C": c.to_dict(),
        "strategy": strategy.to_dict(),
        "oracle": policy.to_dict(),
        "x0": start.to_json(),
        "T": T,
    }
    return Trajectory(points, meta)
