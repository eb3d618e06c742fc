from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.analysis import AnalysisError, rate_bound
from src.common.api import require_fields
from src.common.protocol import FormatError, read_json, write_csv
from src.fw import Trajectory
from src.geom2d import ConvexPolygon, GeometryError

log = logging.getLogger(__name__)

WIDTH, HEIGHT, MARGIN = 800, 600, 30
MAX_LEVELS = 12
MAX_ARROWS = 400
RATE_COLUMNS = ["t", "primal_gap", "fw_gap", "bound", "log10_t", "log10_primal_gap", "log10_bound"]

Point = Tuple[float, float]


@dataclass
class RunDir:
    path: Path
    instance: Dict[str, Any]
    traj: Trajectory

    @property
    def name(self) -> str:
        return str(self.instance.get("name", self.path.name))

    @property
    def run(self) -> Dict[str, Any]:
        return self.instance.get("run", {}) or {}


def load_run(path: str | Path) -> RunDir:
    p = Path(path)
    if not p.is_dir():
        raise FormatError(f"not a run directory: {p}")
    instance = read_json(p / "instance.json")
    if not isinstance(instance, dict):
        raise FormatError(f"{p / 'instance.json'}: expected an object")
    try:
        require_fields(instance, ["name", "C", "solution_set"])
    except ValueError as e:
        raise FormatError(f"{p / 'instance.json'}: {e}") from e
    return RunDir(p, instance, Trajectory.read_jsonl(p / "traj.jsonl"))


def _polygon(data: Dict[str, Any]) -> ConvexPolygon:
    try:
        return ConvexPolygon.from_dict(data).to_float()
    except (ValueError, GeometryError) as e:
        raise FormatError(f"invalid polygon: {e}") from e


# svg elements are drawn in world coordinates inside one flipped group


def _pts(points: Sequence[Point]) -> str:
    return " ".join(f"{x:.9g},{y:.9g}" for x, y in points)


def svg_polygon(points: Sequence[Point], stroke: str, fill: str = "none", cls: str = "", dash: str = "") -> str:
    attrs = [
        f'class="{cls}"',
        f'points="{_pts(points)}"',
        f'fill="{fill}"',
        f'stroke="{stroke}"',
        'stroke-width="1"',
        'vector-effect="non-scaling-stroke"',
    ]
    if dash:
        attrs.append(f'stroke-dasharray="{dash}"')
    tag = "polygon" if len(points) > 2 else "polyline"
    return f"<{tag} {' '.join(attrs)}/>"


def svg_arrow(a: Point, b: Point, t: int) -> str:
    return (
        f'<line class="step" data-t="{t}" x1="{a[0]:.9g}" y1="{a[1]:.9g}" x2="{b[0]:.9g}" y2="{b[1]:.9g}" '
        'stroke="#c0392b" stroke-width="1" vector-effect="non-scaling-stroke" marker-end="url(#head)"/>'
    )


def combine_svg(elements: Sequence[str], frame: Tuple[float, float, float, float], title: str) -> str:
    """Wrap world-coordinate elements in a group mapping `frame` onto the canvas, y up."""
    x0, y0, x1, y1 = frame
    s = min((WIDTH - 2 * MARGIN) / max(x1 - x0, 1e-12), (HEIGHT - 2 * MARGIN) / max(y1 - y0, 1e-12))
    tx = MARGIN - s * x0
    ty = HEIGHT - MARGIN + s * y0
    body = "\n".join(elements)
    return (
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">\n'
        f"<title>{title}</title>\n"
        '<defs><marker id="head" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" markerHeight="6" '
        'orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#c0392b"/></marker></defs>\n'
        f'<g id="world" transform="matrix({s:.9g} 0 0 {-s:.9g} {tx:.9g} {ty:.9g})">\n'
        f"{body}\n"
        "</g>\n"
        "</svg>\n"
    )


def _frame(groups: Sequence[np.ndarray]) -> Tuple[float, float, float, float]:
    allp = np.vstack([g for g in groups if g.size])
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    pad = 0.05 * float(max(hi - lo))
    return float(lo[0] - pad), float(lo[1] - pad), float(hi[0] + pad), float(hi[1] + pad)


def render_svg(run: RunDir) -> str:
    C = _polygon(run.instance["C"])
    solution = _polygon(run.instance["solution_set"])
    spec = run.instance.get("spec") or {}
    levels = [_polygon(p) for p in (spec.get("polytopes") or [])[:MAX_LEVELS]]
    xs = run.traj.xs()

    elements = [svg_polygon(p.as_array().tolist(), "#95a5a6", cls="level", dash="4 3") for p in levels]
    elements.append(svg_polygon(C.as_array().tolist(), "#2c3e50", fill="#ecf0f1", cls="constraint"))
    elements.append(svg_polygon(solution.as_array().tolist(), "#27ae60", cls="solution"))
    n = min(len(xs) - 1, MAX_ARROWS)
    elements += [svg_arrow(tuple(xs[t]), tuple(xs[t + 1]), t) for t in range(n)]

    frame = _frame([C.as_array(), solution.as_array(), xs[: n + 1]] + [p.as_array() for p in levels[:1]])
    return combine_svg(elements, frame, f"{run.name}: {run.traj.horizon} steps")


def _log10(v: float) -> Optional[float]:
    return math.log10(v) if v > 0 else None


def rate_rows(run: RunDir) -> List[Dict[str, Any]]:
    """Primal gap, FW gap and the strategy's worst-case bound for t >= 1."""
    strategy = str(run.run.get("strategy") or run.instance.get("strategy", ""))
    L = float(run.run.get("L") or 0.0)
    diam = _polygon(run.instance["C"]).diameter()
    rows: List[Dict[str, Any]] = []
    for p in run.traj.points[1:]:
        try:
            bound: Optional[float] = rate_bound(strategy, L, diam, p.t)
        except AnalysisError:
            bound = None
        rows.append(
            {
                "t": p.t,
                "primal_gap": p.f,
                "fw_gap": p.gap,
                "bound": bound,
                "log10_t": math.log10(p.t),
                "log10_primal_gap": _log10(p.f),
                "log10_bound": _log10(bound) if bound is not None else None,
            }
        )
    return rows


def write_report(path: str | Path) -> Tuple[Path, Path]:
    run = load_run(path)
    svg = run.path / "figure.svg"
    svg.write_text(render_svg(run), encoding="utf-8")
    csv = run.path / "rates.csv"
    write_csv(csv, rate_rows(run), RATE_COLUMNS)
    log.info("report %s: %s, %s", run.name, svg, csv)
    return svg, csv
