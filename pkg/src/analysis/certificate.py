from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.analysis.events import (
    Displacements,
    NonCauchy,
    band_crossings,
    displacement_events,
    in_box,
    non_cauchy_certificate,
    strip_box,
)
from src.analysis.rates import AnalysisError, check_rates
from src.common.api import all_passed, check_entry
from src.counterexamples import Ce3Strips, Instance, reference_trajectory
from src.fw import Trajectory, landing_residual
from src.geom2d import ConvexPolygon, Vec2
from src.sketch import Objective, SketchObjective

log = logging.getLogger(__name__)

GAMMA_TREND_RATIO = 0.5

OSCILLATING = "oscillating"
CONVERGED = "converged"
INCONCLUSIVE = "inconclusive"


# --- single checks, each one report entry -----------------------------------------


def feasibility(traj: Trajectory, C: ConvexPolygon, tol: float = 1e-12) -> Dict[str, Any]:
    for p in traj.points:
        if not C.contains(p.x.to_float(), tol=tol):
            return check_entry("feasibility", False, t=p.t, x=list(p.x.to_tuple()))
    return check_entry("feasibility", True)


def fw_gap_dominance(traj: Trajectory, f_min: float = 0.0, tol: float = 1e-9) -> Dict[str, Any]:
    for p in traj.points:
        if p.gap < p.f - f_min - tol:
            return check_entry("fw_gap_dominance", False, t=p.t, gap=p.gap, primal=p.f - f_min)
    return check_entry("fw_gap_dominance", True)


def gamma_below_one(traj: Trajectory) -> Dict[str, Any]:
    for p in traj.points:
        if p.gamma is not None and p.gamma >= 1.0:
            return check_entry("gamma_below_one", False, t=p.t, gamma=p.gamma)
    return check_entry("gamma_below_one", True)


def gamma_trend(traj: Trajectory, ratio: float = GAMMA_TREND_RATIO) -> Dict[str, Any]:
    g = traj.gammas()
    n = len(g) // 10
    if n == 0:
        return check_entry("gamma_trend", False, reason="fewer than 10 steps")
    first, last = float(g[:n].mean()), float(g[-n:].mean())
    return check_entry("gamma_trend", last <= ratio * first, first=first, last=last)


def vertices_on_segment(traj: Trajectory, a: Vec2, b: Vec2, tol: float = 1e-9) -> Dict[str, Any]:
    seg = ConvexPolygon.segment(a, b)
    for p in traj.points:
        if seg.distance_to(p.v) > tol:
            return check_entry("vertices_on_segment", False, t=p.t, v=list(p.v.to_tuple()))
    return check_entry("vertices_on_segment", True)


def strip_lmo(traj: Trajectory, strips: Ce3Strips) -> Dict[str, Any]:
    """Inside conv{E_k, F_k, G_k, H_k} the oracle answers ((−1)^{k+1}, 0)."""
    xs, vs = traj.xs(), traj.vs()
    visits = 0
    for s in strips.levels:
        lo, hi = strip_box(s.H, s.F)
        target = np.array(s.target.to_tuple())
        for t in np.flatnonzero(in_box(xs, lo, hi)):
            visits += 1
            if float(np.abs(vs[t] - target).max()) > 1e-9:
                return check_entry("strip_lmo", False, k=s.k, t=int(t), v=vs[t].tolist())
    return check_entry("strip_lmo", True, visits=visits)


def reference_agreement(traj: Trajectory, reference: Sequence[Vec2], tol: float) -> Dict[str, Any]:
    xs = traj.xs()
    n = min(len(xs), len(reference))
    worst, at = 0.0, 0
    for t in range(n):
        err = float(np.hypot(*(xs[t] - np.array(reference[t].to_tuple()))))
        if err > worst:
            worst, at = err, t
    return check_entry("reference_agreement", worst <= tol, steps=n, worst=worst, t=at, tol=tol)


def positive_ordinate(traj: Trajectory) -> Dict[str, Any]:
    for p in traj.points:
        if not float(p.x.y) > 0.0:
            return check_entry("positive_ordinate", False, t=p.t, y=float(p.x.y))
    return check_entry("positive_ordinate", True)


def band_visits(traj: Trajectory, half_width: float) -> Dict[str, Any]:
    left, right = band_crossings(traj, half_width)
    return check_entry("band_crossings", left > 0 and right > 0, left=left, right=right)


# --- certificate -------------------------------------------------------------------


@dataclass
class Certificate:
    instance: str
    horizon: int
    checks: List[Dict[str, Any]] = field(default_factory=list)
    non_cauchy: Optional[NonCauchy] = None
    band: Tuple[int, int] = (0, 0)
    displacements: Optional[Displacements] = None
    min_step: float = 0.0
    verdict: str = INCONCLUSIVE
    expect_oscillation: bool = True
    stats: Dict[str, Any] = field(default_factory=dict)

    @property
    def rate_ok(self) -> bool:
        return all(e["passed"] for e in self.checks if e["name"] == "rates")

    @property
    def passed(self) -> bool:
        if not all_passed(self.checks):
            return False
        return self.verdict == OSCILLATING or not self.expect_oscillation

    def failed(self) -> List[str]:
        out = [e["name"] for e in self.checks if not e["passed"]]
        if self.expect_oscillation and self.verdict != OSCILLATING:
            out.append(f"verdict:{self.verdict}")
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "instance": self.instance,
            "horizon": self.horizon,
            "passed": self.passed,
            "verdict": self.verdict,
            "rate_ok": self.rate_ok,
            "min_step": self.min_step,
            "band_crossings": list(self.band),
            "non_cauchy": self.non_cauchy.to_dict() if self.non_cauchy else None,
            "displacement_events": self.displacements.to_dict() if self.displacements else None,
            "checks": self.checks,
            "stats": self.stats,
        }

    def summary(self) -> str:
        n_events = len(self.non_cauchy.events) if self.non_cauchy else 0
        line = f"{self.instance}: verdict={self.verdict} T={self.horizon} events={n_events} min_step={self.min_step:.4g}"
        if self.displacements is not None:
            line += f" displacements={self.displacements.count}"
        failed = self.failed()
        return line + (f" FAILED: {', '.join(failed)}" if failed else " ok")


def _verdict(nc: Optional[NonCauchy], xs: np.ndarray) -> str:
    if nc is None:
        return INCONCLUSIVE
    if nc.covers_all:
        return OSCILLATING
    if not nc.events and len(xs) > 1 and float(np.hypot(*(xs[-1] - xs[-2]))) < 1e-9:
        return CONVERGED
    return INCONCLUSIVE


def _landing(traj: Trajectory, obj: Objective, upto: int) -> float:
    worst = 0.0
    for p in traj.points[:upto]:
        if p.gamma is None:
            continue
        worst = max(worst, landing_residual(obj, p.x.to_array(), p.v.to_array(), p.gamma))
    return worst


def certify(
    instance: Instance,
    traj: Trajectory,
    L: float,
    diam: Optional[float] = None,
    obj: Optional[Objective] = None,
) -> Certificate:
    """Compose rate, feasibility and instance-specific checks with the oscillation events."""
    T = traj.horizon
    H = instance.faithful_horizon(T)
    tmpl = instance.template
    diam = diam if diam is not None else instance.C.diameter()
    f_min = obj.f_min if obj is not None else 0.0
    cert = Certificate(instance.name, T, expect_oscillation=tmpl.expect_oscillation)
    cert.stats["faithful_horizon"] = H

    if T >= 1:
        cert.checks.append(check_rates(traj, L, diam, f_min))
    cert.checks.append(feasibility(traj, instance.C))
    cert.checks.append(fw_gap_dominance(traj, f_min))

    xs = traj.xs()[: H + 1]
    steps = np.hypot(*(np.diff(xs, axis=0).T)) if len(xs) > 1 else np.zeros(0)
    cert.min_step = float(steps.min()) if steps.size else 0.0
    try:
        cert.non_cauchy = non_cauchy_certificate(xs, tmpl.epsilon, tmpl.window_for(H))
    except AnalysisError as e:
        log.info("%s: no non-Cauchy certificate: %s", instance.name, e)
    cert.verdict = _verdict(cert.non_cauchy, xs)
    cert.band = band_crossings(Trajectory(traj.points[: H + 1]), tmpl.band_half_width)

    if instance.reference is not None:
        ref = reference_trajectory(instance, min(H, tmpl.reference_steps))
        tol = 1e-9
        if isinstance(obj, SketchObjective):
            tol = 10.0 * max(obj.radii) + 1e-10
        cert.checks.append(reference_agreement(traj, ref, tol))

    if instance.name == "ce3" and instance.strips is not None:
        cert.checks.append(gamma_below_one(traj))
        cert.checks.append(gamma_trend(traj))
        a, b = instance.solution_set.vertex(0), instance.solution_set.vertex(1)
        cert.checks.append(vertices_on_segment(traj, a, b))
        cert.checks.append(strip_lmo(traj, instance.strips))
        cert.displacements = displacement_events(traj, instance.strips, tmpl.displacement_threshold)
        cert.checks.append(
            check_entry(
                "displacement_events",
                cert.displacements.count >= tmpl.min_displacements,
                count=cert.displacements.count,
                required=tmpl.min_displacements,
            )
        )
    if instance.name == "ce4":
        cert.checks.append(positive_ordinate(Trajectory(traj.points[: H + 1])))
        cert.checks.append(band_visits(Trajectory(traj.points[: H + 1]), float(tmpl.band_half_width)))

    strategy = str(traj.meta.get("strategy", {}).get("kind", ""))
    if strategy == "linesearch" and obj is not None:
        cert.stats["landing_residual_max"] = _landing(traj, obj, H)

    log.info("certificate %s: verdict=%s passed=%s", instance.name, cert.verdict, cert.passed)
    return cert
