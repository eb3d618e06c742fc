from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Protocol, Sequence, Tuple, Union

import numpy as np

from src.common.api import check_entry
from src.geom2d import (
    Body,
    ConvexPolygon,
    GeometryError,
    Vec2,
    hausdorff,
    minkowski_pairs,
    offset_limit,
    rounded_body,
    support_gap_range,
    support_ratio_range,
)
from src.sketch.spec import SketchError, SketchSpec, mark_pins, validate_sketch

log = logging.getLogger(__name__)

Point = Union[Vec2, np.ndarray, Sequence[float]]

SIGMA_TOL = 1e-13
# σ candidates tested per pass of the shell search
SIGMA_GRID = 63
# strict lower bound on each level-gap ratio; keeps slopes monotone after rounding
RATIO_SAFETY = 1.0 - 1e-9
OUTER_SLOPE_SAFETY = 1.001


def as_xy(x: Point) -> np.ndarray:
    if isinstance(x, Vec2):
        return x.to_array()
    return np.asarray(x, dtype=float).reshape(2)


@dataclass(frozen=True)
class Evaluation:
    f: float
    g: Vec2
    # (level, σ); level −1 is the outer extension with σ = s, level = depth is the flat core
    shell: Tuple[int, float] = (0, 0.0)

    @property
    def grad(self) -> np.ndarray:
        return self.g.to_array()


class Objective(Protocol):
    f_min: float

    def value_and_gradient(self, x: Point) -> Evaluation: ...


# --- polygon kernels on float arrays ------------------------------------------


def _nearest(v: np.ndarray, x: np.ndarray) -> Tuple[float, np.ndarray, int, float]:
    """Distance from x to the boundary of the polygon `v`, nearest point, edge index, edge parameter."""
    if len(v) == 1:
        d = x - v[0]
        return float(math.hypot(d[0], d[1])), v[0], 0, 0.0
    e = np.roll(v, -1, axis=0) - v
    w = x - v
    l2 = (e * e).sum(axis=1)
    t = np.clip((w * e).sum(axis=1) / np.where(l2 > 0, l2, 1.0), 0.0, 1.0)
    p = v + t[:, None] * e
    dd = np.hypot(x[0] - p[:, 0], x[1] - p[:, 1])
    i = int(np.argmin(dd))
    return float(dd[i]), p[i], i, float(t[i])


def _inside(v: np.ndarray, x: np.ndarray, tol: float = 0.0) -> bool:
    if len(v) < 3:
        return False
    e = np.roll(v, -1, axis=0) - v
    w = x - v
    cr = e[:, 0] * w[:, 1] - e[:, 1] * w[:, 0]
    return bool(np.all(cr >= -tol * np.hypot(e[:, 0], e[:, 1])))


def _edge_normal(v: np.ndarray, i: int, step: int = 1) -> np.ndarray:
    n_v = len(v)
    for k in range(n_v):
        j = (i + k * step) % n_v
        e = v[(j + 1) % n_v] - v[j]
        length = math.hypot(e[0], e[1])
        if length > 0.0:
            return np.array([e[1] / length, -e[0] / length])
    raise SketchError("normal undefined at a point body")


def _boundary_normal(core: np.ndarray, radius: float, x: np.ndarray, scale: float) -> np.ndarray:
    d, p, i, t = _nearest(core, x)
    if radius > 1e-15 * scale and d > 0.0 and not _inside(core, x):
        return (x - p) / d
    if len(core) == 1:
        if d == 0.0:
            raise SketchError("normal undefined at a point body")
        return (x - p) / d
    if len(core) == 2:
        n = _edge_normal(core, 0)
        side = float(np.dot(x - core[0], n))
        if 0.0 < t < 1.0:
            return n if side >= 0 else -n
        return (x - p) / d if d > 0 else n
    if 0.0 < t < 1.0:
        return _edge_normal(core, i)
    j = i if t == 0.0 else (i + 1) % len(core)
    m = _edge_normal(core, j - 1, step=-1) + _edge_normal(core, j)
    return m / math.hypot(m[0], m[1])


def _support(core: np.ndarray, radius: float, n: np.ndarray) -> float:
    return float((core @ n).max()) + radius


@dataclass(frozen=True)
class _Shell:
    """Minkowski interpolation (1−σ)·outer ⊕ σ·inner with a fixed vertex pairing."""

    outer: np.ndarray
    inner: np.ndarray
    pairs: Tuple[np.ndarray, np.ndarray]
    r_outer: float
    r_inner: float

    @staticmethod
    def between(a: Body, b: Body) -> "_Shell":
        av = [v.to_float() for v in a.core.vertices]
        bv = [v.to_float() for v in b.core.vertices]
        pairs = minkowski_pairs(av, bv)
        i = np.array([p[0] for p in pairs], dtype=int)
        j = np.array([p[1] for p in pairs], dtype=int)
        return _Shell(a.core_array(), b.core_array(), (i, j), float(a.radius), float(b.radius))

    def core_at(self, sigma: float) -> np.ndarray:
        i, j = self.pairs
        return (1.0 - sigma) * self.outer[i] + sigma * self.inner[j]

    def radius_at(self, sigma: float) -> float:
        return (1.0 - sigma) * self.r_outer + sigma * self.r_inner

    def contains_at(self, sigmas: np.ndarray, x: np.ndarray, tol: float) -> np.ndarray:
        i, j = self.pairs
        s = sigmas[:, None, None]
        cores = (1.0 - s) * self.outer[i] + s * self.inner[j]
        radii = (1.0 - sigmas) * self.r_outer + sigmas * self.r_inner
        return _contains_many(cores, radii, x, tol)


def _body_contains(core: np.ndarray, radius: float, x: np.ndarray, tol: float) -> bool:
    if _inside(core, x):
        return True
    d, _, _, _ = _nearest(core, x)
    return d <= radius + tol


def _contains_many(cores: np.ndarray, radii: np.ndarray, x: np.ndarray, tol: float) -> np.ndarray:
    e = np.roll(cores, -1, axis=1) - cores
    w = x - cores
    inside = np.all(e[..., 0] * w[..., 1] - e[..., 1] * w[..., 0] >= 0.0, axis=1)
    l2 = (e * e).sum(axis=2)
    t = np.clip((w * e).sum(axis=2) / np.where(l2 > 0, l2, 1.0), 0.0, 1.0)
    p = cores + t[..., None] * e
    d = np.hypot(x[0] - p[..., 0], x[1] - p[..., 1]).min(axis=1)
    return inside | (d <= radii + tol)


# --- the synthesized objective ---------------------------------------------------


@dataclass
class SketchObjective:
    """Convex surrogate whose sublevel sets at η_ℓ are the rounded level bodies B_ℓ."""

    spec: SketchSpec
    bodies: List[Body]
    radii: List[float]
    levels: List[float]
    outer_slope: float
    ratios: List[float] = field(default_factory=list)
    f_min: float = 0.0

    def __post_init__(self) -> None:
        self._cores = [b.core_array() for b in self.bodies]
        self._radii = [float(b.radius) for b in self.bodies]
        self._shells = [_Shell.between(self.bodies[k], self.bodies[k + 1]) for k in range(len(self.bodies) - 1)]
        self._domain = self.spec.domain.as_array()
        self._scale = max(1.0, self.spec.domain.diameter())
        self._tol = 1e-14 * self._scale

    @property
    def depth(self) -> int:
        return len(self.bodies) - 1

    def delta_eta(self, level: int) -> float:
        return self.levels[level] - self.levels[level + 1]

    def _in_body(self, level: int, x: np.ndarray) -> bool:
        return _body_contains(self._cores[level], self._radii[level], x, self._tol)

    def locate(self, x: Point) -> Tuple[int, float]:
        """(ℓ, σ) with x on the boundary of (1−σ)B_ℓ ⊕ σB_{ℓ+1}."""
        p = as_xy(x)
        if not _inside(self._domain, p, tol=1e-12):
            raise SketchError(f"outside domain: ({p[0]:.6g}, {p[1]:.6g})")
        if not self._in_body(0, p):
            return -1, self._outer_s(p)
        if self._in_body(self.depth, p):
            return self.depth, 0.0
        lo, hi = 0, self.depth  # x ∈ B_lo, x ∉ B_hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self._in_body(mid, p):
                lo = mid
            else:
                hi = mid
        shell = self._shells[lo]
        s_lo, s_hi = 0.0, 1.0
        while s_hi - s_lo > SIGMA_TOL:
            grid = np.linspace(s_lo, s_hi, SIGMA_GRID + 2)[1:-1]
            out = np.flatnonzero(~shell.contains_at(grid, p, self._tol))
            first = int(out[0]) if out.size else SIGMA_GRID
            if first > 0:
                s_lo = float(grid[first - 1])
            if first < SIGMA_GRID:
                s_hi = float(grid[first])
        return lo, 0.5 * (s_lo + s_hi)

    def _outer_s(self, p: np.ndarray) -> float:
        core, r = self._cores[0], self._radii[0]
        hi = 1.0
        while not _body_contains(core, r, p / (1.0 + hi), self._tol):
            hi *= 2.0
        lo = 0.0
        while hi - lo > SIGMA_TOL * (1.0 + hi):
            mid = 0.5 * (lo + hi)
            if _body_contains(core, r, p / (1.0 + mid), self._tol):
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    def value_and_gradient(self, x: Point) -> Evaluation:
        p = as_xy(x)
        level, sigma = self.locate(p)
        if level == self.depth:
            return Evaluation(0.0, Vec2(0.0, 0.0), (level, 0.0))
        if level < 0:
            core, r = self._cores[0], self._radii[0]
            n = _boundary_normal(core, r, p / (1.0 + sigma), self._scale)
            mag = self.outer_slope / _support(core, r, n)
            g = mag * n
            return Evaluation(self.levels[0] + self.outer_slope * sigma, Vec2(float(g[0]), float(g[1])), (-1, sigma))
        shell = self._shells[level]
        n = _boundary_normal(shell.core_at(sigma), shell.radius_at(sigma), p, self._scale)
        dh = _support(self._cores[level], self._radii[level], n) - _support(
            self._cores[level + 1], self._radii[level + 1], n
        )
        if dh <= 0.0:
            raise SketchError(f"levels not strictly nested in direction ({n[0]:.6g}, {n[1]:.6g}) at level {level}")
        d_eta = self.delta_eta(level)
        g = (d_eta / dh) * n
        f = self.levels[level] - sigma * d_eta
        return Evaluation(f, Vec2(float(g[0]), float(g[1])), (level, sigma))

    def value(self, x: Point) -> float:
        return self.value_and_gradient(x).f

    def marked_point(self, level: int, u: Vec2) -> Vec2:
        return self.bodies[level].boundary_point(u)

    def summary(self) -> Dict[str, Any]:
        return {
            "depth": self.depth,
            "eta0": self.levels[0],
            "eta_last_gap": self.delta_eta(self.depth - 1) if self.depth > 0 else 0.0,
            "radius_max": max(self.radii),
            "radius_min": min(self.radii),
            "min_ratio": min(self.ratios) if self.ratios else None,
            "outer_slope": self.outer_slope,
        }


def _level_radius(spec: SketchSpec, floats: List[ConvexPolygon], level: int, r_scale: float) -> float:
    if r_scale <= 0:
        return 0.0
    p = floats[level]
    try:
        limit = offset_limit(p, mark_pins(spec, level))
    except GeometryError as e:
        raise SketchError(f"rounding infeasible at level {level}: {e}") from e
    if not limit > 0:
        raise SketchError(f"rounding infeasible at level {level}: offset limit {limit}")
    caps = [r_scale, 0.1 * float(spec.margins[level]), 0.5 * limit]
    for other in (level - 1, level + 1):
        if 0 <= other < len(floats):
            outer, inner = (floats[other], p) if other < level else (p, floats[other])
            gap = support_gap_range(Body.of(outer), Body.of(inner)).lo
            if gap <= 0:
                raise SketchError(f"levels not strictly nested at level {min(level, other)}")
            caps.append(0.1 * gap)
    r = min(caps)
    if r < r_scale and r == 0.5 * limit:
        log.warning("rounding radius at level %d clamped by the offset limit: %.3g", level, r)
    return r


def _rounded(spec: SketchSpec, floats: List[ConvexPolygon], level: int, r: float) -> Body:
    p = floats[level]
    if r == 0.0:
        return Body(p, 0.0)
    pins = mark_pins(spec, level)
    target = float(spec.margins[level])
    if level + 1 < len(floats):
        target = min(target, 0.5 * support_gap_range(Body.of(p), Body.of(floats[level + 1])).lo)
    for _ in range(30):
        body = rounded_body(p, r, pins)
        if hausdorff(body, Body(p, 0.0)) <= target:
            return body
        r *= 0.5
    raise SketchError(f"rounding infeasible at level {level}: no radius meets the margin")


def build_objective(
    spec: SketchSpec,
    r_scale: float = 1e-4,
    eta0: float = 1.0,
    verify_pairs: int = 0,
    seed: int = 0,
) -> SketchObjective:
    """Round every level, pick level values by the radial-convexity rule, and precompute shells."""
    report = validate_sketch(spec)
    if not report.passed:
        raise SketchError(f"sketch hypotheses failed: {', '.join(report.failed())}")
    if eta0 <= 0:
        raise SketchError("eta0 must be > 0")
    if spec.depth < 1:
        raise SketchError("need at least two levels")

    floats = [p.to_float() for p in spec.polytopes]
    radii = [_level_radius(spec, floats, k, r_scale) for k in range(len(floats))]
    bodies = [_rounded(spec, floats, k, r) for k, r in enumerate(radii)]
    radii = [float(b.radius) for b in bodies]

    ratios: List[float] = []
    for k in range(spec.depth - 1):
        rng = support_ratio_range((bodies[k + 1], bodies[k + 2]), (bodies[k], bodies[k + 1]))
        if rng.min_den <= 0:
            u = rng.min_den_dir
            raise SketchError(f"levels not strictly nested in direction ({u.x:.6g}, {u.y:.6g}) at level {k}")
        ratios.append(rng.lo * RATIO_SAFETY)
        log.debug("level %d: gap ratio %.6g (direction %.4f rad)", k, rng.lo, rng.lo_dir.angle())
        if rng.lo < 0.5:
            log.warning("level %d: gap ratio %.3g is below 0.5", k, rng.lo)
    last = support_gap_range(bodies[spec.depth - 1], bodies[spec.depth])
    if last.lo <= 0:
        raise SketchError(
            f"levels not strictly nested in direction ({last.lo_dir.x:.6g}, {last.lo_dir.y:.6g}) at level {spec.depth - 1}"
        )

    gaps = [1.0]
    for rho in ratios:
        gaps.append(gaps[-1] * rho)
    levels = [0.0] * (spec.depth + 1)
    for k in range(spec.depth - 1, -1, -1):
        levels[k] = levels[k + 1] + gaps[k]
    scale = eta0 / levels[0]
    levels = [v * scale for v in levels]

    origin = Body.disc(Vec2(0.0, 0.0), 0.0)
    outer = support_ratio_range((bodies[0], origin), (bodies[0], bodies[1]))
    mu = (levels[0] - levels[1]) * outer.hi * OUTER_SLOPE_SAFETY

    obj = SketchObjective(spec, bodies, radii, levels, mu, ratios)
    log.info(
        "objective built: %d levels, eta0=%.4g, r in [%.3g, %.3g], outer slope %.4g",
        spec.depth + 1,
        levels[0],
        min(radii),
        max(radii),
        mu,
    )
    if verify_pairs > 0:
        entry = midpoint_convexity(obj, spec.domain, verify_pairs, seed)
        if not entry["passed"]:
            raise SketchError(f"objective not convex: {entry['witness']}")
    return obj


# --- closed-form objectives -------------------------------------------------------


@dataclass(frozen=True)
class ZeroObjective:
    f_min: float = 0.0

    def value_and_gradient(self, x: Point) -> Evaluation:
        as_xy(x)
        return Evaluation(0.0, Vec2(0.0, 0.0))


@dataclass(frozen=True)
class SegmentDistanceObjective:
    """f(x) = dist(x, [a, b])², gradient 2(x − proj(x))."""

    a: Vec2
    b: Vec2
    f_min: float = 0.0

    def project(self, x: Point) -> np.ndarray:
        p, a, b = as_xy(x), self.a.to_array(), self.b.to_array()
        e = b - a
        t = min(1.0, max(0.0, float(np.dot(p - a, e) / np.dot(e, e))))
        return a + t * e

    def value_and_gradient(self, x: Point) -> Evaluation:
        p = as_xy(x)
        w = p - self.project(p)
        return Evaluation(float(np.dot(w, w)), Vec2(float(2 * w[0]), float(2 * w[1])))


# --- sampled diagnostics ----------------------------------------------------------


def _sample_in(region: ConvexPolygon, rng: np.random.Generator, n: int) -> np.ndarray:
    v = region.as_array()
    lo, hi = v.min(axis=0), v.max(axis=0)
    out: List[np.ndarray] = []
    while len(out) < n:
        batch = rng.uniform(lo, hi, size=(max(16, 2 * (n - len(out))), 2))
        out.extend(p for p in batch if _inside(v, p))
    return np.array(out[:n])


def lipschitz_estimate(obj: Objective, region: ConvexPolygon, n_samples: int = 2000, seed: int = 0) -> float:
    """Lower estimate of the gradient Lipschitz constant on `region`.

    Pairs are drawn at a fixed separation of 5% of the region diameter, so the
    estimate is deterministic given the seed.
    """
    if n_samples < 100:
        raise SketchError("lipschitz_estimate needs n_samples >= 100")
    if region.n < 3:
        raise SketchError("lipschitz_estimate needs a region with interior")
    rng = np.random.default_rng(seed)
    v = region.as_array()
    h = 0.05 * region.diameter()
    xs = _sample_in(region, rng, n_samples)
    angles = rng.uniform(0.0, 2.0 * math.pi, size=n_samples)
    best = 0.0
    for x, a in zip(xs, angles):
        y = x + h * np.array([math.cos(a), math.sin(a)])
        if not _inside(v, y):
            y = x - (y - x)
            if not _inside(v, y):
                continue
        gx = obj.value_and_gradient(x).grad
        gy = obj.value_and_gradient(y).grad
        best = max(best, float(np.linalg.norm(gy - gx)) / h)
    return best


def midpoint_convexity(obj: Objective, region: ConvexPolygon, n_pairs: int, seed: int = 0, tol: float = 1e-9) -> Dict[str, Any]:
    rng = np.random.default_rng(seed)
    xs = _sample_in(region, rng, n_pairs)
    ys = _sample_in(region, rng, n_pairs)
    worst: Optional[Tuple[float, np.ndarray, np.ndarray]] = None
    for x, y in zip(xs, ys):
        fm = obj.value_and_gradient(0.5 * (x + y)).f
        excess = fm - 0.5 * (obj.value_and_gradient(x).f + obj.value_and_gradient(y).f)
        if worst is None or excess > worst[0]:
            worst = (excess, x, y)
    if worst is None or worst[0] <= tol:
        return check_entry("midpoint_convexity", True, pairs=n_pairs)
    return check_entry(
        "midpoint_convexity", False, excess=worst[0], x=worst[1].tolist(), y=worst[2].tolist()
    )
