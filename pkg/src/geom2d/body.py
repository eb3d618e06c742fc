from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.common.protocol import Scalar
from src.geom2d.polygon import ConvexPolygon, convex_hull
from src.geom2d.vec import ORIGIN, GeometryError, Vec2

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class OffsetLimitError(GeometryError):
    def __init__(self, message: str, limit: float):
        super().__init__(message)
        self.limit = limit


@dataclass(frozen=True)
class Body:
    """core ⊕ disc(radius). Support function h(u) = h_core(u) + radius·‖u‖."""

    core: ConvexPolygon
    radius: Scalar = 0.0

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise GeometryError("body radius must be >= 0")

    @classmethod
    def of(cls, p: ConvexPolygon) -> "Body":
        return cls(p, Fraction(0) if p.is_exact else 0.0)

    @classmethod
    def disc(cls, center: Vec2, r: Scalar) -> "Body":
        return cls(ConvexPolygon((center,), degenerate=True), r)

    def support(self, u: Vec2) -> Scalar:
        return support(self, u)

    def distance_to(self, p: Vec2) -> float:
        return max(0.0, self.core.distance_to(p) - float(self.radius))

    def contains(self, p: Vec2, tol: float = 0.0) -> bool:
        return self.core.distance_to(p) <= float(self.radius) + tol

    def boundary_point(self, u: Vec2) -> Vec2:
        w = u.unit()
        i = self.core.argmax(w)[0]
        return self.core.vertex(i).to_float() + w * float(self.radius)

    def core_array(self) -> np.ndarray:
        return self.core.as_array()

    def to_dict(self) -> Dict[str, object]:
        return {"core": self.core.to_dict(), "radius": float(self.radius)}


def support(b: Body, u: Vec2) -> Scalar:
    if u.is_zero():
        raise GeometryError("degenerate direction")
    h = b.core.support(u)
    if b.radius == 0:
        return h
    return h + b.radius * u.norm()


# --- Minkowski combination -------------------------------------------------


def minkowski_pairs(a: Sequence[Vec2], b: Sequence[Vec2]) -> List[Tuple[int, int]]:
    """Edge-normal merge of two counterclockwise strictly convex polygons.

    Returns the (i, j) vertex pairs whose sums a[i] + b[j] are the vertices of
    a ⊕ b in counterclockwise order, starting from the lowest sum. The pairing
    is the same for every positive scaling of a and b.
    """
    n, m = len(a), len(b)
    if n < 3 or m < 3:
        return _pairs_by_hull(a, b)
    pa = lowest_first_index(a)
    pb = lowest_first_index(b)
    out: List[Tuple[int, int]] = []
    i = j = 0
    while i < n or j < m:
        ii, jj = (pa + i) % n, (pb + j) % m
        out.append((ii, jj))
        if i == n:
            j += 1
            continue
        if j == m:
            i += 1
            continue
        ea = a[(ii + 1) % n] - a[ii]
        eb = b[(jj + 1) % m] - b[jj]
        c = ea.cross(eb)
        if c > 0:
            i += 1
        elif c < 0:
            j += 1
        else:
            i += 1
            j += 1
    # parallel edges advance both indices and may leave a duplicate at the end
    if len(out) > 1 and out[-1] == out[0]:
        out.pop()
    return out


def lowest_first_index(vs: Sequence[Vec2]) -> int:
    return min(range(len(vs)), key=lambda k: (vs[k].y, vs[k].x))


def _pairs_by_hull(a: Sequence[Vec2], b: Sequence[Vec2]) -> List[Tuple[int, int]]:
    sums: Dict[Vec2, Tuple[int, int]] = {}
    for i, p in enumerate(a):
        for j, q in enumerate(b):
            sums.setdefault(p + q, (i, j))
    hull = convex_hull(sums.keys())
    return [sums[h] for h in hull]


def minkowski_combination(a: Body, b: Body, alpha: Scalar, beta: Scalar) -> Body:
    if alpha < 0 or beta < 0:
        raise GeometryError("negative combination weight")
    if alpha == 0 and beta == 0:
        raise GeometryError("empty combination")
    if alpha == 0:
        return Body(_scale_core(b.core, beta), beta * b.radius)
    if beta == 0:
        return Body(_scale_core(a.core, alpha), alpha * a.radius)
    av = [v * alpha for v in a.core.vertices]
    bv = [v * beta for v in b.core.vertices]
    pairs = minkowski_pairs(av, bv)
    core = ConvexPolygon.hull(av[i] + bv[j] for i, j in pairs)
    return Body(core, alpha * a.radius + beta * b.radius)


def _scale_core(p: ConvexPolygon, k: Scalar) -> ConvexPolygon:
    return ConvexPolygon(tuple(v * k for v in p.vertices), degenerate=p.degenerate)


# --- nesting ---------------------------------------------------------------


def _gauge(outer: ConvexPolygon, w: Vec2) -> Scalar:
    best: Optional[Scalar] = None
    for a, b in outer.edges():
        e = b - a
        n = Vec2(e.y, -e.x)
        h = a.dot(n)
        if w.is_exact and a.is_exact and b.is_exact:
            g: Scalar = Fraction(w.dot(n)) / Fraction(h)
        else:
            g = float(w.dot(n)) / float(h)
        best = g if best is None or g > best else best
    return best if best is not None else 0


def _origin_interior(p: ConvexPolygon) -> bool:
    return not p.degenerate and p.contains(ORIGIN, strict=True)


def nesting_sup(outer: ConvexPolygon, inner: ConvexPolygon) -> Scalar:
    """sup of δ with λ·inner ⊂ int(outer) for λ ∈ [1−δ, 1+δ]; negative if inner escapes.

    Closed form: λ·inner stays inside iff λ < 1 / max gauge_outer(w) over inner
    vertices w. Exact for rational input.
    """
    if not _origin_interior(outer) or not _origin_interior(inner):
        raise GeometryError("origin not interior")
    g = max(_gauge(outer, w) for w in inner.vertices)
    if g <= 0:
        return Fraction(1) if isinstance(g, Fraction) else 1.0
    lam = (1 / g) if isinstance(g, Fraction) else 1.0 / g
    return lam - 1


def nesting_margin(outer: ConvexPolygon, inner: ConvexPolygon) -> float:
    s = float(nesting_sup(outer, inner))
    return min(max(0.0, s - 1e-12), 1.0 - 1e-12)


# --- support extremes --------------------------------------------------------


def _normal_angles(core: np.ndarray) -> List[float]:
    n = len(core)
    if n == 1:
        return []
    if n == 2:
        e = core[1] - core[0]
        t = math.atan2(-e[0], e[1])
        return [t % TWO_PI, (t + math.pi) % TWO_PI]
    e = np.roll(core, -1, axis=0) - core
    return [math.atan2(-ex, ey) % TWO_PI for ex, ey in e]


def _arcs(cores: Sequence[np.ndarray]) -> List[Tuple[float, float, Tuple[int, ...]]]:
    breaks = sorted(set(t for c in cores for t in _normal_angles(c)))
    if not breaks:
        bounds = [(0.0, TWO_PI)]
    else:
        bounds = [(breaks[k], breaks[k + 1]) for k in range(len(breaks) - 1)]
        bounds.append((breaks[-1], breaks[0] + TWO_PI))
    out = []
    for t0, t1 in bounds:
        tm = 0.5 * (t0 + t1)
        u = np.array([math.cos(tm), math.sin(tm)])
        idx = tuple(int(np.argmax(c @ u)) for c in cores)
        out.append((t0, t1, idx))
    return out


def _in_arc(t: float, t0: float, t1: float) -> bool:
    return (t - t0) % TWO_PI <= (t1 - t0)


def _directions(angles: Sequence[float]) -> np.ndarray:
    a = np.asarray(angles, dtype=float)
    return np.stack([np.cos(a), np.sin(a)], axis=1)


def support_values(b: Body, dirs: np.ndarray) -> np.ndarray:
    return (b.core_array() @ dirs.T).max(axis=0) + float(b.radius)


def _uniform(n_dirs: int) -> List[float]:
    return [TWO_PI * k / n_dirs for k in range(n_dirs)] if n_dirs > 0 else []


@dataclass(frozen=True)
class SupportRange:
    lo: float
    hi: float
    lo_dir: Vec2
    hi_dir: Vec2


def support_gap_range(a: Body, b: Body, n_dirs: int = 0) -> SupportRange:
    """min and max over unit u of h_a(u) − h_b(u).

    On each arc the difference is <p, u> + const, so the extremes sit at arc
    ends or at u = ±p/‖p‖.
    """
    ca, cb = a.core_array(), b.core_array()
    cand: List[float] = _uniform(n_dirs)
    for t0, t1, (i, j) in _arcs([ca, cb]):
        cand.append(t0 % TWO_PI)
        p = ca[i] - cb[j]
        if np.any(p != 0):
            for t in (math.atan2(p[1], p[0]), math.atan2(-p[1], -p[0])):
                if _in_arc(t, t0, t1):
                    cand.append(t % TWO_PI)
    dirs = _directions(cand)
    d = support_values(a, dirs) - support_values(b, dirs)
    lo, hi = int(np.argmin(d)), int(np.argmax(d))
    return SupportRange(
        float(d[lo]), float(d[hi]), Vec2(*map(float, dirs[lo])), Vec2(*map(float, dirs[hi]))
    )


@dataclass(frozen=True)
class RatioRange:
    lo: float
    hi: float
    lo_dir: Vec2
    hi_dir: Vec2
    min_den: float
    min_den_dir: Vec2


def support_ratio_range(num: Tuple[Body, Body], den: Tuple[Body, Body], n_dirs: int = 0) -> RatioRange:
    """Extremes over unit u of (h_c − h_d)(u) / (h_a − h_b)(u) for num = (c, d), den = (a, b).

    On each arc numerator and denominator are affine in u; the derivative of
    the ratio vanishes where cross(p, q) + <αq − βp, u⊥> = 0.
    """
    (c, d), (a, b) = num, den
    cores = [a.core_array(), b.core_array(), c.core_array(), d.core_array()]
    alpha = float(a.radius) - float(b.radius)
    beta = float(c.radius) - float(d.radius)
    cand: List[float] = _uniform(n_dirs)
    for t0, t1, (ia, ib, ic, id_) in _arcs(cores):
        cand.append(t0 % TWO_PI)
        p = cores[0][ia] - cores[1][ib]
        q = cores[2][ic] - cores[3][id_]
        w = alpha * q - beta * p
        wn = float(np.hypot(w[0], w[1]))
        if wn == 0.0:
            continue
        s = -(p[0] * q[1] - p[1] * q[0]) / wn
        if abs(s) > 1.0:
            continue
        psi = math.atan2(w[1], w[0])
        for t in (psi - math.asin(s), psi - math.pi + math.asin(s)):
            if _in_arc(t, t0, t1):
                cand.append(t % TWO_PI)
    dirs = _directions(cand)
    den_v = support_values(a, dirs) - support_values(b, dirs)
    num_v = support_values(c, dirs) - support_values(d, dirs)
    k0 = int(np.argmin(den_v))
    if den_v[k0] <= 0:
        u = Vec2(*map(float, dirs[k0]))
        return RatioRange(-math.inf, math.inf, u, u, float(den_v[k0]), u)
    r = num_v / den_v
    lo, hi = int(np.argmin(r)), int(np.argmax(r))
    as_vec = lambda k: Vec2(float(dirs[k][0]), float(dirs[k][1]))  # noqa: E731
    return RatioRange(float(r[lo]), float(r[hi]), as_vec(lo), as_vec(hi), float(den_v[k0]), as_vec(k0))


def hausdorff(a: Body, b: Body, n_dirs: int = 64) -> float:
    if n_dirs < 8:
        raise GeometryError("hausdorff needs n_dirs >= 8")
    rng = support_gap_range(a, b, n_dirs)
    return max(abs(rng.lo), abs(rng.hi))


# --- rounding --------------------------------------------------------------


def _first_root(c0: float, c1: float, c2: float = 0.0) -> float:
    """Smallest r > 0 with c0 + c1·r + c2·r² = 0, given c0 > 0; inf if none."""
    roots: List[float] = []
    if abs(c2) < 1e-300:
        if c1 < 0:
            roots.append(-c0 / c1)
    else:
        disc = c1 * c1 - 4 * c2 * c0
        if disc >= 0:
            sq = math.sqrt(disc)
            roots.extend([(-c1 - sq) / (2 * c2), (-c1 + sq) / (2 * c2)])
    pos = [x for x in roots if x > 0]
    return min(pos) if pos else math.inf


def _vertex_offsets(p: ConvexPolygon, pins: Mapping[int, Vec2]) -> Tuple[np.ndarray, np.ndarray]:
    v = p.as_array()
    nrm = np.array([u.to_tuple() for u in p.to_float().edge_normals()])
    n_in = np.roll(nrm, 1, axis=0)  # normal of the edge ending at vertex i
    n_out = nrm
    m = (n_in + n_out) / (1.0 + (n_in * n_out).sum(axis=1))[:, None]
    for i, u in pins.items():
        w = np.array(u.unit().to_tuple())
        if _cross2(n_in[i], w) <= 0 or _cross2(w, n_out[i]) <= 0:
            raise GeometryError(f"pinned direction not interior to the normal cone at vertex {i}")
        m[i] = w
    return v, m


def _cross2(a: np.ndarray, b: np.ndarray) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def offset_limit(p: ConvexPolygon, pins: Optional[Mapping[int, Vec2]] = None) -> float:
    if p.degenerate:
        raise GeometryError("cannot round a degenerate polygon")
    pins = dict(pins or {})
    v, m = _vertex_offsets(p, pins)
    n = len(v)
    a = np.roll(v, -1, axis=0) - v  # edge i at r = 0
    b = np.roll(m, -1, axis=0) - m  # edge i shrinks as a − r·b
    limit = math.inf
    for i in range(n):
        # edge keeps its orientation
        limit = min(limit, _first_root(float(a[i] @ a[i]), -float(b[i] @ a[i])))
        # consecutive edges keep turning left
        a1, b1, a2, b2 = a[i - 1], b[i - 1], a[i], b[i]
        limit = min(
            limit,
            _first_root(_cross2(a1, a2), -(_cross2(a1, b2) + _cross2(b1, a2)), _cross2(b1, b2)),
        )
        if i in pins:
            u = m[i]
            limit = min(limit, _first_root(-float(u @ a2), float(u @ b2)))
            limit = min(limit, _first_root(float(u @ a1), -float(u @ b1)))
    return limit


def rounded_body(p: ConvexPolygon, r: Scalar, pins: Optional[Mapping[int, Vec2]] = None) -> Body:
    """Body(core, r) with the core inset by r; pinned vertices V keep V on the boundary with normal u.

    Unpinned vertex i moves to V_i − r·m_i with m_i the corner bisector scaled so
    that both adjacent edges move inward by exactly r. A pinned vertex moves to
    V − r·u, so V = core vertex + r·u lies on the body with outward normal u.
    """
    if r < 0:
        raise GeometryError("rounding radius must be >= 0")
    if r == 0:
        return Body.of(p)
    pins = dict(pins or {})
    limit = offset_limit(p, pins)
    if float(r) >= limit:
        raise OffsetLimitError(f"rounding radius exceeds offset limit {limit:.6g}", limit)
    v, m = _vertex_offsets(p, pins)
    core = v - float(r) * m
    return Body(ConvexPolygon(tuple(Vec2(float(x), float(y)) for x, y in core)), float(r))


def rounding_bound(p: ConvexPolygon, r: float) -> float:
    """Upper bound on hausdorff(rounded_body(p, r), p): r·sec(φ_max/2), φ the exterior angle."""
    nrm = [u.to_tuple() for u in p.to_float().edge_normals()]
    worst = 0.0
    for k in range(len(nrm)):
        c = nrm[k - 1][0] * nrm[k][0] + nrm[k - 1][1] * nrm[k][1]
        phi = math.acos(max(-1.0, min(1.0, c)))
        worst = max(worst, phi)
    return r / math.cos(worst / 2.0)


__all__ = [
    "Body",
    "OffsetLimitError",
    "RatioRange",
    "SupportRange",
    "hausdorff",
    "minkowski_combination",
    "minkowski_pairs",
    "nesting_margin",
    "nesting_sup",
    "offset_limit",
    "rounded_body",
    "rounding_bound",
    "support",
    "support_gap_range",
    "support_ratio_range",
    "support_values",
]
