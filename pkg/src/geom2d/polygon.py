from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.common.api import require_fields, require_list
from src.common.protocol import Scalar
from src.geom2d.vec import GeometryError, Vec2

# float predicates treat |cross| below this (relative) as zero
FLOAT_EPS = 1e-12


def _turn(o: Vec2, a: Vec2, b: Vec2) -> Scalar:
    return (a - o).cross(b - o)


def _tol(o: Vec2, a: Vec2, b: Vec2) -> float:
    if o.is_exact and a.is_exact and b.is_exact:
        return 0.0
    return FLOAT_EPS * (a - o).norm() * (b - o).norm()


def convex_hull(points: Iterable[Vec2]) -> List[Vec2]:
    """Monotone chain. Counterclockwise, collinear and duplicate points dropped.

    Works on exact and float points alike; exact input gives an exact hull.
    """
    pts = sorted(set(points), key=lambda p: (p.x, p.y))
    if len(pts) <= 2:
        return pts

    lower: List[Vec2] = []
    for p in pts:
        while len(lower) >= 2:
            t = _turn(lower[-2], lower[-1], p)
            tol = _tol(lower[-2], lower[-1], p)
            if t <= tol:
                lower.pop()
            else:
                break
        lower.append(p)
    upper: List[Vec2] = []
    for p in reversed(pts):
        while len(upper) >= 2:
            t = _turn(upper[-2], upper[-1], p)
            tol = _tol(upper[-2], upper[-1], p)
            if t <= tol:
                upper.pop()
            else:
                break
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return hull if len(hull) >= 2 else hull[:1]


def _lowest_first(vs: Sequence[Vec2]) -> Tuple[Vec2, ...]:
    i0 = min(range(len(vs)), key=lambda i: (vs[i].y, vs[i].x))
    return tuple(vs[i0:]) + tuple(vs[:i0])


@dataclass(frozen=True)
class ConvexPolygon:
    """Counterclockwise, strictly convex vertex list.

    A one- or two-vertex list is a degenerate polygon (point or segment) and
    only supports support, containment and distance queries.
    """

    vertices: Tuple[Vec2, ...]
    degenerate: bool = False

    def __post_init__(self) -> None:
        vs = tuple(Vec2.from_any(v) for v in self.vertices)
        object.__setattr__(self, "vertices", vs)
        n = len(vs)
        if n == 0:
            raise GeometryError("polygon needs at least one vertex")
        if n <= 2:
            if not self.degenerate:
                raise GeometryError("polygon with fewer than 3 vertices must be flagged degenerate")
            if n == 2 and vs[0] == vs[1]:
                raise GeometryError("segment endpoints coincide")
            return
        if self.degenerate:
            raise GeometryError("degenerate flag is only valid for points and segments")
        for i in range(n):
            a, b, c = vs[i - 1], vs[i], vs[(i + 1) % n]
            t = _turn(a, b, c)
            if a.is_exact and b.is_exact and c.is_exact:
                ok = t > 0
            else:
                ok = float(t) > FLOAT_EPS * (b - a).norm() * (c - b).norm()
            if not ok:
                raise GeometryError(f"vertex {i} is not a strict counterclockwise corner")

    # construction

    @classmethod
    def hull(cls, points: Iterable[Vec2]) -> "ConvexPolygon":
        h = convex_hull(Vec2.from_any(p) for p in points)
        if not h:
            raise GeometryError("polygon needs at least one vertex")
        return cls(tuple(h), degenerate=len(h) <= 2)

    @classmethod
    def segment(cls, a: Vec2, b: Vec2) -> "ConvexPolygon":
        return cls((a, b), degenerate=True)

    @classmethod
    def box(cls, x0: Scalar, y0: Scalar, x1: Scalar, y1: Scalar) -> "ConvexPolygon":
        return cls((Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)))

    # basic accessors

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def is_exact(self) -> bool:
        return all(v.is_exact for v in self.vertices)

    def vertex(self, i: int) -> Vec2:
        return self.vertices[i % self.n]

    def index_of(self, v: Vec2, tol: float = 1e-12) -> Optional[int]:
        for i, w in enumerate(self.vertices):
            if w == v:
                return i
        if not (v.is_exact and self.is_exact):
            for i, w in enumerate(self.vertices):
                if (w - v).norm() <= tol * max(1.0, w.norm()):
                    return i
        return None

    def edges(self) -> List[Tuple[Vec2, Vec2]]:
        if self.degenerate:
            return []
        return [(self.vertices[i], self.vertices[(i + 1) % self.n]) for i in range(self.n)]

    def edge_normals(self) -> List[Vec2]:
        return [Vec2((b - a).y, -(b - a).x).unit() for a, b in self.edges()]

    def to_float(self) -> "ConvexPolygon":
        return ConvexPolygon(tuple(v.to_float() for v in self.vertices), degenerate=self.degenerate)

    def scaled(self, k: Scalar) -> "ConvexPolygon":
        if k <= 0:
            raise GeometryError("scale factor must be positive")
        return ConvexPolygon(tuple(v * k for v in self.vertices), degenerate=self.degenerate)

    def as_array(self) -> np.ndarray:
        return np.array([v.to_tuple() for v in self.vertices], dtype=float)

    # queries

    def support(self, u: Vec2) -> Scalar:
        if u.is_zero():
            raise GeometryError("degenerate direction")
        return max(v.dot(u) for v in self.vertices)

    def argmax(self, u: Vec2) -> List[int]:
        vals = [v.dot(u) for v in self.vertices]
        best = max(vals)
        return [i for i, s in enumerate(vals) if s == best]

    def contains(self, p: Vec2, strict: bool = False, tol: float = 0.0) -> bool:
        if self.degenerate:
            if strict:
                return False
            return self.distance_to(p) <= tol
        exact = p.is_exact and self.is_exact
        for a, b in self.edges():
            t = (b - a).cross(p - a)
            if exact:
                if t < 0 or (strict and t == 0):
                    return False
            else:
                slack = tol * (b - a).norm()
                if strict:
                    if float(t) <= slack:
                        return False
                elif float(t) < -slack:
                    return False
        return True

    def distance_to(self, p: Vec2) -> float:
        if not self.degenerate and self.contains(p):
            return 0.0
        best = math.inf
        vs = self.vertices
        pairs = [(vs[0], vs[0])] if self.n == 1 else [(vs[i], vs[(i + 1) % self.n]) for i in range(self.n)]
        px, py = float(p.x), float(p.y)
        for a, b in pairs:
            ax, ay, bx, by = float(a.x), float(a.y), float(b.x), float(b.y)
            ex, ey = bx - ax, by - ay
            l2 = ex * ex + ey * ey
            t = 0.0 if l2 == 0 else min(1.0, max(0.0, ((px - ax) * ex + (py - ay) * ey) / l2))
            best = min(best, math.hypot(px - ax - t * ex, py - ay - t * ey))
        return best

    def diameter(self) -> float:
        vs = self.vertices
        return max(((a - b).norm() for a in vs for b in vs), default=0.0)

    # json

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"vertices": [v.to_json() for v in self.vertices]}
        if self.degenerate:
            out["degenerate"] = True
        return out

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "ConvexPolygon":
        require_fields(data, ["vertices"])
        raw = require_list(data, "vertices", min_len=1)
        vs = tuple(Vec2.from_any(v) for v in raw)
        return ConvexPolygon(vs, degenerate=bool(data.get("degenerate", len(vs) <= 2)))


def lowest_first(p: ConvexPolygon) -> Tuple[Vec2, ...]:
    return _lowest_first(p.vertices)


def aligned(p: Vec2, q: Vec2, r: Vec2, tol: float = 1e-12) -> bool:
    """Collinearity of three points; exact input ignores `tol`."""
    c = (q - p).cross(r - p)
    if p.is_exact and q.is_exact and r.is_exact:
        return c == 0
    scale = max(1.0, (q - p).norm() * (r - p).norm())
    return abs(float(c)) <= tol * scale


def parallel(a: Vec2, b: Vec2, c: Vec2, d: Vec2, tol: float = 1e-12) -> bool:
    u, v = b - a, d - c
    x = u.cross(v)
    if u.is_exact and v.is_exact:
        return x == 0
    return abs(float(x)) <= tol * max(1.0, u.norm() * v.norm())


def angle_at(a: Vec2, b: Vec2, c: Vec2) -> float:
    u, v = a - b, c - b
    if u.is_zero() or v.is_zero():
        raise GeometryError("coincident points in angle")
    return math.atan2(abs(float(u.cross(v))), float(u.dot(v)))


def same_angle(a: Vec2, b: Vec2, c: Vec2, a2: Vec2, b2: Vec2, c2: Vec2) -> bool:
    """Exact equality of the angles at b and b2 for rational input.

    An angle in [0, pi] is fixed by its (dot, |cross|) pair up to a positive
    factor, so proportionality of the pairs decides equality.
    """
    u, v, u2, v2 = a - b, c - b, a2 - b2, c2 - b2
    if u.is_zero() or v.is_zero() or u2.is_zero() or v2.is_zero():
        raise GeometryError("coincident points in angle")
    d1, x1 = u.dot(v), abs(u.cross(v))
    d2, x2 = u2.dot(v2), abs(u2.cross(v2))
    exact = all(w.is_exact for w in (u, v, u2, v2))
    if not exact:
        return math.isclose(angle_at(a, b, c), angle_at(a2, b2, c2), abs_tol=1e-12)
    if (d1 > 0) != (d2 > 0) or (d1 < 0) != (d2 < 0):
        return False
    if x1 == 0 or x2 == 0:
        return x1 == x2
    # tan comparison without square roots, d may be zero
    return x1 * d2 == x2 * d1 and (d1 != 0 or d2 == 0)
