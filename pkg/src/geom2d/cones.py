from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

from src.geom2d.polygon import ConvexPolygon
from src.geom2d.vec import GeometryError, Vec2, unit_at

TWO_PI = 2.0 * math.pi
ANGLE_TOL = 1e-12


def _wrap(theta: float) -> float:
    t = math.fmod(theta, TWO_PI)
    return t + TWO_PI if t < 0 else t


@dataclass(frozen=True)
class ConeSector:
    """Closed sector swept counterclockwise from `lo` to `hi`.

    `angle` = 2*pi is the whole plane, `angle` = 0 a single ray.
    """

    lo: Vec2
    hi: Vec2
    angle: float

    @classmethod
    def from_rays(cls, lo: Vec2, hi: Vec2) -> "ConeSector":
        a, b = lo.unit(), hi.unit()
        sweep = _wrap(b.angle() - a.angle())
        if sweep > TWO_PI - ANGLE_TOL:
            sweep = 0.0
        return cls(a, b, sweep)

    @classmethod
    def from_angles(cls, start: float, sweep: float) -> "ConeSector":
        if sweep < 0:
            raise GeometryError("negative sector sweep")
        if sweep >= TWO_PI:
            u = unit_at(start)
            return cls(u, u, TWO_PI)
        return cls(unit_at(start), unit_at(start + sweep), sweep)

    @classmethod
    def full(cls) -> "ConeSector":
        return cls.from_angles(0.0, TWO_PI)

    @property
    def start(self) -> float:
        return self.lo.angle()

    def offset_of(self, u: Vec2) -> float:
        return _wrap(u.angle() - self.start)

    def contains(self, u: Vec2, tol: float = ANGLE_TOL) -> bool:
        if u.is_zero():
            return False
        if self.angle >= TWO_PI:
            return True
        w = u.unit()
        if self.angle == 0.0:
            return (w - self.lo).norm() <= tol
        if self.angle < math.pi:
            # cross-product sign tests; the bisector test rules out the antipodal side
            return (
                float(self.lo.cross(w)) >= -tol
                and float(w.cross(self.hi)) >= -tol
                and float(self.midpoint().dot(w)) > 0.0
            )
        d = self.offset_of(u)
        return d <= self.angle + tol or d >= TWO_PI - tol

    def contains_interior(self, u: Vec2, margin: float = ANGLE_TOL) -> bool:
        if u.is_zero() or self.angle <= 2 * margin:
            return False
        if self.angle >= TWO_PI:
            return True
        d = self.offset_of(u)
        return margin < d < self.angle - margin

    def midpoint(self) -> Vec2:
        return unit_at(self.start + self.angle / 2.0)

    def negated(self) -> "ConeSector":
        return ConeSector(-self.lo, -self.hi, self.angle)

    def intersect(self, other: "ConeSector") -> Optional["ConeSector"]:
        if self.angle >= TWO_PI:
            return other
        if other.angle >= TWO_PI:
            return self
        d = self.offset_of(other.lo)
        pieces = []
        if d <= self.angle + ANGLE_TOL:
            pieces.append((d, min(self.angle, d + other.angle)))
        if d + other.angle >= TWO_PI - ANGLE_TOL:
            pieces.append((0.0, min(self.angle, d + other.angle - TWO_PI)))
        pieces = [(a, b) for a, b in pieces if b >= a - ANGLE_TOL]
        if not pieces:
            return None
        a, b = max(pieces, key=lambda ab: ab[1] - ab[0])
        return ConeSector.from_angles(self.start + a, max(0.0, b - a))

    def contains_sector(self, other: "ConeSector", tol: float = 1e-9) -> bool:
        if self.angle >= TWO_PI:
            return True
        d = self.offset_of(other.lo)
        if d > TWO_PI - tol:
            d = 0.0
        return d + other.angle <= self.angle + tol

    def to_dict(self) -> Dict[str, Any]:
        return {"lo": list(self.lo.to_tuple()), "hi": list(self.hi.to_tuple()), "angle": self.angle}


def _outward(a: Vec2, b: Vec2) -> Vec2:
    e = b - a
    return Vec2(e.y, -e.x)


def cones_at_vertex(p: ConvexPolygon, v: Vec2) -> Tuple[ConeSector, ConeSector, ConeSector]:
    """Normal cone N, tangent cone T and admissible cone K = N ∩ (−T) of p at vertex v."""
    if p.degenerate:
        raise GeometryError("not a vertex: polygon is degenerate")
    i = p.index_of(v)
    if i is None:
        raise GeometryError(f"not a vertex: {v.to_tuple()}")
    prev, cur, nxt = p.vertex(i - 1), p.vertex(i), p.vertex(i + 1)
    n = ConeSector.from_rays(_outward(prev, cur), _outward(cur, nxt))
    t = ConeSector.from_rays(nxt - cur, prev - cur)
    k = n.intersect(t.negated())
    if k is None:
        raise GeometryError("empty admissible cone")
    return n, t, k


def lmo_cone(c: ConvexPolygon, v: Vec2) -> ConeSector:
    n, _, _ = cones_at_vertex(c, v)
    return n.negated()


def normal_cone_polar_check(p: ConvexPolygon, v: Vec2, u: Vec2, strict: bool = True) -> bool:
    for y in p.vertices:
        if y == v:
            continue
        s = float((y - v).dot(u))
        if s > 0 or (strict and s == 0):
            return False
    return True
