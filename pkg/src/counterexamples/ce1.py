from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List

from src.counterexamples.instance import (
    CertificateTemplate,
    Instance,
    box,
    checked,
    cone_or_fail,
    pick_direction,
    require_unique_answer,
)
from src.geom2d import ConvexPolygon, Vec2, aligned, cones_at_vertex, lmo_cone, qvec, same_angle
from src.sketch import Mark, nested_spec

log = logging.getLogger(__name__)

TRIANGLE = ConvexPolygon((qvec(-1, 0), qvec(1, 0), qvec(0, 1)))
LEFT, RIGHT = qvec(-1, 0), qvec(1, 0)
SHRINK = Fraction(3, 5)


@dataclass(frozen=True)
class Ce1Level:
    A: Vec2
    B: Vec2
    C: Vec2
    D: Vec2

    def polygon(self) -> ConvexPolygon:
        # A = −D, so the listed octagon is a hexagon
        return ConvexPolygon.hull([self.A, self.B, self.C, self.D, -self.A, -self.B, -self.C, -self.D])


def levels(n: int) -> List[Ce1Level]:
    """A_k, B_k, C_k, D_k for k < n, exact."""
    out = [Ce1Level(qvec("-1/2", 0), qvec("-1/4", "3/4"), qvec("1/4", "3/4"), qvec("1/2", 0))]
    quarter = Fraction(1, 4)
    while len(out) < n:
        p = out[-1]
        b = Vec2(-quarter, SHRINK * p.C.y)
        c = Vec2(quarter, SHRINK * p.B.y)
        a = Vec2(-quarter + (b.y / p.B.y) * (p.A.x + quarter), Fraction(0))
        d = Vec2(quarter + (c.y / p.C.y) * (p.D.x - quarter), Fraction(0))
        out.append(Ce1Level(a, b, c, d))
    return out


def iterate_at(lv: List[Ce1Level], t: int) -> Vec2:
    return lv[t].C if t % 2 == 0 else lv[t].B


def _reference(T: int) -> List[Vec2]:
    lv = levels(T + 1)
    return [iterate_at(lv, t) for t in range(T + 1)]


def _check_level(lv: List[Ce1Level], k: int) -> None:
    if k == 0:
        return
    p, c = lv[k - 1], lv[k]
    checked("B_{k-1}, C_k, (1,0) not aligned", aligned(p.B, c.C, RIGHT), k)
    checked("C_{k-1}, B_k, (-1,0) not aligned", aligned(p.C, c.B, LEFT), k)
    z = lv[0]
    checked("angle at B changed", same_angle(c.A, c.B, c.C, z.A, z.B, z.C), k)
    checked("angle at C changed", same_angle(c.B, c.C, c.D, z.B, z.C, z.D), k)


def gen_ce1(depth: int = 40) -> Instance:
    """Line search on the triangle: iterates alternate between abscissae ±1/4."""
    if depth < 2:
        raise ValueError("depth must be >= 2")
    lv = levels(depth + 1)
    polys = [x.polygon() for x in lv]
    marks: List[Mark] = []
    for k, (x, poly) in enumerate(zip(lv, polys)):
        _check_level(lv, k)
        vertex = iterate_at(lv, k)
        target = LEFT if k % 2 == 0 else RIGHT
        _, _, cone = cone_or_fail(lambda: cones_at_vertex(poly, vertex), k)
        if k == 0:
            u = cone_or_fail(lambda: pick_direction(cone, inside=lmo_cone(TRIANGLE, target)), k)
        else:
            prev = iterate_at(lv, k - 1)
            u = cone_or_fail(lambda: pick_direction(cone, orthogonal_to=vertex - prev), k)
        require_unique_answer(TRIANGLE, u, target, k)
        marks.append(Mark(k, k, vertex, u))

    spec = nested_spec(polys, box(-2, -2, 2, 2), marks)
    log.info("ce1: %d levels, A_depth.x = %.6g", len(polys), float(lv[-1].A.x))
    return Instance(
        name="ce1",
        C=TRIANGLE,
        spec=spec,
        strategy="linesearch",
        x0=lv[0].C,
        solution_set=ConvexPolygon.segment(qvec("-1/4", 0), qvec("1/4", 0)),
        template=CertificateTemplate(epsilon=0.4, window=2),
        reference=_reference,
        allowed=("linesearch",),
        notes={"levels": len(polys)},
    )
