from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

from src.counterexamples.instance import (
    CertificateTemplate,
    Instance,
    box,
    cone_or_fail,
    pick_direction,
    require_unique_answer,
)
from src.fw import open_loop_gamma
from src.geom2d import ConvexPolygon, Vec2, cones_at_vertex, lmo_cone, qvec
from src.sketch import Mark, nested_spec

log = logging.getLogger(__name__)

KITE = ConvexPolygon.hull([qvec(-2, "1/4"), qvec(-1, 0), qvec(0, 1), qvec(1, 0)])
BAND = Fraction(1, 4)
OPEN_KINDS = ("open1", "open2")


@dataclass(frozen=True)
class Ce4Track:
    """B_k and the vertex V_k it is heading to."""

    B: Tuple[Vec2, ...]
    V: Tuple[Vec2, ...]
    flips: Tuple[int, ...]


def track(kind: str, n: int) -> Ce4Track:
    """B_0..B_{n−1}; V flips sign each time B leaves the band |x| <= 1/4."""
    if kind not in OPEN_KINDS:
        raise ValueError(f"{kind} is not an open-loop strategy")
    bs: List[Vec2] = [qvec(0, 1)]
    vs: List[Vec2] = [qvec(-2, "1/4")]
    flips: List[int] = []
    if n > 1:
        bs.append(vs[0])
        vs.append(qvec(1, 0))
    while len(bs) < n:
        k = len(bs) - 1
        g = open_loop_gamma(kind, k)
        b = bs[k] * (1 - g) + vs[k] * g
        bs.append(b)
        if abs(b.x) > BAND and abs(bs[k].x) <= BAND:
            vs.append(-vs[k])
            flips.append(k + 1)
        else:
            vs.append(vs[k])
    return Ce4Track(tuple(bs), tuple(vs[:n]), tuple(flips))


def side_points(k: int) -> Tuple[Vec2, Vec2]:
    a = Vec2(-2 - Fraction(1, k + 1), Fraction(0))
    # C_0 = (3, 0): with (2, 0) the reflection −B_1 = (2, −1/4) leaves P_0
    c = qvec(3, 0) if k == 0 else Vec2(1 + Fraction(1, k + 1), Fraction(0))
    return a, c


def level(k: int, b: Vec2) -> ConvexPolygon:
    a, c = side_points(k)
    return ConvexPolygon.hull([a, b, c, -b])


def gen_ce4(strategy: str = "open2", depth: int = 40) -> Instance:
    """Open-loop steps on a kite: B_k keeps crossing the band |x| <= 1/4."""
    if depth < 2:
        raise ValueError("depth must be >= 2")
    tr = track(strategy, depth + 1)
    polys = [level(k, b) for k, b in enumerate(tr.B)]
    marks: List[Mark] = []
    for k, (poly, b, v) in enumerate(zip(polys, tr.B, tr.V)):
        _, _, cone = cone_or_fail(lambda: cones_at_vertex(poly, b), k)
        u = cone_or_fail(lambda: pick_direction(cone, inside=lmo_cone(KITE, v)), k)
        require_unique_answer(KITE, u, v, k)
        marks.append(Mark(k, k, b, u))

    spec = nested_spec(polys, box(-4, -2, 4, 2), marks)
    log.info("ce4 (%s): %d levels, %d flips of V up to the depth", strategy, len(polys), len(tr.flips))

    def reference(T: int) -> List[Vec2]:
        return list(track(strategy, T + 1).B)

    return Instance(
        name="ce4",
        C=KITE,
        spec=spec,
        strategy=strategy,
        x0=tr.B[0],
        solution_set=ConvexPolygon.segment(qvec(-1, 0), qvec(1, 0)),
        template=CertificateTemplate(epsilon=0.25, window_fraction=0.5),
        reference=reference,
        allowed=OPEN_KINDS,
        notes={"flips": list(tr.flips)},
    )
