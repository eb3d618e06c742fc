from __future__ import annotations

import logging
from fractions import Fraction
from typing import List, Tuple

from src.counterexamples.instance import (
    CertificateTemplate,
    Instance,
    box,
    checked,
    cone_or_fail,
    pick_direction,
    require_unique_answer,
)
from src.geom2d import ConvexPolygon, Vec2, aligned, cones_at_vertex, lmo_cone, qvec
from src.sketch import Mark, nested_spec

log = logging.getLogger(__name__)

SQUARE = box(-1, -1, 1, 1)
# A_0, B_0, C_0, D_0; the iterate cycles through them in this order
BASE: Tuple[Vec2, ...] = (qvec("-1/10", -1), qvec(-1, "1/10"), qvec("1/10", 1), qvec(1, "-1/10"))
# the oracle answer at each of the four vertex tracks
TARGETS: Tuple[Vec2, ...] = (qvec(-1, 1), qvec(1, 1), qvec(1, -1), qvec(-1, -1))
FIXED_POINT = Fraction(20, 101)


def scales(n: int) -> List[Fraction]:
    """λ_0 = 1, λ_{k+1} = 110λ_k / (90 + 101λ_k)."""
    out = [Fraction(1)]
    while len(out) < n:
        lam = out[-1]
        out.append(110 * lam / (90 + 101 * lam))
    return out


def iterate_at(lams: List[Fraction], t: int) -> Vec2:
    return BASE[t % 4] * lams[t]


def _reference(T: int) -> List[Vec2]:
    lams = scales(T + 1)
    return [iterate_at(lams, t) for t in range(T + 1)]


def _check_alignment(lams: List[Fraction], k: int) -> None:
    for j in range(4):
        a, b = BASE[j] * lams[k - 1], BASE[(j + 1) % 4] * lams[k]
        checked(f"track {j} at k-1, track {j + 1} at k and its oracle answer not aligned", aligned(a, b, TARGETS[j]), k)


def gen_ce2(depth: int = 40) -> Instance:
    """Homothetic squares: the iterate circles the inner square with steps bounded below."""
    if depth < 2:
        raise ValueError("depth must be >= 2")
    lams = scales(depth + 1)
    base = ConvexPolygon.hull(BASE)
    polys = [base.scaled(lam) for lam in lams]
    marks: List[Mark] = []
    for k, poly in enumerate(polys):
        if k > 0:
            _check_alignment(lams, k)
        vertex = iterate_at(lams, k)
        target = TARGETS[k % 4]
        _, _, cone = cone_or_fail(lambda: cones_at_vertex(poly, vertex), k)
        if k == 0:
            u = cone_or_fail(lambda: pick_direction(cone, inside=lmo_cone(SQUARE, target)), k)
        else:
            prev = iterate_at(lams, k - 1)
            u = cone_or_fail(lambda: pick_direction(cone, orthogonal_to=vertex - prev), k)
        require_unique_answer(SQUARE, u, target, k)
        marks.append(Mark(k, k, vertex, u))

    spec = nested_spec(polys, box(-2, -2, 2, 2), marks)
    log.info("ce2: %d levels, lambda_depth = %.8g", len(polys), float(lams[-1]))
    return Instance(
        name="ce2",
        C=SQUARE,
        spec=spec,
        strategy="linesearch",
        x0=BASE[0],
        solution_set=base.scaled(FIXED_POINT),
        template=CertificateTemplate(epsilon=0.27, window=1),
        reference=_reference,
        allowed=("linesearch",),
        notes={"lambda_last": lams[-1], "fixed_point": FIXED_POINT},
    )
