from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from src.counterexamples.instance import (
    CertificateTemplate,
    Ce3Strips,
    ConstructionError,
    Instance,
    box,
    checked,
    require_unique_answer,
)
from src.geom2d import ORIGIN, ConeSector, ConvexPolygon, GeometryError, Vec2, aligned, cones_at_vertex, parallel, qvec
from src.sketch import Mark, nested_spec

log = logging.getLogger(__name__)

W = Fraction(61, 35)


@dataclass(frozen=True)
class Ce3Pair:
    """Points of the level pair (2k, 2k + 1)."""

    k: int
    A: Vec2
    B: Vec2
    C: Vec2
    D: Vec2
    D2: Vec2
    C2: Vec2
    Y: Vec2
    Y2: Vec2
    Z: Vec2
    Z2: Vec2

    @property
    def sign(self) -> int:
        return 1 if self.k % 2 == 0 else -1

    def even(self, x: Vec2) -> ConvexPolygon:
        return ConvexPolygon.hull([self.Y, self.A, self.B, self.Z, x])

    def odd(self, x: Vec2) -> ConvexPolygon:
        return ConvexPolygon.hull([self.Y2, self.D2, self.D, self.C, self.C2, self.Z2, x])


def low_point(j: int) -> Vec2:
    """X_j = (0, −1 − 1/(j+1)), the bottom vertex of level j."""
    return Vec2(Fraction(0), -1 - Fraction(1, j + 1))


def pair(K: int, k: int) -> Ce3Pair:
    s = Fraction(2) ** (K - k - 1)
    sgn = 1 if k % 2 == 0 else -1
    # left/right as seen at even k; odd k mirrors
    lo, hi = -sgn, sgn
    half_k = Fraction(1, 2**k)
    if k % 2 == 0:
        y = -W * (1 + half_k)
        z = W * (1 + half_k)
    else:
        y = -W * (1 + Fraction(17, 16) * Fraction(8, 9) * half_k)
        z = W * (1 + Fraction(9, 8) * Fraction(16, 17) * half_k)
    return Ce3Pair(
        k=k,
        A=Vec2(lo * W, Fraction(9, 8) * W * s),
        B=Vec2(hi * W, Fraction(17, 16) * W * s),
        C=Vec2(Fraction(hi), Fraction(17, 16) * s),
        D=Vec2(Fraction(lo), Fraction(9, 8) * s),
        D2=Vec2(lo * W, s),
        C2=Vec2(hi * W, s),
        Y=Vec2(y, Fraction(0)),
        Y2=Vec2(-W - Fraction(8, 9) * half_k, Fraction(0)),
        Z=Vec2(z, Fraction(0)),
        Z2=Vec2(W + Fraction(16, 17) * half_k, Fraction(0)),
    )


def sign_quadrant(k: int) -> ConeSector:
    """Open quadrant of directions with ⟨e2, u⟩ > 0 and (−1)^k⟨e1, u⟩ > 0."""
    start = 0.0 if k % 2 == 0 else math.pi / 2
    return ConeSector.from_angles(start, math.pi / 2)


def _shared_direction(k: int, cones: List[ConeSector]) -> Vec2:
    s: Optional[ConeSector] = sign_quadrant(k)
    for c in cones:
        s = s.intersect(c) if s is not None else None
    if s is None or s.angle <= 0.0:
        raise ConstructionError(f"sign constraint unsatisfiable at k={k}")
    return s.midpoint()


def _check_pair(p: Ce3Pair) -> None:
    checked("lines (A B) and (C D) not parallel", parallel(p.A, p.B, p.C, p.D), p.k)
    checked("0, D, A not aligned", aligned(ORIGIN, p.D, p.A), p.k)
    checked("0, C, B not aligned", aligned(ORIGIN, p.C, p.B), p.k)


def gen_ce3(K: int = 2, depth: int = 40) -> Instance:
    """Closed-loop steps on a tall box; the iterate keeps drifting sideways by at least 3/26."""
    if K < 1:
        raise ValueError("K must be >= 1")
    if depth < 4:
        raise ValueError("depth must be >= 4")
    C = box(-1, 0, 1, 2**K)
    polys: List[ConvexPolygon] = []
    marks: List[Mark] = []
    n_pairs = depth // 2 + 1
    for k in range(n_pairs):
        p = pair(K, k)
        _check_pair(p)
        even = p.even(low_point(2 * k))
        has_odd = 2 * k + 1 <= depth
        odd = p.odd(low_point(2 * k + 1)) if has_odd else None
        try:
            cones_a = [cones_at_vertex(even, p.A)[2]]
            cones_b = [cones_at_vertex(even, p.B)[2]]
            if odd is not None:
                cones_a.append(cones_at_vertex(odd, p.D)[2])
                cones_b.append(cones_at_vertex(odd, p.C)[2])
        except GeometryError as e:
            raise ConstructionError(f"sign constraint unsatisfiable at k={k}: {e}") from e
        u_a = _shared_direction(k, cones_a)
        u_b = _shared_direction(k, cones_b)
        target = qvec(-p.sign, 0)
        require_unique_answer(C, u_a, target, k)
        require_unique_answer(C, u_b, target, k)
        base = 4 * k
        polys.append(even)
        marks += [Mark(base, 2 * k, p.A, u_a), Mark(base + 1, 2 * k, p.B, u_b)]
        if odd is not None:
            polys.append(odd)
            marks += [Mark(base + 2, 2 * k + 1, p.D, u_a), Mark(base + 3, 2 * k + 1, p.C, u_b)]

    top = max(Fraction(2**K), polys[0].support(Vec2(Fraction(0), Fraction(1))))
    reach = 2 * W + 1
    domain = box(-reach, -3, reach, top + 1)
    spec = nested_spec(polys, domain, marks)
    first = pair(K, 0)
    log.info("ce3: K=%d, %d levels, %d marks", K, len(polys), len(marks))
    return Instance(
        name="ce3",
        C=C,
        spec=spec,
        strategy="closed",
        x0=first.D,
        solution_set=ConvexPolygon.segment(qvec(-1, 0), qvec(1, 0)),
        template=CertificateTemplate(epsilon=0.05, window_fraction=0.5, min_displacements=10),
        strips=Ce3Strips.build(K, n_pairs),
        allowed=("closed",),
        notes={"K": K, "levels": len(polys)},
    )
