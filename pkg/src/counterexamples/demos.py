from __future__ import annotations

import logging
from fractions import Fraction
from typing import List, Optional

from src.counterexamples.ce4 import KITE
from src.counterexamples.instance import CertificateTemplate, ConstructionError, Instance
from src.fw import LmoPolicy, doubling_blocks, open_loop_gamma
from src.geom2d import ConvexPolygon, Vec2, qvec

log = logging.getLogger(__name__)

UNIT_SEGMENT = ConvexPolygon.segment(qvec(0, 0), qvec(1, 0))
SOLUTION = ConvexPolygon.segment(qvec("-1/2", 0), qvec("1/2", 0))

DOUBLING = LmoPolicy("scripted", script=doubling_blocks, label="doubling-blocks")
ADVERSARIAL = LmoPolicy("adversarial", label="closest-to-previous")


def _zero_reference(T: int) -> List[Vec2]:
    xs = [qvec("1/2", 0)]
    for t in range(T):
        g = open_loop_gamma("open1", t)
        v = UNIT_SEGMENT.vertex(doubling_blocks(t))
        xs.append(xs[-1] * (1 - g) + v * g)
    return xs


def _project(x: Vec2) -> Vec2:
    a, b = SOLUTION.vertex(0), SOLUTION.vertex(1)
    e = b - a
    t = min(Fraction(1), max(Fraction(0), (x - a).dot(e) / e.dot(e)))
    return a + e * t


def _exact_lmo(c: ConvexPolygon, u: Vec2, previous: Optional[Vec2]) -> Vec2:
    vals = [v.dot(u) for v in c.vertices]
    best = min(vals)
    ties = [v for v, s in zip(c.vertices, vals) if s == best]
    if previous is not None and len(ties) > 1:
        return min(ties, key=lambda v: ((v - previous).norm2(), v.lex_key()))
    return min(ties, key=lambda v: v.lex_key())


def _distance_reference(T: int, L: Fraction = Fraction(2)) -> List[Vec2]:
    """Closed-loop steps with the history-dependent oracle, in exact arithmetic."""
    x = qvec(0, 1)
    xs = [x]
    previous: Optional[Vec2] = None
    for _ in range(T):
        g = (x - _project(x)) * 2
        v = _exact_lmo(KITE, g, previous)
        d = x - v
        dd = d.norm2()
        if dd == 0:
            raise ConstructionError("degenerate direction")
        gamma = min(max(Fraction(0), d.dot(g)) / (L * dd), Fraction(1))
        x = x * (1 - gamma) + v * gamma
        xs.append(x)
        previous = v
    return xs


def gen_mis_demos() -> List[Instance]:
    """Two misspecified-oracle demos: f = 0 on [0, 1], and dist(., S)^2 over the kite."""
    zero = Instance(
        name="misA",
        C=UNIT_SEGMENT,
        spec=None,
        strategy="open1",
        x0=qvec("1/2", 0),
        solution_set=UNIT_SEGMENT,
        template=CertificateTemplate(epsilon=0.1, window_fraction=0.8),
        reference=_zero_reference,
        oracle=DOUBLING,
        objective_kind="zero",
        demo=True,
        notes={"description": "misspecification demo"},
    )
    distance = Instance(
        name="misB",
        C=KITE,
        spec=None,
        strategy="closed",
        x0=qvec(0, 1),
        solution_set=SOLUTION,
        template=CertificateTemplate(epsilon=0.1, window_fraction=0.5, reference_steps=8),
        reference=_distance_reference,
        oracle=ADVERSARIAL,
        objective_kind="segment_distance",
        L=2.0,
        demo=True,
        notes={"description": "misspecification demo"},
    )
    log.info("misspecification demos ready: %s, %s", zero.name, distance.name)
    return [zero, distance]
