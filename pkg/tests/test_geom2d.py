import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from src.geom2d import (
    ORIGIN,
    Body,
    ConeSector,
    ConvexPolygon,
    GeometryError,
    OffsetLimitError,
    Vec2,
    aligned,
    angle_at,
    cones_at_vertex,
    convex_hull,
    hausdorff,
    lmo_cone,
    minkowski_combination,
    nesting_margin,
    nesting_sup,
    normal_cone_polar_check,
    offset_limit,
    qvec,
    rounded_body,
    rounding_bound,
    same_angle,
    unit_at,
)

SQUARE = ConvexPolygon.box(Fraction(-1), Fraction(-1), Fraction(1), Fraction(1))


def test_hull_drops_interior_and_collinear_points():
    pts = [qvec(-1, -1), qvec(1, -1), qvec(1, 1), qvec(-1, 1), qvec(0, 0), qvec(0, -1), qvec(1, 1)]
    h = convex_hull(pts)
    assert len(h) == 4
    assert set(h) == {qvec(-1, -1), qvec(1, -1), qvec(1, 1), qvec(-1, 1)}
    assert all(v.is_exact for v in h)


def test_clockwise_polygon_rejected():
    with pytest.raises(GeometryError):
        ConvexPolygon((qvec(0, 0), qvec(0, 1), qvec(1, 0)))


def test_support_containment_distance():
    assert SQUARE.support(qvec(1, 1)) == 2
    assert SQUARE.contains(ORIGIN, strict=True)
    assert SQUARE.contains(qvec(1, 0))
    assert not SQUARE.contains(qvec(1, 0), strict=True)
    assert SQUARE.distance_to(qvec(3, 0)) == pytest.approx(2.0)
    assert SQUARE.diameter() == pytest.approx(2 * math.sqrt(2))
    with pytest.raises(GeometryError, match="degenerate direction"):
        SQUARE.support(ORIGIN)


def test_polygon_json_keeps_rationals():
    p = ConvexPolygon.hull([qvec("1/3", 0), qvec(0, "2/7"), qvec("-1/3", 0), qvec(0, -1)])
    back = ConvexPolygon.from_dict(p.to_dict())
    assert back == p


def test_minkowski_of_homothets_is_homothet():
    inner = Body.of(SQUARE.scaled(Fraction(1, 2)))
    mid = minkowski_combination(Body.of(SQUARE), inner, Fraction(1, 2), Fraction(1, 2))
    assert mid.core.n == 4
    assert mid.support(qvec(1, 0)) == Fraction(3, 4)
    assert mid.support(qvec(1, 1)) == Fraction(3, 2)


def test_empty_combination_rejected():
    with pytest.raises(GeometryError, match="empty combination"):
        minkowski_combination(Body.of(SQUARE), Body.of(SQUARE), 0, 0)


def test_nesting_sup_of_nested_squares():
    assert nesting_sup(SQUARE, SQUARE.scaled(Fraction(1, 2))) == 1
    assert nesting_sup(SQUARE.scaled(Fraction(1, 2)), SQUARE) == Fraction(-1, 2)
    assert nesting_margin(SQUARE, SQUARE.scaled(Fraction(1, 2))) >= 0.999


def test_nesting_needs_interior_origin():
    off = ConvexPolygon.box(Fraction(1), Fraction(1), Fraction(2), Fraction(2))
    with pytest.raises(GeometryError, match="origin not interior"):
        nesting_sup(SQUARE, off)


def test_cones_at_square_corner():
    n, t, k = cones_at_vertex(SQUARE, qvec(1, 1))
    assert n.angle == pytest.approx(math.pi / 2)
    assert n.contains(Vec2(1.0, 1.0))
    assert not n.contains(Vec2(-1.0, 0.2))
    assert k.contains(Vec2(1.0, 1.0))
    with pytest.raises(GeometryError, match="not a vertex"):
        cones_at_vertex(SQUARE, ORIGIN)


def test_lmo_cone_matches_brute_force():
    c = lmo_cone(SQUARE, qvec(-1, -1))
    u = c.midpoint()
    assert c.contains(Vec2(1.0, 1.0))
    assert normal_cone_polar_check(SQUARE, qvec(-1, -1), -u)


def test_sector_intersection():
    a = ConeSector.from_angles(0.0, math.pi / 2)
    b = ConeSector.from_angles(math.pi / 4, math.pi)
    s = a.intersect(b)
    assert s is not None
    assert s.angle == pytest.approx(math.pi / 4)
    assert ConeSector.from_angles(0.0, 0.5).intersect(ConeSector.from_angles(2.0, 0.5)) is None


def test_exact_angle_and_alignment():
    a, b, c = qvec(0, 0), qvec(1, 0), qvec(1, 1)
    assert same_angle(a, b, c, a * 3, b * 3, c * 3)
    assert not same_angle(a, b, c, a, b, qvec(2, 1))
    assert aligned(qvec(0, 0), qvec(1, 1), qvec("5/2", "5/2"))
    assert not aligned(qvec(0, 0), qvec(1, 1), qvec(2, 1))


def test_rounded_square_keeps_support_and_bound():
    r = 0.1
    body = rounded_body(SQUARE, r)
    assert float(body.support(Vec2(1.0, 0.0))) == pytest.approx(1.0, abs=1e-12)
    assert hausdorff(body, Body.of(SQUARE.to_float())) <= rounding_bound(SQUARE, r) + 1e-12


def test_pinned_vertex_stays_on_boundary():
    u = Vec2(2.0, 1.0).unit()
    body = rounded_body(SQUARE, 0.05, {2: u})
    p = body.boundary_point(u)
    assert p.x == pytest.approx(1.0, abs=1e-12)
    assert p.y == pytest.approx(1.0, abs=1e-12)


def test_offset_limit_exceeded():
    limit = offset_limit(SQUARE)
    assert limit == pytest.approx(1.0)
    with pytest.raises(OffsetLimitError, match="rounding radius exceeds offset limit"):
        rounded_body(SQUARE, 2.0)


def test_zero_direction_has_no_unit():
    with pytest.raises(GeometryError, match="degenerate direction"):
        ORIGIN.unit()


def test_angle_at():
    assert angle_at(qvec(1, 0), ORIGIN, qvec(0, 2)) == pytest.approx(math.pi / 2)
    assert angle_at(qvec(1, 0), ORIGIN, qvec(-1, 0)) == pytest.approx(math.pi)
    with pytest.raises(GeometryError, match="coincident"):
        angle_at(ORIGIN, ORIGIN, qvec(1, 0))


# first level of the triangle construction; C_0 = (1/4, 3/4)
P0 = ConvexPolygon.hull([qvec("-1/2", 0), qvec("-1/4", "3/4"), qvec("1/4", "3/4"), qvec("1/2", 0), qvec("1/4", "-3/4"), qvec("-1/4", "-3/4")])
KITE = ConvexPolygon.hull([qvec(-2, "1/4"), qvec(-1, 0), qvec(0, 1), qvec(1, 0)])


def test_cones_at_hexagon_corner():
    n, _, k = cones_at_vertex(P0, qvec("1/4", "3/4"))
    assert n.lo.to_tuple() == pytest.approx((3 / math.sqrt(10), 1 / math.sqrt(10)))
    assert n.hi.to_tuple() == pytest.approx((0.0, 1.0))
    assert k.angle == pytest.approx(n.angle)
    assert k.lo.to_tuple() == pytest.approx(n.lo.to_tuple())


@pytest.mark.parametrize("poly", [SQUARE, P0, KITE], ids=["square", "hexagon", "kite"])
def test_admissible_cone_inside_normal_cone(poly):
    for v in poly.vertices:
        n, _, k = cones_at_vertex(poly, v)
        assert n.contains_sector(k)
        for frac in np.linspace(0.05, 0.95, 7):
            u = unit_at(k.start + float(frac) * k.angle)
            assert normal_cone_polar_check(poly, v, u, strict=True)


def test_combination_support_is_linear():
    a = Body.of(SQUARE)
    b = Body(ConvexPolygon.hull([qvec(-1, 0), qvec(1, 0), qvec(0, 1)]), Fraction(1, 10))
    alpha, beta = Fraction(3, 10), Fraction(17, 10)
    mix = minkowski_combination(a, b, alpha, beta)
    rng = np.random.default_rng(7)
    for theta in rng.uniform(0.0, 2 * math.pi, size=1000):
        u = unit_at(float(theta))
        expected = float(alpha) * float(a.support(u)) + float(beta) * float(b.support(u))
        assert float(mix.support(u)) == pytest.approx(expected, abs=1e-10)


def test_hausdorff_of_nested_squares():
    # the corner (2, 2) is sqrt(2) away from the inner square; axis directions only see 1
    assert hausdorff(Body.of(SQUARE), Body.of(SQUARE.scaled(2))) == pytest.approx(math.sqrt(2), abs=1e-12)
    assert hausdorff(Body.of(SQUARE), Body.of(SQUARE)) == 0.0


@pytest.mark.parametrize(
    "pts,expected",
    [
        ((qvec(0, 0), qvec(1, 1), qvec(2, 2)), True),
        ((qvec("-1/4", "3/4"), qvec("1/4", "9/20"), qvec(1, 0)), True),
        ((qvec(0, 0), qvec(1, 0), qvec(1, 1)), False),
        ((Vec2(0.0, 0.0), Vec2(0.1, 0.3), Vec2(0.3, 0.9)), True),
    ],
)
def test_aligned_ignores_argument_order(pts, expected):
    assert {aligned(*perm) for perm in itertools.permutations(pts)} == {expected}
