import math
from fractions import Fraction

import numpy as np
import pytest

from src.analysis import band_crossings
from src.counterexamples import (
    ConstructionError,
    Ce3Strips,
    gen_ce1,
    gen_ce2,
    gen_ce3,
    gen_ce4,
    gen_mis_demos,
    generate,
    pick_direction,
    reference_trajectory,
    strategy_allowed,
)
from src.counterexamples.ce1 import levels
from src.counterexamples.ce2 import FIXED_POINT, scales
from src.counterexamples.ce3 import W, pair
from src.counterexamples.ce4 import KITE, track
from src.fw import minimizer_set
from src.geom2d import ORIGIN, ConeSector, Vec2, aligned, parallel, qvec
from src.sketch import validate_sketch


def test_ce1_level_one_vertices():
    lv = levels(2)
    assert lv[1].B == qvec("-1/4", "9/20")
    assert lv[1].C == qvec("1/4", "9/20")
    assert lv[1].A == qvec("-2/5", 0)
    assert lv[1].D == qvec("2/5", 0)
    assert aligned(lv[0].C, lv[1].B, qvec(-1, 0))


def test_ce1_reference_alternates_abscissa():
    inst = gen_ce1(depth=6)
    xs = reference_trajectory(inst, 4)
    assert [x.x for x in xs] == [Fraction(1, 4), Fraction(-1, 4), Fraction(1, 4), Fraction(-1, 4), Fraction(1, 4)]
    assert validate_sketch(inst.spec).passed
    assert inst.faithful_horizon(100) == 6


def test_ce1_marks_are_unique_oracle_answers():
    inst = gen_ce1(depth=5)
    for m in inst.spec.marks:
        target = qvec(-1, 0) if m.k % 2 == 0 else qvec(1, 0)
        assert minimizer_set(inst.C, m.u) == [inst.C.index_of(target)]


def test_ce2_scales_and_fixed_point():
    lams = scales(3)
    assert lams[1] == Fraction(110, 191)
    assert lams[2] == Fraction(121, 283)
    assert 110 * FIXED_POINT / (90 + 101 * FIXED_POINT) == FIXED_POINT
    lams = scales(30)
    assert all(a > b for a, b in zip(lams, lams[1:]))
    assert all(abs(a - FIXED_POINT) > abs(b - FIXED_POINT) for a, b in zip(lams, lams[1:]))


def test_ce2_reference_cycles_and_keeps_moving():
    inst = gen_ce2(depth=8)
    assert validate_sketch(inst.spec).passed
    xs = reference_trajectory(inst, 8)
    lams = scales(9)
    assert xs[0] == qvec("-1/10", -1)
    assert xs[1] == qvec(-1, "1/10") * lams[1]
    assert xs[4] == qvec("-1/10", -1) * lams[4]
    assert min((b - a).norm() for a, b in zip(xs, xs[1:])) >= 0.28


def test_ce3_coordinates_for_K2():
    p = pair(2, 0)
    assert p.A == Vec2(-W, Fraction(9, 4) * W)
    assert float(p.A.y) == pytest.approx(3.9214, abs=1e-4)
    assert p.Z2 == Vec2(W + Fraction(16, 17), Fraction(0))
    for k in range(4):
        q = pair(2, k)
        assert parallel(q.A, q.B, q.C, q.D)
        assert aligned(ORIGIN, q.D, q.A)
        assert aligned(ORIGIN, q.C, q.B)


def test_ce3_instance_has_no_reference():
    inst = gen_ce3(K=2, depth=4)
    assert validate_sketch(inst.spec).passed
    assert inst.C.contains(inst.x0)
    assert inst.allowed == ("closed",)
    assert isinstance(inst.strips, Ce3Strips)
    with pytest.raises(ConstructionError, match="no closed-form reference"):
        reference_trajectory(inst, 5)


def test_ce3_strips_alternate_sides():
    strips = Ce3Strips.build(2, 3)
    assert strips.level(0).target == qvec(-1, 0)
    assert strips.level(1).target == qvec(1, 0)
    s = strips.level(0)
    assert s.E == qvec(-1, "7/2") and s.H == qvec(-1, "5/2")


def test_ce4_open2_start():
    inst = gen_ce4("open2", depth=6)
    assert reference_trajectory(inst, 2) == [qvec(0, 1), qvec(-2, "1/4"), qvec(0, "1/12")]
    assert validate_sketch(inst.spec).passed


@pytest.mark.parametrize("kind,minimum", [("open1", 5), ("open2", 5)])
def test_ce4_band_keeps_being_crossed(kind, minimum):
    tr = track(kind, 2001)
    assert len(tr.flips) >= minimum
    assert all(b.y > 0 for b in tr.B)
    assert any(b.x <= Fraction(-1, 4) for b in tr.B[100:])
    assert any(b.x >= Fraction(1, 4) for b in tr.B[100:])
    assert all(v in KITE.vertices or -v in KITE.vertices for v in tr.V)


def test_demo_gradients_and_reference():
    mis_a, mis_b = gen_mis_demos()
    obj = mis_b.make_objective()
    assert obj.value_and_gradient(Vec2(0.0, 1.0)).grad.tolist() == pytest.approx([0.0, 2.0])
    assert obj.value_and_gradient(Vec2(0.25, 0.0)).grad.tolist() == pytest.approx([0.0, 0.0])
    xs = reference_trajectory(mis_a, 6)
    assert all(0 <= x.x <= 1 for x in xs)
    assert mis_a.demo and mis_b.demo


def test_generate_by_name_and_strategy_table():
    assert generate("ce4", depth=4, strategy="open1").strategy == "open1"
    assert generate("misA").name == "misA"
    assert strategy_allowed("1", "linesearch")
    assert not strategy_allowed("1", "open1")
    assert strategy_allowed("misB", "open2")
    with pytest.raises(ConstructionError, match="unknown instance"):
        generate("7")


def test_pick_direction_rules():
    quadrant = ConeSector.from_angles(0.0, math.pi / 2)
    u = pick_direction(quadrant, orthogonal_to=qvec(1, -1))
    assert u.to_tuple() == pytest.approx((math.sqrt(0.5), math.sqrt(0.5)))
    half = ConeSector.from_angles(0.0, math.pi / 4)
    assert pick_direction(quadrant, inside=half).angle() == pytest.approx(math.pi / 8)
    with pytest.raises(ConstructionError):
        pick_direction(quadrant, orthogonal_to=qvec(1, 1))


def test_pick_direction_ce1_first_constraint():
    k = ConeSector.from_rays(Vec2(3.0, 1.0), Vec2(0.0, 1.0))
    u = pick_direction(k, orthogonal_to=qvec("1/2", "-3/10"))
    assert u.to_tuple() == pytest.approx((3 / math.sqrt(34), 5 / math.sqrt(34)))


def test_instance_json_has_rational_strings():
    d = gen_ce2(depth=3).to_dict()
    assert d["x0"] == ["-1/10", "-1"]
    assert d["notes"]["fixed_point"] == "20/101"
    assert d["template"]["epsilon"] == 0.27


def test_ce1_reference_over_a_thousand_steps():
    xs = reference_trajectory(gen_ce1(depth=4), 1000)
    assert len(xs) == 1001
    assert all(x.x == Fraction((-1) ** t, 4) for t, x in enumerate(xs))


def test_ce2_scales_reach_the_fixed_point():
    lams = scales(201)
    assert abs(lams[200] - FIXED_POINT) <= Fraction(1, 10**12)
    assert lams[200] > FIXED_POINT


@pytest.mark.parametrize(
    "make,first",
    [
        (gen_ce1, 2),
        (gen_ce2, 2),
        (lambda d: gen_ce3(K=2, depth=d), 4),
        (lambda d: gen_ce4("open1", depth=d), 2),
        (lambda d: gen_ce4("open2", depth=d), 2),
    ],
    ids=["ce1", "ce2", "ce3", "ce4-open1", "ce4-open2"],
)
def test_generated_sketches_validate_at_every_depth(make, first):
    for depth in range(first, 41):
        report = validate_sketch(make(depth).spec)
        assert report.passed, (depth, report.failed())


def test_ce3_gradient_signs():
    inst = gen_ce3(K=2, depth=12)
    obj = inst.make_objective()
    rng = np.random.default_rng(5)
    strips = Ce3Strips.build(2, 4)
    for s in strips.levels:
        lo, hi = float(s.H.y), float(s.E.y)
        for x, y in zip(rng.uniform(-0.9, 0.9, 50), rng.uniform(lo, hi, 50)):
            g = obj.value_and_gradient(Vec2(float(x), float(y))).grad
            # gradient leans away from the side the oracle answers
            assert (-1) ** s.k * g[0] > 0, (s.k, x, y)
    for x, y in zip(rng.uniform(-1.0, 1.0, 300), rng.uniform(0.5, 4.0, 300)):
        assert obj.value_and_gradient(Vec2(float(x), float(y))).grad[1] > 0, (x, y)


@pytest.mark.parametrize("kind,minimum", [("open1", 12), ("open2", 20)])
def test_ce4_band_counts_at_long_horizon(kind, minimum):
    tr = track(kind, 100001)
    short, full = band_crossings(tr.B[:10001]), band_crossings(tr.B)
    assert min(full) >= minimum
    assert full[0] >= short[0] and full[1] >= short[1]
    assert all(b.y > 0 for b in tr.B)
