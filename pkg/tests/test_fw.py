from fractions import Fraction

import numpy as np
import pytest

from src.counterexamples import gen_ce1, gen_ce2, gen_ce4, reference_trajectory
from src.fw import (
    SPECIFIED,
    FrankWolfeError,
    LmoPolicy,
    OracleError,
    StepError,
    StepStrategy,
    Trajectory,
    closed_loop_gamma,
    doubling_blocks,
    landing_residual,
    line_search,
    lmo,
    minimizer_set,
    open_loop_gamma,
    run_fw,
    step_size,
)
from src.geom2d import ConvexPolygon, Vec2, qvec
from src.sketch import Evaluation, SegmentDistanceObjective, ZeroObjective

SQUARE = ConvexPolygon.box(Fraction(-1), Fraction(-1), Fraction(1), Fraction(1))
KITE = ConvexPolygon.hull([qvec(-2, "1/4"), qvec(-1, 0), qvec(0, 1), qvec(1, 0)])
SEGMENT = ConvexPolygon.segment(qvec(0, 0), qvec(1, 0))
DIST = SegmentDistanceObjective(Vec2(-0.5, 0.0), Vec2(0.5, 0.0))


def test_open_loop_steps_are_exact():
    assert open_loop_gamma("open1", 0) == 1
    assert open_loop_gamma("open1", 3) == Fraction(1, 4)
    assert open_loop_gamma("open2", 1) == Fraction(2, 3)
    with pytest.raises(StepError):
        open_loop_gamma("closed", 1)


def test_strategy_validation():
    with pytest.raises(StepError, match="L > 0"):
        StepStrategy("closed", L=0.0)
    with pytest.raises(StepError):
        StepStrategy("golden")
    s = StepStrategy.from_any({"kind": "closed", "L": 2})
    assert s == StepStrategy.closed(2.0)


def test_specified_oracle_breaks_ties_lexicographically():
    u = qvec(0, 1)
    assert len(minimizer_set(SQUARE, u)) == 2
    assert lmo(SQUARE, u) == qvec(-1, -1)
    # zero gradient: every vertex minimizes
    assert lmo(SQUARE, qvec(0, 0)) == qvec(-1, -1)


def test_adversarial_oracle_follows_previous_answer():
    policy = LmoPolicy("adversarial")
    assert lmo(SQUARE, qvec(0, 1), policy, t=3, previous=qvec(1, -1)) == qvec(1, -1)
    assert policy.misspecified and not SPECIFIED.misspecified


def test_script_must_answer_a_minimizer():
    policy = LmoPolicy("scripted", script=[2])
    with pytest.raises(OracleError, match="script violates oracle contract"):
        lmo(SQUARE, qvec(0, 1), policy, t=0)
    with pytest.raises(OracleError):
        LmoPolicy("scripted")


def test_doubling_blocks():
    assert [doubling_blocks(t) for t in range(8)] == [1, 0, 0, 1, 1, 1, 1, 0]


def test_closed_loop_step():
    x, v = np.array([0.0, 1.0]), np.array([1.0, 0.0])
    assert closed_loop_gamma(2.0, x, v, np.array([0.0, 2.0])) == pytest.approx(0.5)
    with pytest.raises(StepError, match="degenerate direction"):
        closed_loop_gamma(2.0, x, x, np.array([0.0, 2.0]))


def test_line_search_lands_on_tangency():
    x, v = np.array([0.0, 1.0]), np.array([1.0, 0.0])
    gamma = line_search(DIST, x, v)
    assert gamma == pytest.approx(0.75, abs=1e-9)
    assert landing_residual(DIST, x, v, gamma) < 1e-8


def test_zero_objective_with_doubling_script():
    policy = LmoPolicy("scripted", script=doubling_blocks)
    traj = run_fw(SEGMENT, ZeroObjective(), StepStrategy.open1(), policy, qvec("1/2", 0), T=6)
    assert len(traj) == 7
    assert traj.points[-1].gamma is None
    # x_1 = v_0 = 1, then vertex 0 for two steps
    assert traj.xs()[:4, 0].tolist() == pytest.approx([0.5, 1.0, 0.5, 1 / 3])
    assert traj.meta["strategy"] == {"kind": "open1"}
    assert traj.meta["oracle"]["mode"] == "scripted"


def test_linesearch_on_distance_descends():
    traj = run_fw(KITE, DIST, StepStrategy.linesearch(), x0=qvec(0, 1), T=30)
    f = traj.values()
    assert np.all(np.diff(f) <= 1e-12)
    assert np.all(traj.gaps() >= f - 1e-9)


def test_start_outside_rejected():
    with pytest.raises(FrankWolfeError, match="not in the constraint set"):
        run_fw(SQUARE, DIST, StepStrategy.open2(), x0=qvec(2, 0), T=3)


def test_trajectory_files(tmp_path):
    traj = run_fw(KITE, DIST, StepStrategy.open2(), x0=qvec(0, 1), T=5)
    traj.write_jsonl(tmp_path / "traj.jsonl")
    traj.write_csv(tmp_path / "traj.csv")
    back = Trajectory.read_jsonl(tmp_path / "traj.jsonl")
    assert back.records() == traj.records()
    header = (tmp_path / "traj.csv").read_text().splitlines()[0]
    assert header == "t,x_x,x_y,v_x,v_y,gamma,f,gap"


def test_step_size_dispatch():
    x, v, g = np.array([0.0, 1.0]), np.array([1.0, 0.0]), np.array([0.0, 2.0])
    assert step_size(StepStrategy.open2(), 2, x, v, g) == pytest.approx(0.5)
    assert step_size(StepStrategy.closed(2.0), 5, x, v, g) == pytest.approx(0.5)
    assert step_size(StepStrategy.linesearch(), 0, x, v, g, DIST) == pytest.approx(0.75, abs=1e-9)
    with pytest.raises(StepError, match="needs the objective"):
        step_size(StepStrategy.linesearch(), 0, x, v, g)


def test_specified_oracle_depends_on_the_ray_only():
    rng = np.random.default_rng(0)
    for a, b in rng.normal(size=(1000, 2)):
        u = Vec2(float(a), float(b))
        assert lmo(KITE, u) == lmo(KITE, u * 7)


def _worst_reference_error(inst, obj, traj):
    ref = reference_trajectory(inst, inst.faithful_horizon(traj.horizon))
    xs = traj.xs()[: len(ref)]
    exact = np.array([p.to_tuple() for p in ref])
    return float(np.hypot(*(xs - exact).T).max()), 10 * max(obj.radii) + 1e-10


@pytest.mark.parametrize("gen", [gen_ce1, gen_ce2], ids=["ce1", "ce2"])
def test_linesearch_on_surrogate_follows_reference(gen):
    inst = gen(depth=40)
    obj = inst.make_objective()
    traj = run_fw(inst.C, obj, inst.step_strategy(), inst.oracle, inst.x0, T=200)
    assert len(traj) == 201
    err, tol = _worst_reference_error(inst, obj, traj)
    assert err <= tol
    assert all(inst.C.contains(p.x, tol=1e-12) for p in traj.points)


@pytest.mark.parametrize("kind", ["open1", "open2"])
def test_open_loop_on_surrogate_follows_reference(kind):
    inst = gen_ce4(kind, depth=40)
    obj = inst.make_objective()
    traj = run_fw(inst.C, obj, inst.step_strategy(), inst.oracle, inst.x0, T=200)
    err, tol = _worst_reference_error(inst, obj, traj)
    assert err <= tol
    assert all(p.x.y > 0 for p in traj.points[:41])


def test_noisy_slopes_do_not_stop_line_search():
    class Jittery:
        f_min = 0.0

        def __init__(self):
            self.calls = 0

        def value_and_gradient(self, x):
            self.calls += 1
            ev = DIST.value_and_gradient(x)
            # float noise of the size bisected level shells produce
            return Evaluation(ev.f, Vec2(ev.g.x + 5e-11 * (-1) ** self.calls, ev.g.y))

    x, v = np.array([0.0, 1.0]), np.array([1.0, 0.0])
    assert line_search(Jittery(), x, v) == pytest.approx(0.75, abs=1e-6)


def test_line_search_rejects_wavy_segment():
    class Wavy:
        f_min = 0.0

        def value_and_gradient(self, x):
            p = np.asarray(x, dtype=float)
            return Evaluation(0.0, Vec2(float(-np.cos(5 * np.pi * p[0])), 0.0))

    with pytest.raises(StepError, match="objective not convex along segment"):
        line_search(Wavy(), np.array([0.0, 0.0]), np.array([1.0, 0.0]))
