import math
from fractions import Fraction

import numpy as np
import pytest

from src.analysis import (
    OSCILLATING,
    AnalysisError,
    band_crossings,
    certify,
    check_rates,
    displacement_events,
    feasibility,
    non_cauchy_certificate,
    rate_bound,
)
from src.counterexamples import Ce3Strips, gen_ce1, gen_ce3, gen_mis_demos, reference_trajectory
from src.counterexamples.ce4 import track
from src.fw import SPECIFIED, Trajectory, TrajectoryPoint, run_fw
from src.geom2d import ConvexPolygon, Vec2, qvec


def _traj(points, f=0.0, gap=0.0):
    pts = [TrajectoryPoint(t, Vec2(float(x), float(y)), Vec2(0.0, 0.0), 0.5, f, gap) for t, (x, y) in enumerate(points)]
    return Trajectory(pts, {"strategy": {"kind": "open2"}})


def test_rate_bounds():
    assert rate_bound("open1", 1.0, 2.0, 1) == pytest.approx(2.0)
    assert rate_bound("open1", 1.0, 1.0, 10) == pytest.approx((1 + math.log(10)) / 20)
    assert rate_bound("open2", 1.0, 2.0, 2) == pytest.approx(2.0)
    assert rate_bound("closed", 3.0, 1.0, 5) == rate_bound("linesearch", 3.0, 1.0, 5)
    with pytest.raises(AnalysisError, match="bounds start at t = 1"):
        rate_bound("open2", 1.0, 1.0, 0)
    with pytest.raises(AnalysisError):
        rate_bound("open2", 0.0, 1.0, 3)


def test_check_rates_flags_first_violation():
    traj = _traj([(0, 0)] * 4, f=1.0)
    entry = check_rates(traj, L=1.0, diam=1.0)
    # open2 bound at t=1 is 2/3
    assert not entry["passed"]
    assert entry["witness"]["t"] == 1
    ok = check_rates(_traj([(0, 0)] * 4, f=0.0), L=0.0, diam=1.0)
    assert ok["passed"]


def test_non_cauchy_on_alternating_points():
    pts = [qvec(0, 0), qvec(1, 0)] * 5
    nc = non_cauchy_certificate(pts, epsilon=0.5, window=1)
    assert nc.covers_all
    assert nc.events[0] == (0, 1, 1.0)


def test_non_cauchy_on_converging_points():
    pts = [Vec2(2.0**-t, 0.0) for t in range(20)]
    nc = non_cauchy_certificate(pts, epsilon=0.1, window=3)
    assert not nc.covers_all
    assert all(t < 4 for t, _, _ in nc.events)
    with pytest.raises(AnalysisError, match="larger than trajectory"):
        non_cauchy_certificate(pts, epsilon=0.1, window=40)


def test_band_crossings_exact():
    pts = [qvec("-1/4", 1), qvec(0, 1), qvec("1/4", 1), qvec("1/3", 1)]
    assert band_crossings(pts) == (1, 2)
    assert band_crossings(_traj([(-0.3, 1), (0.3, 1)]), 0.25) == (1, 1)


def test_displacement_in_first_strip():
    strips = Ce3Strips.build(2, 1)
    # strip 0 spans y in [13/4, 7/2]; the oracle side is x = -1
    path = [(0.5, 3.4), (0.3, 3.0), (0.2, 2.6), (0.1, 2.4), (0.0, 2.0)]
    d = displacement_events(np.array(path), strips)
    assert d.count == 1
    ev = d.events[0]
    assert (ev["k"], ev["t_enter"], ev["t_exit"]) == (0, 0, 3)
    assert ev["displacement"] == pytest.approx(0.4)
    assert ev["closed"]


def test_no_strip_visited():
    d = displacement_events(np.array([(0.0, 0.5), (0.0, 0.4)]), Ce3Strips.build(2, 2))
    assert d.count == 0 and d.first_level == -1


def test_feasibility_reports_first_exit():
    square = ConvexPolygon.box(Fraction(-1), Fraction(-1), Fraction(1), Fraction(1))
    entry = feasibility(_traj([(0, 0), (0.5, 0.5), (1.5, 0)]), square)
    assert not entry["passed"]
    assert entry["witness"]["t"] == 2


def test_zero_objective_demo_oscillates():
    inst, _ = gen_mis_demos()
    obj = inst.make_objective()
    traj = run_fw(inst.C, obj, inst.step_strategy(), inst.oracle, inst.x0, 200)
    cert = certify(inst, traj, L=0.0, obj=obj)
    assert cert.verdict == OSCILLATING
    assert cert.passed, cert.summary()
    assert cert.non_cauchy is not None and cert.non_cauchy.starts == 41


def test_distance_demo_respects_rates_and_oscillates():
    _, inst = gen_mis_demos()
    obj = inst.make_objective()
    traj = run_fw(inst.C, obj, inst.step_strategy(), inst.oracle, inst.x0, 200)
    cert = certify(inst, traj, L=2.0, obj=obj)
    assert cert.rate_ok
    assert cert.passed, cert.summary()
    assert cert.verdict == OSCILLATING
    assert inst.template.expect_oscillation


def test_band_crossings_on_references():
    assert band_crossings([qvec(0, 1)] * 5) == (0, 0)
    assert band_crossings(reference_trajectory(gen_ce1(depth=4), 10)) == (5, 6)
    short, long = band_crossings(track("open2", 1001).B), band_crossings(track("open2", 2001).B)
    assert min(short) >= 10
    assert long[0] > short[0] and long[1] > short[1]


def test_specified_oracle_makes_zero_demo_converge():
    inst, _ = gen_mis_demos()
    traj = run_fw(inst.C, inst.make_objective(), inst.step_strategy(), SPECIFIED, inst.x0, 200)
    xs = traj.xs()[:, 0]
    assert np.all(np.diff(xs) <= 0)
    assert xs[-1] == 0.0
    cert = certify(inst, traj, L=0.0)
    assert cert.verdict != OSCILLATING
    assert cert.non_cauchy.events == [(0, 1, 0.5)]


def test_ce3_certificate_counts_displacements_against_ten():
    inst = gen_ce3(K=2, depth=8)
    assert inst.template.min_displacements == 10
    obj = inst.make_objective()
    traj = run_fw(inst.C, obj, inst.step_strategy(L=10.0), inst.oracle, inst.x0, 200)
    cert = certify(inst, traj, L=10.0, obj=obj)
    checks = {e["name"]: e for e in cert.checks}
    # depth 8 has five strips, so ten events cannot happen
    assert checks["displacement_events"]["witness"]["required"] == 10
    assert not checks["displacement_events"]["passed"]
    assert "displacement_events" in cert.failed()
    assert not cert.passed
    assert checks["vertices_on_segment"]["passed"]
