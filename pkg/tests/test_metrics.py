import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rowfollow.metrics import CenterlineRef, EpisodeMetrics, aggregate, centerline_rmse, path_length
from rowfollow.sim import RobotPose

REF = CenterlineRef.straight(8.0)


def test_on_centerline_is_zero():
    xy = np.column_stack([np.linspace(0, 8, 50), np.zeros(50)])
    assert centerline_rmse(xy, REF) == 0.0


def test_constant_offset():
    xy = np.column_stack([np.linspace(0, 8, 81), np.full(81, 0.1)])
    assert centerline_rmse(xy, REF) == pytest.approx(0.1, rel=1e-15)


def test_sinusoid_rms():
    amp, k, n = 0.2, 2 * math.pi / 2.0, 10_000
    x = np.linspace(0, 8, n, endpoint=False)
    xy = np.column_stack([x, amp * np.sin(k * x)])
    # dense trapezoid quadrature of the mean square over four full periods
    xq = np.linspace(0, 8, 2_000_001)
    ms = np.trapezoid((amp * np.sin(k * xq)) ** 2, xq) / 8.0
    assert math.sqrt(ms) == pytest.approx(amp / math.sqrt(2), rel=1e-9)
    assert centerline_rmse(xy, REF) == pytest.approx(amp / math.sqrt(2), rel=0.01)


def test_accepts_poses():
    poses = [RobotPose(1.0, 0.3, 0.0), RobotPose(2.0, -0.3, 0.0)]
    assert centerline_rmse(poses, REF) == pytest.approx(0.3)


def test_distance_beyond_segment_end():
    assert centerline_rmse([[11.0, 4.0]], REF) == pytest.approx(5.0)


def test_polyline_reference():
    ref = CenterlineRef(((0, 0), (1, 1), (2, 0)))
    assert centerline_rmse([[1.0, 1.0]], ref) == 0.0
    assert centerline_rmse([[1.0, 0.0]], ref) == pytest.approx(math.sqrt(0.5))


def test_empty_trajectory_rejected():
    with pytest.raises(ValueError):
        centerline_rmse(np.zeros((0, 2)), REF)


def test_ref_validation():
    with pytest.raises(ValueError):
        CenterlineRef(((0, 0),))
    with pytest.raises(ValueError):
        CenterlineRef(((0, 0), (0, 1)))


traj = st.lists(st.tuples(st.floats(0, 8), st.floats(-1, 1)), min_size=1, max_size=30).map(np.array)


@given(traj, st.floats(-50, 50), st.floats(-50, 50))
def test_rmse_translation_invariant(xy, dx, dy):
    shifted_ref = CenterlineRef(tuple((x + dx, y + dy) for x, y in REF.points))
    a = centerline_rmse(xy, REF)
    b = centerline_rmse(xy + [dx, dy], shifted_ref)
    assert b == pytest.approx(a, abs=1e-9)


@given(traj, traj)
def test_rmse_of_concatenation_between_parts(a, b):
    ra, rb = centerline_rmse(a, REF), centerline_rmse(b, REF)
    rab = centerline_rmse(np.vstack([a, b]), REF)
    assert min(ra, rb) - 1e-12 <= rab <= max(ra, rb) + 1e-12


def test_path_length_examples():
    assert path_length([[1.0, 2.0]]) == 0.0
    xy = np.column_stack([np.linspace(0, 8.26, 84), np.full(84, 0.05)])
    assert path_length(xy) == pytest.approx(8.26, rel=1e-12)
    square = [[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]]
    assert path_length(square) == pytest.approx(4.0)


@given(traj, traj)
def test_path_length_additive(a, b):
    b = np.vstack([a[-1:], b])
    joined = np.vstack([a, b[1:]])
    assert path_length(joined) == pytest.approx(path_length(a) + path_length(b), abs=1e-9)


@given(traj, st.floats(-math.pi, math.pi), st.floats(-10, 10), st.floats(-10, 10))
def test_path_length_rigid_invariant(xy, th, dx, dy):
    rot = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    moved = xy @ rot.T + [dx, dy]
    assert path_length(moved) == pytest.approx(path_length(xy), abs=1e-9)


def test_aggregate_all_successful():
    rep = aggregate([("EndOfRowReached", 0.07, 8.0)] * 3)
    assert rep.success_rate == 1.0


def test_aggregate_table_values():
    rep = aggregate([("EndOfRowReached", r, 8.0) for r in (0.077, 0.073, 0.082)])
    assert rep.rmse_mean == pytest.approx(0.232 / 3)
    assert abs(rep.rmse_mean - 0.077) < 0.001
    # sample standard deviation of {0.077, 0.073, 0.082}
    mean = 0.232 / 3
    sd = math.sqrt(sum((r - mean) ** 2 for r in (0.077, 0.073, 0.082)) / 2)
    assert rep.rmse_std == pytest.approx(sd)
    assert rep.rmse_std == pytest.approx(0.0045, abs=1e-4)


def test_aggregate_seventy_percent():
    eps = [("EndOfRowReached", 0.1, 10.0)] * 7 + [("Collision", 0.2, 8.0)] * 3
    assert aggregate(eps).success_rate == pytest.approx(0.70)


@given(st.lists(st.sampled_from(["EndOfRowReached", "Collision", "StepLimit", "NoGapStall"]), min_size=1))
def test_success_rate_is_count(labels):
    rep = aggregate([EpisodeMetrics(t, 0.1, 1.0) for t in labels])
    assert rep.success_rate == sum(1 for t in labels if t == "EndOfRowReached") / len(labels)
    assert 0.0 <= rep.success_rate <= 1.0


def test_aggregate_requires_episodes():
    with pytest.raises(ValueError):
        aggregate([])


def test_single_episode_std_is_zero():
    assert aggregate([("Collision", 0.3, 1.0)]).rmse_std == 0.0


def test_report_serializes():
    import json

    rep = aggregate([EpisodeMetrics("EndOfRowReached", 0.05, 7.3, seed=1, steps=146)])
    assert json.loads(rep.to_json())["episodes"][0]["seed"] == 1
    assert "success rate 1.00" in rep.to_text()
