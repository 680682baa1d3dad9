import numpy as np
import pytest

from gaitentropy.core import Axis, JointId, WalkSegment
from gaitentropy.preprocess import (GapError, SegmentationConfig,
                                    SegmentationError, extract_series,
                                    repair_gaps, segment_walks, smooth)
from helpers import make_trial_from_x, triangle_x

NAN = float("nan")


# repair_gaps


def test_repair_interior_gap_linear():
    rep = repair_gaps(np.array([1.0, NAN, NAN, 4.0]), max_gap=2)
    np.testing.assert_array_equal(rep.values, [1.0, 2.0, 3.0, 4.0])
    assert rep.interpolated_fraction == 0.5
    assert rep.leading_trimmed == 0 and rep.trailing_trimmed == 0


def test_repair_gap_over_limit():
    x = np.concatenate([[1.0], [NAN] * 6, [8.0]])
    with pytest.raises(GapError, match=r"gap of 6 frames at index 1 exceeds max_gap 5"):
        repair_gaps(x, max_gap=5)
    repair_gaps(x, max_gap=6)  # exactly at the limit is fine


def test_repair_trims_edges():
    rep = repair_gaps(np.array([NAN, 2.0, 3.0]), max_gap=5)
    np.testing.assert_array_equal(rep.values, [2.0, 3.0])
    assert rep.leading_trimmed == 1 and rep.trailing_trimmed == 0
    rep = repair_gaps(np.array([NAN, 2.0, 3.0, NAN, NAN]), max_gap=5)
    np.testing.assert_array_equal(rep.values, [2.0, 3.0])
    assert rep.trailing_trimmed == 2


def test_repair_all_missing():
    with pytest.raises(GapError, match="all samples missing"):
        repair_gaps(np.array([NAN, NAN, NAN]), max_gap=5)


def test_repair_gap_index_reported_in_input_coordinates():
    x = np.array([NAN, NAN, 1.0, NAN, NAN, NAN, 5.0])
    with pytest.raises(GapError, match="at index 3"):
        repair_gaps(x, max_gap=2)


def test_repair_idempotent():
    rng = np.random.default_rng(17)
    for _ in range(25):
        x = rng.standard_normal(120)
        drop = rng.integers(0, 120, size=10)
        x[drop] = NAN
        try:
            once = repair_gaps(x, max_gap=5)
        except GapError:
            continue
        twice = repair_gaps(once.values, max_gap=5)
        np.testing.assert_array_equal(once.values, twice.values)
        assert twice.interpolated_fraction == 0.0


# smooth


def test_smooth_examples():
    np.testing.assert_array_equal(smooth(np.array([1.0, 2.0, 3.0]), 1), [1, 2, 3])
    np.testing.assert_array_equal(smooth(np.array([0.0, 0, 3, 0, 0]), 3), [0, 1, 1, 1, 0])


def test_smooth_constant_exact():
    x = np.full(50, 2.3)
    for w in (1, 3, 15, 49):
        np.testing.assert_array_equal(smooth(x, w), x)


def test_smooth_window_validation():
    with pytest.raises(ValueError):
        smooth(np.zeros(10), 4)
    with pytest.raises(ValueError):
        smooth(np.zeros(10), 11)
    with pytest.raises(ValueError):
        smooth(np.zeros(10), -1)


def test_smooth_preserves_mean_interior_dominated():
    rng = np.random.default_rng(23)
    for _ in range(10):
        x = rng.standard_normal(500)
        y = smooth(x, 9)
        # edge windows shrink, so only near-preservation is promised
        assert abs(np.mean(y) - np.mean(x)) < 1e-2
    # with interior plateau equality: constant plus interior bump
    x = np.zeros(400)
    x[150:250] = 1.0
    assert abs(np.mean(smooth(x, 5)) - np.mean(x)) < 1e-12


def test_smooth_preserves_interior_plateau_equality():
    x = np.concatenate([np.linspace(0, 3, 100), np.full(60, 3.0),
                        np.linspace(3, 0, 100)])
    y = smooth(x, 15)
    inner = y[100 + 7:160 - 7]
    assert np.all(inner == inner[0])


# segment_walks


def test_segment_triangle_walk():
    trial = make_trial_from_x(triangle_x(300))
    res = segment_walks(trial, SegmentationConfig())
    assert abs(res.turnaround_frame - 150) <= 5
    assert res.buffer_frames == 15
    assert res.out.start_frame == 0
    assert res.out.end_frame == res.turnaround_frame - 15
    assert res.back.start_frame == res.turnaround_frame + 15
    assert res.back.end_frame == 299
    assert res.out.direction == "out" and res.back.direction == "back"


def plateau_x():
    # plateau spans frames 120..180 inclusive; ramps stay strictly below it
    return np.concatenate([np.linspace(0, 3, 120, endpoint=False),
                           np.full(61, 3.0),
                           np.linspace(3, 0, 121)[1:]])


def test_segment_plateau_midpoint():
    trial = make_trial_from_x(plateau_x())
    res = segment_walks(trial, SegmentationConfig())
    assert res.turnaround_frame == 150  # (120 + 180) // 2


def test_segment_time_reversal():
    x = plateau_x()
    fwd = segment_walks(make_trial_from_x(x), SegmentationConfig())
    rev = segment_walks(make_trial_from_x(x[::-1]), SegmentationConfig())
    n = len(x)
    assert rev.turnaround_frame == n - 1 - fwd.turnaround_frame


def test_segment_monotone_rejected():
    trial = make_trial_from_x(np.linspace(0, 3, 300))
    with pytest.raises(SegmentationError, match="no turnaround detected"):
        segment_walks(trial, SegmentationConfig())


def test_segment_turn_too_close_to_start_rejected():
    # peak in the first half-second: buffer pushes the out segment away
    x = np.concatenate([np.linspace(0, 3, 10), np.linspace(3, 0, 290)])
    with pytest.raises(SegmentationError):
        segment_walks(make_trial_from_x(x), SegmentationConfig())


def test_segment_too_short_trial():
    trial = make_trial_from_x(triangle_x(8))
    with pytest.raises(SegmentationError, match="too short"):
        segment_walks(trial, SegmentationConfig())


def test_segment_minimum_length_enforced():
    # 130 frames at 30 fps: segments ~50 frames, below the 60 needed
    trial = make_trial_from_x(triangle_x(130))
    with pytest.raises(SegmentationError, match="need >= 60"):
        segment_walks(trial, SegmentationConfig())


def test_segment_invariants_on_result():
    trial = make_trial_from_x(triangle_x(300))
    res = segment_walks(trial, SegmentationConfig())
    assert res.out.end_frame < res.turnaround_frame < res.back.start_frame
    min_len = round(2.0 * 30)
    assert res.out.end_frame - res.out.start_frame + 1 >= min_len
    assert res.back.end_frame - res.back.start_frame + 1 >= min_len


# extract_series


def test_extract_series_projection():
    trial = make_trial_from_x(triangle_x(300))
    seg = WalkSegment(direction="out", start_frame=0, end_frame=135)
    series = extract_series(trial, seg, JointId.HEAD, Axis.Y)
    assert len(series) == 136
    assert series.joint is JointId.HEAD and series.axis is Axis.Y
    assert np.all(series.values == 1.0)
    xs = extract_series(trial, seg, JointId.SPINE_BASE, Axis.X)
    np.testing.assert_array_equal(xs.values, triangle_x(300)[:136])


def test_extract_series_repairs_short_gap():
    holes = [(JointId.HEAD, i) for i in (50, 51, 52)]
    trial = make_trial_from_x(triangle_x(300), untracked=holes)
    seg = WalkSegment(direction="out", start_frame=0, end_frame=135)
    series = extract_series(trial, seg, JointId.HEAD, Axis.Y)
    assert len(series) == 136
    assert series.interpolated_fraction == pytest.approx(3 / 136)


def test_extract_series_irreparable_gap_names_joint():
    holes = [(JointId.KNEE_LEFT, i) for i in range(40, 50)]
    trial = make_trial_from_x(triangle_x(300), untracked=holes)
    seg = WalkSegment(direction="out", start_frame=0, end_frame=135)
    with pytest.raises(GapError, match="knee_left.*gap of 10"):
        extract_series(trial, seg, JointId.KNEE_LEFT, Axis.Y)


def test_extract_series_segment_outside_trial():
    trial = make_trial_from_x(triangle_x(300))
    seg = WalkSegment(direction="back", start_frame=290, end_frame=310)
    with pytest.raises(ValueError, match="not in trial"):
        extract_series(trial, seg, JointId.HEAD, Axis.Y)
