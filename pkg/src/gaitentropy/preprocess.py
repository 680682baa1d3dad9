"""Turning a raw trial into per-joint series ready for entropy.

A recording covers a walk out, a turn, and a walk back.  The steps here:

1. ``repair_gaps``: bridge short tracking dropouts by linear
   interpolation, trim missing samples at the ends, refuse long gaps.
2. ``segment_walks``: find the turnaround on the anteroposterior
   excursion of the pelvis and cut the trial into out/back segments,
   discarding a buffer around the turn (the turn itself is not
   steady-state walking).
3. ``extract_series``: pull one joint's coordinate over one segment,
   gap-repaired, as a ``JointSeries``.

Smoothing exists only to stabilize turnaround detection; entropy is
always computed on unsmoothed values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Axis, JointId, JointSeries, Trial, WalkSegment


class GapError(ValueError):
    """A tracking gap too long to repair, or nothing left to repair."""


class SegmentationError(ValueError):
    """The trial does not contain a usable out-turn-back structure."""


@dataclass(frozen=True)
class GapRepair:
    """Result of gap repair on one coordinate array.

    ``values`` has no NaNs; ``leading_trimmed``/``trailing_trimmed``
    count samples dropped from the ends, so values[0] corresponds to
    input position ``leading_trimmed``.
    """

    values: np.ndarray
    interpolated_fraction: float
    leading_trimmed: int
    trailing_trimmed: int


def repair_gaps(values: np.ndarray, max_gap: int) -> GapRepair:
    """Repair NaN-marked gaps in a coordinate array.

    Interior runs of at most ``max_gap`` NaNs are linearly interpolated
    between the flanking valid samples; leading and trailing runs are
    trimmed.  A longer interior run raises ``GapError`` (outages beyond
    a few frames are not credibly linear).
    """
    if max_gap < 0:
        raise ValueError(f"max_gap must be >= 0, got {max_gap}")
    x = np.asarray(values, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D array, got shape {x.shape}")
    missing = np.isnan(x)
    if missing.all():
        raise GapError("all samples missing")
    valid = np.flatnonzero(~missing)
    lead = int(valid[0])
    trail = int(len(x) - 1 - valid[-1])
    core = x[valid[0]:valid[-1] + 1].copy()
    miss = np.isnan(core)
    edges = np.flatnonzero(np.diff(np.concatenate(([False], miss, [False])).astype(int)))
    for start, stop in zip(edges[0::2], edges[1::2]):
        if stop - start > max_gap:
            raise GapError(
                f"gap of {stop - start} frames at index {int(start) + lead} exceeds max_gap {max_gap}")
    if miss.any():
        idx = np.arange(len(core))
        core[miss] = np.interp(idx[miss], idx[~miss], core[~miss])
    frac = float(np.count_nonzero(miss)) / len(core)
    return GapRepair(values=core, interpolated_fraction=frac,
                     leading_trimmed=lead, trailing_trimmed=trail)


def smooth(series: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average with an odd window.

    Edge samples average over the part of the window that stays in
    bounds, so output length equals input length and a constant series
    is reproduced exactly.  The first sample is subtracted before the
    window sums and added back after, so a flat stretch of identical
    values stays exactly identical (turnaround plateau detection relies
    on that).
    """
    x = np.asarray(series, dtype=float)
    n = len(x)
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be odd and >= 1, got {window}")
    if window > n:
        raise ValueError(f"window {window} exceeds series length {n}")
    if window == 1:
        return x.copy()
    base = x[0]
    sums = np.convolve(x - base, np.ones(window), mode="same")
    counts = np.convolve(np.ones(n), np.ones(window), mode="same")
    return sums / counts + base


@dataclass(frozen=True)
class SegmentationConfig:
    """Knobs for walk segmentation; times in seconds, scaled by trial fps."""

    buffer_s: float = 0.5
    min_segment_s: float = 2.0
    max_gap: int = 5

    def __post_init__(self) -> None:
        if not self.buffer_s > 0:
            raise ValueError(f"buffer_s must be > 0, got {self.buffer_s}")
        if not self.min_segment_s > 0:
            raise ValueError(f"min_segment_s must be > 0, got {self.min_segment_s}")
        if self.max_gap < 0:
            raise ValueError(f"max_gap must be >= 0, got {self.max_gap}")


@dataclass(frozen=True)
class SegmentationResult:
    """Out/back split of one trial around the detected turnaround."""

    turnaround_frame: int
    out: WalkSegment
    back: WalkSegment
    buffer_frames: int

    def __post_init__(self) -> None:
        if not (self.out.end_frame < self.turnaround_frame < self.back.start_frame):
            raise ValueError("segments must flank the turnaround")


def _turnaround_position(d: np.ndarray) -> int:
    """Midpoint of the longest run of positions where d equals its
    maximum (first such run on a tie).  A subject pausing at the turn
    produces a flat displacement plateau; the midpoint is the symmetric,
    deterministic choice."""
    at_max = np.flatnonzero(d == d.max())
    breaks = np.flatnonzero(np.diff(at_max) > 1)
    starts = np.concatenate(([0], breaks + 1))
    stops = np.concatenate((breaks, [len(at_max) - 1]))
    lengths = stops - starts + 1
    k = int(np.argmax(lengths))  # argmax takes the first on ties
    return int(at_max[starts[k]] + at_max[stops[k]]) // 2


def segment_walks(trial: Trial, config: SegmentationConfig = SegmentationConfig()) -> SegmentationResult:
    """Split a trial into out and back walk segments.

    The turnaround is the global extremum of the smoothed anteroposterior
    (X) displacement of the pelvis (spine_base), the most proximal and
    least noisy joint.  A buffer of ``buffer_s`` seconds on each side of
    the turn is excluded from both segments.  Boundary values are the
    trial's frame_index numbers.
    """
    fps = trial.fps_nominal
    repair = repair_gaps(trial.axis_values(JointId.SPINE_BASE, Axis.X), config.max_gap)
    n = len(repair.values)
    window = int(round(fps / 2.0))
    if window % 2 == 0:
        window += 1
    if window > n:
        raise SegmentationError(f"trial too short to segment: {n} usable frames")
    s = smooth(repair.values, window)
    t_local = _turnaround_position(np.abs(s - s[0]))
    buffer = int(round(config.buffer_s * fps))
    if t_local - buffer < 0 or t_local + buffer > n - 1:
        raise SegmentationError("no turnaround detected")
    min_len = int(round(config.min_segment_s * fps))
    lead = repair.leading_trimmed
    t_pos = lead + t_local
    bounds = {
        "out": (lead, t_pos - buffer),
        "back": (t_pos + buffer, lead + n - 1),
    }
    for name, (a, b) in bounds.items():
        if b - a + 1 < min_len:
            raise SegmentationError(
                f"{name} segment has {b - a + 1} frames, need >= {min_len}")
    frame_at = lambda p: trial.frames[p].frame_index
    return SegmentationResult(
        turnaround_frame=frame_at(t_pos),
        out=WalkSegment("out", frame_at(bounds["out"][0]), frame_at(bounds["out"][1])),
        back=WalkSegment("back", frame_at(bounds["back"][0]), frame_at(bounds["back"][1])),
        buffer_frames=buffer,
    )


def extract_series(trial: Trial, segment: WalkSegment, joint: JointId,
                   axis: Axis = Axis.Y, max_gap: int = 5) -> JointSeries:
    """One joint's coordinate over one segment, gap-repaired.

    Leading/trailing untracked samples inside the segment are trimmed,
    so the series can be shorter than the segment; the entropy layer's
    min_length guard catches series that end up too short to use.
    """
    position = {f.frame_index: p for p, f in enumerate(trial.frames)}
    try:
        p0 = position[segment.start_frame]
        p1 = position[segment.end_frame]
    except KeyError as missing:
        raise ValueError(f"segment frame {missing.args[0]} not in trial") from None
    raw = trial.axis_values(joint, axis)[p0:p1 + 1]
    try:
        repair = repair_gaps(raw, max_gap)
    except GapError as err:
        raise GapError(f"{joint}: {err}") from None
    if len(repair.values) < 2:
        raise GapError(f"{joint}: only {len(repair.values)} usable samples in segment")
    return JointSeries(joint=joint, axis=axis, values=repair.values,
                       fps=trial.fps_nominal,
                       interpolated_fraction=repair.interpolated_fraction)
