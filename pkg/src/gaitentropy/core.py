"""Domain vocabulary: joints, axes, walking conditions, frames, trials, segments.

Everything downstream (ingestion, preprocessing, entropy, profiles, glyphs)
speaks in these types.  All of them are plain immutable values; construct
them once and share freely.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np


class JointId(enum.Enum):
    """The 15 tracked skeleton joints, in canonical output order."""

    HEAD = "head"
    NECK = "neck"
    SHOULDER_LEFT = "shoulder_left"
    SHOULDER_RIGHT = "shoulder_right"
    SPINE_SHOULDER = "spine_shoulder"
    SPINE_MID = "spine_mid"
    SPINE_BASE = "spine_base"
    HIP_LEFT = "hip_left"
    HIP_RIGHT = "hip_right"
    KNEE_LEFT = "knee_left"
    KNEE_RIGHT = "knee_right"
    ANKLE_LEFT = "ankle_left"
    ANKLE_RIGHT = "ankle_right"
    FOOT_LEFT = "foot_left"
    FOOT_RIGHT = "foot_right"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, token: str) -> "JointId":
        """Parse a joint token; accepts canonical names plus common aliases."""
        key = token.strip().lower().replace(" ", "_").replace("-", "_")
        key = _JOINT_ALIASES.get(key, key)
        for j in cls:
            if j.value == key:
                return j
        raise ValueError(f"unknown joint {token!r}")


# Side-prefixed phrasing ("left shoulder") and Kinect-style spine names
# ("base spine") map onto the canonical side-suffixed tokens.
_JOINT_ALIASES = {
    "left_shoulder": "shoulder_left",
    "right_shoulder": "shoulder_right",
    "left_hip": "hip_left",
    "right_hip": "hip_right",
    "left_knee": "knee_left",
    "right_knee": "knee_right",
    "left_ankle": "ankle_left",
    "right_ankle": "ankle_right",
    "left_foot": "foot_left",
    "right_foot": "foot_right",
    "shoulder_spine": "spine_shoulder",
    "mid_spine": "spine_mid",
    "base_spine": "spine_base",
}

ALL_JOINTS: tuple[JointId, ...] = tuple(JointId)


class Axis(enum.Enum):
    """Camera coordinate axes with their body-relative meaning."""

    X = "X"
    Y = "Y"
    Z = "Z"

    @property
    def semantic(self) -> str:
        return _AXIS_SEMANTIC[self]

    @classmethod
    def parse(cls, token: str) -> "Axis":
        t = token.strip()
        for a in cls:
            if t.upper() == a.value or t.lower() == a.semantic:
                return a
        raise ValueError(f"unknown axis {token!r} (expected X/Y/Z or "
                         "anteroposterior/vertical/mediolateral)")


_AXIS_SEMANTIC = {Axis.X: "anteroposterior", Axis.Y: "vertical", Axis.Z: "mediolateral"}


class Condition(enum.Enum):
    """Walking condition: normal, knee brace, ankle brace."""

    NW = "NW"
    KB = "KB"
    AB = "AB"

    @property
    def long_name(self) -> str:
        return {"NW": "normal walking", "KB": "knee brace", "AB": "ankle brace"}[self.value]

    @classmethod
    def parse(cls, token: str) -> "Condition":
        t = token.strip().upper()
        for c in cls:
            if t == c.value:
                return c
        valid = ", ".join(c.value for c in cls)
        raise ValueError(f"unknown condition {token!r} (expected one of {{{valid}}})")


class CameraView(enum.Enum):
    SAGITTAL = "sagittal"
    FRONTAL = "frontal"

    @classmethod
    def parse(cls, token: str) -> "CameraView":
        t = token.strip().lower()
        for v in cls:
            if t == v.value:
                return v
        valid = ", ".join(v.value for v in cls)
        raise ValueError(f"unknown camera view {token!r} (expected one of {{{valid}}})")


class TrackState(enum.Enum):
    """Per-joint tracking confidence reported by the depth camera."""

    TRACKED = "tracked"
    INFERRED = "inferred"
    NOT_TRACKED = "not_tracked"

    @classmethod
    def parse(cls, token: str) -> "TrackState":
        t = token.strip().lower()
        for s in cls:
            if t == s.value:
                return s
        valid = ", ".join(s.value for s in cls)
        raise ValueError(f"unknown track state {token!r} (expected one of {{{valid}}})")


class JointSample(NamedTuple):
    """One joint's position in one frame, in meters, with its track state."""

    x: float
    y: float
    z: float
    state: TrackState


@dataclass(frozen=True)
class Frame:
    """One depth-camera frame: all 15 joints, indexed and timestamped.

    Coordinates of a ``not_tracked`` joint are placeholders and must be
    ignored by consumers.
    """

    frame_index: int
    timestamp_ms: int
    joints: Mapping[JointId, JointSample]

    def __post_init__(self) -> None:
        if self.frame_index < 0:
            raise ValueError(f"frame_index must be >= 0, got {self.frame_index}")
        if self.timestamp_ms < 0:
            raise ValueError(f"timestamp_ms must be >= 0, got {self.timestamp_ms}")
        missing = [j.value for j in ALL_JOINTS if j not in self.joints]
        if missing:
            raise ValueError(f"frame {self.frame_index}: missing joints {missing}")
        for joint, s in self.joints.items():
            if s.state is not TrackState.NOT_TRACKED and not (
                    math.isfinite(s.x) and math.isfinite(s.y) and math.isfinite(s.z)):
                raise ValueError(
                    f"frame {self.frame_index}: non-finite coordinates for tracked {joint}")


@dataclass(frozen=True)
class Trial:
    """One recorded out-and-back walk.

    Structural invariants (>= 2 frames, all joints present) are enforced
    here; data-quality findings such as non-monotonic timestamps are the
    job of ``ingest.validate_trial`` so that suspect recordings can still
    be loaded and reported on.
    """

    subject_id: str
    condition: Condition
    camera: CameraView
    trial_index: int
    frames: tuple[Frame, ...]
    fps_nominal: float = 30.0

    def __post_init__(self) -> None:
        if self.trial_index < 1:
            raise ValueError(f"trial_index must be >= 1, got {self.trial_index}")
        if self.fps_nominal <= 0:
            raise ValueError(f"fps_nominal must be > 0, got {self.fps_nominal}")
        if len(self.frames) < 2:
            raise ValueError(f"trial needs >= 2 frames, got {len(self.frames)}")
        for prev, cur in zip(self.frames, self.frames[1:]):
            if cur.frame_index <= prev.frame_index:
                raise ValueError(
                    f"frame_index must be strictly increasing, got {cur.frame_index} "
                    f"after {prev.frame_index}")

    @property
    def n_frames(self) -> int:
        return len(self.frames)

    def axis_values(self, joint: JointId, axis: Axis) -> np.ndarray:
        """Raw coordinate sequence for one joint, NaN where not tracked."""
        out = np.empty(len(self.frames))
        k = {"X": 0, "Y": 1, "Z": 2}[axis.value]
        for i, f in enumerate(self.frames):
            s = f.joints[joint]
            out[i] = np.nan if s.state is TrackState.NOT_TRACKED else s[k]
        return out


@dataclass(frozen=True)
class WalkSegment:
    """One straight-line pass of a trial, as an inclusive frame-index range."""

    direction: str  # "out" or "back"
    start_frame: int
    end_frame: int

    def __post_init__(self) -> None:
        if self.direction not in ("out", "back"):
            raise ValueError(f"direction must be 'out' or 'back', got {self.direction!r}")
        if not self.start_frame < self.end_frame:
            raise ValueError(
                f"segment start_frame {self.start_frame} must precede end_frame {self.end_frame}"
            )


@dataclass(frozen=True)
class JointSeries:
    """One joint's 1-D coordinate sequence on a chosen axis."""

    joint: JointId
    axis: Axis
    values: np.ndarray
    fps: float
    interpolated_fraction: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim != 1 or len(self.values) < 2:
            raise ValueError("series needs at least 2 samples")
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"{self.joint} series contains non-finite values")
        if not 0.0 <= self.interpolated_fraction <= 1.0:
            raise ValueError("interpolated_fraction must be within [0, 1]")

    def __len__(self) -> int:
        return len(self.values)


MAIN5 = (JointId.HEAD, JointId.NECK, JointId.SPINE_SHOULDER, JointId.SPINE_MID,
         JointId.SPINE_BASE)
LEFT5 = (JointId.SHOULDER_LEFT, JointId.HIP_LEFT, JointId.KNEE_LEFT,
         JointId.ANKLE_LEFT, JointId.FOOT_LEFT)
RIGHT5 = (JointId.SHOULDER_RIGHT, JointId.HIP_RIGHT, JointId.KNEE_RIGHT,
          JointId.ANKLE_RIGHT, JointId.FOOT_RIGHT)

_JOINT_GROUPS = {
    "main5": MAIN5,
    "left5": LEFT5,
    "right5": RIGHT5,
    "all15": ALL_JOINTS,
}


def joint_group(name: str) -> tuple[JointId, ...]:
    """Named joint subsets used for profiles and glyphs.

    ``main5`` is the upper-body/trunk group, ``left5``/``right5`` the lateral
    chains, ``all15`` the full skeleton in canonical order.
    """
    try:
        return _JOINT_GROUPS[name]
    except KeyError:
        valid = ", ".join(sorted(_JOINT_GROUPS))
        raise ValueError(f"unknown joint group {name!r} (expected one of {{{valid}}})") from None


JOINT_GROUP_NAMES = tuple(sorted(_JOINT_GROUPS))
