"""Hand-rolled trial builders shared across test modules."""

import numpy as np

from gaitentropy.core import (ALL_JOINTS, CameraView, Condition, Frame,
                              JointId, JointSample, TrackState, Trial)


def make_trial_from_x(x, fps=30.0, untracked=()):
    """Trial whose spine_base X follows ``x``; everything else is bland.

    ``untracked`` holds (joint, frame_position) pairs to mark missing.
    """
    untracked = set(untracked)
    frames = []
    for i, xv in enumerate(x):
        joints = {}
        for j in ALL_JOINTS:
            if (j, i) in untracked:
                joints[j] = JointSample(0.0, 0.0, 0.0, TrackState.NOT_TRACKED)
            elif j is JointId.SPINE_BASE:
                joints[j] = JointSample(float(xv), 0.9, 2.0, TrackState.TRACKED)
            else:
                joints[j] = JointSample(0.5, 1.0, 2.0, TrackState.TRACKED)
        frames.append(Frame(frame_index=i, timestamp_ms=int(i * 1000 / fps),
                            joints=joints))
    return Trial(subject_id="S1", condition=Condition.NW,
                 camera=CameraView.SAGITTAL, trial_index=1,
                 fps_nominal=fps, frames=tuple(frames))


def triangle_x(n=300, peak=3.0):
    half = n // 2
    up = np.linspace(0.0, peak, half, endpoint=False)
    down = np.linspace(peak, 0.0, n - half)
    return np.concatenate([up, down])
