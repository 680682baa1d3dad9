"""Seeded generator of synthetic walking trials.

Produces out-and-back walks shaped like the recording protocol: the
pelvis moves along a smooth anteroposterior profile over a 10-foot path
with a one-second pause at the turn, every joint's vertical coordinate
oscillates at the step frequency, and a brace-style impairment lowers
oscillation amplitude, adds tracking noise, and shifts phase on the
affected right-side joints.

The model makes no claim of biomechanical fidelity; it exists to
exercise the pipeline with known ground truth.  Two deliberate
simplifications matter downstream:

* trunk joints (head through pelvis) are noise-free, so a subject's
  trunk series are identical across trials and conditions; irregularity
  shows up only where an impairment or sensor noise puts it,
* all randomness flows from PCG64 streams spawned off explicit integer
  seeds, and every noise block is drawn whether or not it is used, so
  trials with the same seeds stay aligned sample-for-sample across
  impairment settings.

Ground truth (turnaround frame, effective per-joint amplitudes) is
returned with each trial and written as a ``*.truth.json`` sidecar next
to the session files.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Mapping, NamedTuple

import numpy as np

from .core import (ALL_JOINTS, CameraView, Condition, Frame, JointId, JointSample,
                   TrackState, Trial)
from .ingest import SessionManifest, write_frames_csv, write_manifest

FT_TO_M = 0.3048
PATH_FT = 10.0
TURN_PLATEAU_S = 1.0

# Template body: trunk chain and side chains in anatomical height order.
_BASELINE_M = {
    JointId.HEAD: 1.62, JointId.NECK: 1.52, JointId.SPINE_SHOULDER: 1.44,
    JointId.SPINE_MID: 1.18, JointId.SPINE_BASE: 0.96,
    JointId.SHOULDER_LEFT: 1.46, JointId.SHOULDER_RIGHT: 1.46,
    JointId.HIP_LEFT: 0.92, JointId.HIP_RIGHT: 0.92,
    JointId.KNEE_LEFT: 0.50, JointId.KNEE_RIGHT: 0.50,
    JointId.ANKLE_LEFT: 0.12, JointId.ANKLE_RIGHT: 0.12,
    JointId.FOOT_LEFT: 0.05, JointId.FOOT_RIGHT: 0.05,
}

# Vertical oscillation grows toward the feet; tracking noise does too.
_AMPLITUDE_M = {
    JointId.HEAD: 0.015, JointId.NECK: 0.014, JointId.SPINE_SHOULDER: 0.013,
    JointId.SPINE_MID: 0.012, JointId.SPINE_BASE: 0.012,
    JointId.SHOULDER_LEFT: 0.018, JointId.SHOULDER_RIGHT: 0.018,
    JointId.HIP_LEFT: 0.020, JointId.HIP_RIGHT: 0.020,
    JointId.KNEE_LEFT: 0.040, JointId.KNEE_RIGHT: 0.040,
    JointId.ANKLE_LEFT: 0.060, JointId.ANKLE_RIGHT: 0.060,
    JointId.FOOT_LEFT: 0.070, JointId.FOOT_RIGHT: 0.070,
}

_SIGMA_M = {
    JointId.HEAD: 0.0, JointId.NECK: 0.0, JointId.SPINE_SHOULDER: 0.0,
    JointId.SPINE_MID: 0.0, JointId.SPINE_BASE: 0.0,
    JointId.SHOULDER_LEFT: 0.0035, JointId.SHOULDER_RIGHT: 0.0035,
    JointId.HIP_LEFT: 0.004, JointId.HIP_RIGHT: 0.004,
    JointId.KNEE_LEFT: 0.005, JointId.KNEE_RIGHT: 0.005,
    JointId.ANKLE_LEFT: 0.006, JointId.ANKLE_RIGHT: 0.006,
    JointId.FOOT_LEFT: 0.007, JointId.FOOT_RIGHT: 0.007,
}

# Left/right limbs swing in antiphase; trunk joints lag slightly.
_PHASE_RAD = {
    JointId.HEAD: 0.0, JointId.NECK: 0.1, JointId.SPINE_SHOULDER: 0.2,
    JointId.SPINE_MID: 0.3, JointId.SPINE_BASE: 0.4,
    JointId.SHOULDER_LEFT: 0.0, JointId.SHOULDER_RIGHT: math.pi,
    JointId.HIP_LEFT: 0.0, JointId.HIP_RIGHT: math.pi,
    JointId.KNEE_LEFT: 0.5, JointId.KNEE_RIGHT: math.pi + 0.5,
    JointId.ANKLE_LEFT: 1.0, JointId.ANKLE_RIGHT: math.pi + 1.0,
    JointId.FOOT_LEFT: 1.5, JointId.FOOT_RIGHT: math.pi + 1.5,
}

_Z_OFFSET_M = {
    JointId.HEAD: 0.0, JointId.NECK: 0.0, JointId.SPINE_SHOULDER: 0.0,
    JointId.SPINE_MID: 0.0, JointId.SPINE_BASE: 0.0,
    JointId.SHOULDER_LEFT: -0.18, JointId.SHOULDER_RIGHT: 0.18,
    JointId.HIP_LEFT: -0.09, JointId.HIP_RIGHT: 0.09,
    JointId.KNEE_LEFT: -0.10, JointId.KNEE_RIGHT: 0.10,
    JointId.ANKLE_LEFT: -0.11, JointId.ANKLE_RIGHT: 0.11,
    JointId.FOOT_LEFT: -0.12, JointId.FOOT_RIGHT: 0.12,
}

_SIDE_CHAINS = (
    (JointId.HEAD, JointId.NECK, JointId.SPINE_SHOULDER, JointId.SPINE_MID,
     JointId.SPINE_BASE),
    (JointId.SHOULDER_LEFT, JointId.HIP_LEFT, JointId.KNEE_LEFT,
     JointId.ANKLE_LEFT, JointId.FOOT_LEFT),
    (JointId.SHOULDER_RIGHT, JointId.HIP_RIGHT, JointId.KNEE_RIGHT,
     JointId.ANKLE_RIGHT, JointId.FOOT_RIGHT),
)


@dataclass(frozen=True)
class SubjectModel:
    """One synthetic subject's body and gait parameters."""

    subject_id: str
    seed: tuple[int, int]  # (base seed, subject index); root of all trial streams
    baseline_m: Mapping[JointId, float]
    amplitude_m: Mapping[JointId, float]
    step_frequency_hz: float
    phase_rad: Mapping[JointId, float]
    noise_sigma_m: Mapping[JointId, float]

    def __post_init__(self) -> None:
        if not 0.5 < self.step_frequency_hz < 3.0:
            raise ValueError(
                f"step frequency must be in (0.5, 3.0) Hz, got {self.step_frequency_hz}")
        for table in (self.baseline_m, self.amplitude_m, self.phase_rad, self.noise_sigma_m):
            missing = [j.value for j in ALL_JOINTS if j not in table]
            if missing:
                raise ValueError(f"subject model missing joints {missing}")
        for j in ALL_JOINTS:
            if self.amplitude_m[j] < 0:
                raise ValueError(f"amplitude for {j} must be >= 0")
            if self.noise_sigma_m[j] < 0:
                raise ValueError(f"noise sigma for {j} must be >= 0")
        for chain in _SIDE_CHAINS:
            for upper, lower in zip(chain, chain[1:]):
                if not self.baseline_m[upper] > self.baseline_m[lower]:
                    raise ValueError(
                        f"baselines must decrease down the body: {upper} vs {lower}")


_AFFECTED = {
    Condition.NW: frozenset(),
    Condition.KB: frozenset({JointId.KNEE_RIGHT, JointId.HIP_RIGHT, JointId.ANKLE_RIGHT}),
    Condition.AB: frozenset({JointId.ANKLE_RIGHT, JointId.FOOT_RIGHT, JointId.KNEE_RIGHT}),
}

_DEFAULT_AMPLITUDE_SCALE = 0.55
_DEFAULT_EXTRA_NOISE_M = 0.006
_DEFAULT_PHASE_SHIFT_RAD = 0.4


@dataclass(frozen=True)
class ImpairmentSpec:
    """How a walking condition distorts the affected joints.

    The affected set is fixed per condition (braces are worn on the
    right side; effects spill over to the adjacent joints); magnitudes
    are calibration knobs.
    """

    condition: Condition
    affected: frozenset[JointId]
    amplitude_scale: float = 1.0
    extra_noise_m: float = 0.0
    phase_shift_rad: float = 0.0

    def __post_init__(self) -> None:
        if self.affected != _AFFECTED[self.condition]:
            expect = sorted(j.value for j in _AFFECTED[self.condition])
            raise ValueError(f"{self.condition.value} must affect exactly {expect}")
        if self.condition is Condition.NW and (
                self.amplitude_scale != 1.0 or self.extra_noise_m != 0.0
                or self.phase_shift_rad != 0.0):
            raise ValueError("NW is the unimpaired condition; effect values must be neutral")
        if not self.amplitude_scale > 0:
            raise ValueError(f"amplitude_scale must be > 0, got {self.amplitude_scale}")
        if self.extra_noise_m < 0:
            raise ValueError(f"extra_noise_m must be >= 0, got {self.extra_noise_m}")

    @classmethod
    def for_condition(cls, condition: Condition,
                      amplitude_scale: float | None = None,
                      extra_noise_m: float | None = None,
                      phase_shift_rad: float | None = None) -> "ImpairmentSpec":
        """The default impairment for a condition; knobs override magnitudes."""
        if condition is Condition.NW:
            if any(v is not None for v in (amplitude_scale, extra_noise_m, phase_shift_rad)):
                raise ValueError("NW takes no impairment knobs")
            return cls(condition=condition, affected=_AFFECTED[condition])
        return cls(
            condition=condition,
            affected=_AFFECTED[condition],
            amplitude_scale=_DEFAULT_AMPLITUDE_SCALE if amplitude_scale is None else amplitude_scale,
            extra_noise_m=_DEFAULT_EXTRA_NOISE_M if extra_noise_m is None else extra_noise_m,
            phase_shift_rad=_DEFAULT_PHASE_SHIFT_RAD if phase_shift_rad is None else phase_shift_rad,
        )


@dataclass(frozen=True)
class TrialTruth:
    """Generator ground truth for one trial."""

    turnaround_frame: int
    amplitudes_m: Mapping[JointId, float]  # effective, after impairment scaling

    def to_json(self) -> str:
        obj = {
            "turnaround_frame": self.turnaround_frame,
            "amplitudes_m": {j.value: self.amplitudes_m[j] for j in ALL_JOINTS},
        }
        return json.dumps(obj, indent=2) + "\n"


class GeneratedTrial(NamedTuple):
    trial: Trial
    truth: TrialTruth


def subject_model(base_seed: int, subject_index: int) -> SubjectModel:
    """Subject parameters: the template jittered within +/-10 percent.

    One stature factor scales all baselines (preserving anatomical
    order); amplitudes, noise sigmas, and phases get per-joint jitter.
    Draw order is part of the format: stature, frequency, amplitude
    factors, sigma factors, phase offsets.
    """
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence([base_seed, subject_index])))
    stature = rng.uniform(0.9, 1.1)
    freq = 1.8 * rng.uniform(0.9, 1.1)
    amp_jit = rng.uniform(0.9, 1.1, size=len(ALL_JOINTS))
    sig_jit = rng.uniform(0.9, 1.1, size=len(ALL_JOINTS))
    phase_jit = rng.uniform(-0.15, 0.15, size=len(ALL_JOINTS))
    return SubjectModel(
        subject_id=f"S{subject_index + 1}",
        seed=(base_seed, subject_index),
        baseline_m={j: _BASELINE_M[j] * stature for j in ALL_JOINTS},
        amplitude_m={j: _AMPLITUDE_M[j] * amp_jit[i] for i, j in enumerate(ALL_JOINTS)},
        step_frequency_hz=freq,
        phase_rad={j: _PHASE_RAD[j] + phase_jit[i] for i, j in enumerate(ALL_JOINTS)},
        noise_sigma_m={j: _SIGMA_M[j] * sig_jit[i] for i, j in enumerate(ALL_JOINTS)},
    )


def _walk_profile(n: int, fps: float, duration_s: float) -> np.ndarray:
    """Anteroposterior body position: ease out, pause, ease back, meters."""
    path_m = PATH_FT * FT_TO_M
    t = np.arange(n) / fps
    t_end = (n - 1) / fps
    t1 = duration_s / 2 - TURN_PLATEAU_S / 2
    t2 = duration_s / 2 + TURN_PLATEAU_S / 2
    x = np.full(n, path_m)
    going = t < t1
    x[going] = path_m / 2 * (1 - np.cos(np.pi * t[going] / t1))
    returning = t > t2
    x[returning] = path_m / 2 * (1 + np.cos(np.pi * (t[returning] - t2) / (t_end - t2)))
    return x


def generate_trial(subject: SubjectModel, impairment: ImpairmentSpec,
                   trial_seed: int, duration_s: float = 10.0,
                   fps: float = 30.0) -> GeneratedTrial:
    """One synthetic out-and-back trial with ground truth.

    The noise stream is seeded by (subject seed, trial_seed) only, and
    every noise block is drawn regardless of the impairment, so the same
    seeds under different impairments yield sample-aligned trials; an
    identity impairment (NW) leaves the base motion untouched.
    """
    if duration_s < 6:
        raise ValueError(f"duration_s must be >= 6, got {duration_s}")
    if not 0 < fps <= 1000:
        raise ValueError(f"fps must be in (0, 1000], got {fps}")
    n = int(round(duration_s * fps))
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence([*subject.seed, trial_seed])))
    y_noise = rng.standard_normal((len(ALL_JOINTS), n))
    extra_noise = rng.standard_normal((len(ALL_JOINTS), n))
    z_noise = rng.standard_normal((len(ALL_JOINTS), n))

    t = np.arange(n) / fps
    x_body = _walk_profile(n, fps, duration_s)
    f = subject.step_frequency_hz
    ys = np.empty((len(ALL_JOINTS), n))
    zs = np.empty((len(ALL_JOINTS), n))
    amplitudes: dict[JointId, float] = {}
    for i, j in enumerate(ALL_JOINTS):
        hit = j in impairment.affected
        amp = subject.amplitude_m[j] * (impairment.amplitude_scale if hit else 1.0)
        phase = subject.phase_rad[j] + (impairment.phase_shift_rad if hit else 0.0)
        amplitudes[j] = amp
        y = (subject.baseline_m[j]
             + amp * np.sin(2 * np.pi * f * t + phase)
             + subject.noise_sigma_m[j] * y_noise[i])
        if hit and impairment.extra_noise_m > 0:
            y = y + impairment.extra_noise_m * extra_noise[i]
        ys[i] = y
        zs[i] = (_Z_OFFSET_M[j]
                 + 0.01 * np.sin(2 * np.pi * (f / 2) * t + 0.7 * i)
                 + 0.002 * z_noise[i])

    frames = []
    for k in range(n):
        joints = {j: JointSample(float(x_body[k]), float(ys[i][k]), float(zs[i][k]),
                                 TrackState.TRACKED)
                  for i, j in enumerate(ALL_JOINTS)}
        frames.append(Frame(frame_index=k,
                            timestamp_ms=int(math.floor(1000.0 * k / fps)),
                            joints=joints))
    trial = Trial(
        subject_id=subject.subject_id,
        condition=impairment.condition,
        camera=CameraView.SAGITTAL,
        trial_index=max(trial_seed, 1),
        frames=tuple(frames),
        fps_nominal=fps,
    )
    truth = TrialTruth(turnaround_frame=int(round(duration_s / 2 * fps)),
                       amplitudes_m=amplitudes)
    return GeneratedTrial(trial=trial, truth=truth)


def dropout_model(trial: Trial, rate: float, max_run: int, seed: int) -> Trial:
    """Inject seeded not_tracked runs, about ``rate`` of samples per joint.

    Runs are at most ``max_run`` frames and placed with two clear frames
    between them, so no missing run ever exceeds ``max_run``.  The first
    and last frames stay tracked.  Dropped samples get zeroed
    coordinates, as a tracker that lost the joint would report.
    """
    if not 0 <= rate < 1:
        raise ValueError(f"rate must be in [0, 1), got {rate}")
    if max_run < 1:
        raise ValueError(f"max_run must be >= 1, got {max_run}")
    if rate == 0:
        return trial
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed])))
    n = trial.n_frames
    masks: dict[JointId, np.ndarray] = {}
    for j in ALL_JOINTS:
        marked = np.zeros(n, dtype=bool)
        target = int(round(rate * n))
        count = 0
        attempts = 0
        while count < target and attempts < 10 * n:
            attempts += 1
            run = int(rng.integers(1, max_run + 1))
            if run >= n - 1:
                continue
            start = int(rng.integers(1, n - run))
            lo = max(0, start - 2)
            hi = min(n, start + run + 2)
            if marked[lo:hi].any():
                continue
            marked[start:start + run] = True
            count += run
        masks[j] = marked
    frames = []
    for k, frame in enumerate(trial.frames):
        joints = {}
        for j in ALL_JOINTS:
            if masks[j][k]:
                joints[j] = JointSample(0.0, 0.0, 0.0, TrackState.NOT_TRACKED)
            else:
                joints[j] = frame.joints[j]
        frames.append(Frame(frame_index=frame.frame_index,
                            timestamp_ms=frame.timestamp_ms, joints=joints))
    return Trial(subject_id=trial.subject_id, condition=trial.condition,
                 camera=trial.camera, trial_index=trial.trial_index,
                 frames=tuple(frames), fps_nominal=trial.fps_nominal)


class SessionTrial(NamedTuple):
    manifest: SessionManifest
    trial: Trial
    truth: TrialTruth

    @property
    def stem(self) -> str:
        return self.manifest.frames_file.removesuffix(".frames.csv")


def generate_session_trials(n_subjects: int = 3, trials_per_condition: int = 3,
                            base_seed: int = 42, duration_s: float = 10.0,
                            fps: float = 30.0,
                            impairments: Mapping[Condition, ImpairmentSpec] | None = None,
                            ) -> Iterator[SessionTrial]:
    """All session trials, in canonical (subject, condition, trial) order."""
    if n_subjects < 1:
        raise ValueError(f"n_subjects must be >= 1, got {n_subjects}")
    if trials_per_condition < 1:
        raise ValueError(f"trials_per_condition must be >= 1, got {trials_per_condition}")
    if impairments is None:
        impairments = {c: ImpairmentSpec.for_condition(c) for c in Condition}
    for s_idx in range(n_subjects):
        subject = subject_model(base_seed, s_idx)
        for condition in Condition:
            spec = impairments[condition]
            for t_idx in range(1, trials_per_condition + 1):
                generated = generate_trial(subject, spec, t_idx,
                                           duration_s=duration_s, fps=fps)
                stem = f"{subject.subject_id}_{condition.value}_t{t_idx}"
                manifest = SessionManifest(
                    subject_id=subject.subject_id,
                    condition=condition,
                    camera=CameraView.SAGITTAL,
                    trial_index=t_idx,
                    fps_nominal=fps,
                    path_length_ft=PATH_FT,
                    frames_file=f"{stem}.frames.csv",
                )
                yield SessionTrial(manifest=manifest, trial=generated.trial,
                                   truth=generated.truth)


def generate_session(out_dir: Path | str, n_subjects: int = 3,
                     trials_per_condition: int = 3, base_seed: int = 42,
                     duration_s: float = 10.0, fps: float = 30.0,
                     impairments: Mapping[Condition, ImpairmentSpec] | None = None,
                     ) -> list[Path]:
    """Write a full session to disk; returns the manifest paths written.

    Per trial: ``<stem>.manifest.json``, ``<stem>.frames.csv``, and a
    ``<stem>.truth.json`` ground-truth sidecar.  Re-running with the same
    arguments reproduces every file byte-for-byte.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_paths = []
    for row in generate_session_trials(
            n_subjects=n_subjects, trials_per_condition=trials_per_condition,
            base_seed=base_seed, duration_s=duration_s, fps=fps,
            impairments=impairments):
        manifest, trial, truth = row.manifest, row.trial, row.truth
        stem = row.stem
        (out / manifest.frames_file).write_text(write_frames_csv(trial.frames),
                                                encoding="utf-8", newline="")
        mpath = out / f"{stem}.manifest.json"
        mpath.write_text(write_manifest(manifest), encoding="utf-8", newline="")
        (out / f"{stem}.truth.json").write_text(truth.to_json(),
                                                encoding="utf-8", newline="")
        manifest_paths.append(mpath)
    return manifest_paths
