"""Gait profiles: per-trial and per-condition entropy vectors.

A trial profile holds, per joint, the entropy of the out segment, the
back segment, and their mean (defined only when both segments are).  A
condition profile aggregates the trial means of one subject walking one
condition in front of one camera: per joint, mean and sample standard
deviation over the trials where the value was defined.  Joints that are
defined in no trial are excluded from the profile and listed with their
reasons rather than silently dropped.

Profile files are plain CSV with ``#`` comment headers carrying
identity and configuration, so a written profile is self-describing and
can be re-read for comparison and rendering.  Floats are written in
shortest round-trip form; re-reading a written file reproduces the
exact values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .core import Axis, CameraView, Condition, JointId, Trial
from .entropy import (EntropyConfig, EntropyValue, ToleranceRule, UndefinedReason,
                      sample_entropy_variant)
from .ingest import FormatError
from .preprocess import GapError, SegmentationResult, extract_series


class JointEntropy(NamedTuple):
    """One joint's entropy over the two walk segments and their mean."""

    se_out: EntropyValue
    se_back: EntropyValue
    se_mean: EntropyValue


class ProfileStat(NamedTuple):
    """Across-trial aggregate for one joint."""

    mean: float
    sd: float
    n_trials: int


@dataclass(frozen=True)
class TrialProfile:
    """Per-joint entropy of one trial."""

    subject_id: str
    condition: Condition
    camera: CameraView
    trial_index: int
    config: EntropyConfig
    entries: Mapping[JointId, JointEntropy]

    def __post_init__(self) -> None:
        for joint, e in self.entries.items():
            both = e.se_out.is_defined and e.se_back.is_defined
            if both != e.se_mean.is_defined:
                raise ValueError(f"{joint}: se_mean must be defined iff both segments are")
            if both and e.se_mean.value != (e.se_out.value + e.se_back.value) / 2.0:
                raise ValueError(f"{joint}: se_mean must equal the segment mean")

    @property
    def joints(self) -> tuple[JointId, ...]:
        return tuple(self.entries)


@dataclass(frozen=True)
class ConditionProfile:
    """Across-trial profile of one subject x condition x camera."""

    subject_id: str
    condition: Condition
    camera: CameraView
    config: EntropyConfig
    entries: Mapping[JointId, ProfileStat]
    exclusions: tuple[tuple[JointId, str], ...] = ()

    def __post_init__(self) -> None:
        for joint, stat in self.entries.items():
            if stat.n_trials < 1:
                raise ValueError(f"{joint}: n_trials must be >= 1")
            if stat.n_trials == 1 and stat.sd != 0.0:
                raise ValueError(f"{joint}: sd must be 0 for a single trial")

    @property
    def joints(self) -> tuple[JointId, ...]:
        return tuple(self.entries)


def trial_profile(trial: Trial, segmentation: SegmentationResult,
                  joints: Iterable[JointId], config: EntropyConfig,
                  axis: Axis = Axis.Y, max_gap: int = 5) -> TrialProfile:
    """Entropy per joint over both segments of one trial.

    Nothing raises per joint: a segment whose series cannot be extracted
    (irreparable gap, almost nothing tracked) is carried as
    undefined(too_short), since either way there is too little usable
    contiguous data.
    """
    entries: dict[JointId, JointEntropy] = {}
    for joint in joints:
        per_segment = []
        for segment in (segmentation.out, segmentation.back):
            try:
                series = extract_series(trial, segment, joint, axis=axis, max_gap=max_gap)
            except GapError:
                per_segment.append(EntropyValue.undefined(UndefinedReason.TOO_SHORT))
                continue
            per_segment.append(sample_entropy_variant(series.values, config))
        se_out, se_back = per_segment
        if se_out.is_defined and se_back.is_defined:
            se_mean = EntropyValue.defined((se_out.value + se_back.value) / 2.0)
        else:
            se_mean = EntropyValue.undefined(se_out.reason or se_back.reason)
        entries[joint] = JointEntropy(se_out, se_back, se_mean)
    return TrialProfile(subject_id=trial.subject_id, condition=trial.condition,
                        camera=trial.camera, trial_index=trial.trial_index,
                        config=config, entries=entries)


def condition_profile(profiles: list[TrialProfile]) -> ConditionProfile:
    """Aggregate trial profiles of one subject x condition x camera.

    Per joint: mean and sample SD (divisor n-1, 0 for a single trial)
    over the trials whose se_mean is defined.  Joints defined in no
    trial land in the exclusion list with their per-trial reasons.
    """
    if not profiles:
        raise ValueError("need at least one trial profile")
    first = profiles[0]
    for p in profiles[1:]:
        if (p.subject_id, p.condition, p.camera) != (
                first.subject_id, first.condition, first.camera):
            raise ValueError(
                f"mixed trial identities: {p.subject_id}/{p.condition.value}/{p.camera.value}"
                f" vs {first.subject_id}/{first.condition.value}/{first.camera.value}")
        if p.config != first.config:
            raise ValueError("mixed entropy configs across trial profiles")
        if p.joints != first.joints:
            raise ValueError("trial profiles cover different joints")
    # canonical trial order so the reduction is exactly permutation-invariant
    ordered = sorted(profiles, key=lambda p: p.trial_index)
    entries: dict[JointId, ProfileStat] = {}
    exclusions: list[tuple[JointId, str]] = []
    for joint in first.joints:
        values = [p.entries[joint].se_mean.value for p in ordered
                  if p.entries[joint].se_mean.is_defined]
        if not values:
            reasons = ";".join(
                f"t{p.trial_index}={p.entries[joint].se_mean.reason.value}" for p in ordered)
            exclusions.append((joint, reasons))
            continue
        n = len(values)
        mean = float(np.mean(values))
        sd = float(np.std(values, ddof=1)) if n > 1 else 0.0
        entries[joint] = ProfileStat(mean=mean, sd=sd, n_trials=n)
    return ConditionProfile(subject_id=first.subject_id, condition=first.condition,
                            camera=first.camera, config=first.config,
                            entries=entries, exclusions=tuple(exclusions))


def profile_distance(p: ConditionProfile, q: ConditionProfile,
                     joints: Iterable[JointId]) -> float:
    """Euclidean distance between two profiles over the given joints, nats."""
    total = 0.0
    for joint in joints:
        for prof in (p, q):
            if joint not in prof.entries:
                raise ValueError(
                    f"joint {joint} missing from profile "
                    f"{prof.subject_id}/{prof.condition.value}/{prof.camera.value}")
        d = p.entries[joint].mean - q.entries[joint].mean
        total += d * d
    return math.sqrt(total)


# File format helpers


def config_to_json(config: EntropyConfig) -> str:
    """Canonical one-line JSON for an entropy config (sorted keys)."""
    return json.dumps({
        "m": config.m,
        "tolerance": {"kind": config.tolerance.kind, "value": config.tolerance.value},
        "variant": config.variant,
        "detrend_window": config.detrend_window,
        "min_length": config.min_length,
    }, sort_keys=True)


def config_from_json(text: str) -> EntropyConfig:
    obj = json.loads(text)
    return EntropyConfig(
        m=obj["m"],
        tolerance=ToleranceRule(obj["tolerance"]["kind"], obj["tolerance"]["value"]),
        variant=obj["variant"],
        detrend_window=obj["detrend_window"],
        min_length=obj["min_length"],
    )


def _fmt(value: float) -> str:
    return repr(float(value))


def _value_and_flag(part: str, v: EntropyValue) -> tuple[str, str | None]:
    if v.is_defined:
        return _fmt(v.value), None
    return "", f"{part}={v.reason.value}"


def write_trial_profile_csv(profile: TrialProfile,
                            extra_comments: Iterable[str] = ()) -> str:
    """Trial profile CSV: per-joint segment values, mean, and flags.

    Undefined values are empty fields; the flags column lists
    ``part=reason`` tokens for every undefined part.
    """
    lines = [f"# {c}" for c in extra_comments]
    lines += [
        f"# subject: {profile.subject_id}",
        f"# condition: {profile.condition.value}",
        f"# camera: {profile.camera.value}",
        f"# trial: {profile.trial_index}",
        f"# config: {config_to_json(profile.config)}",
        "joint,se_out,se_back,se_mean,flags",
    ]
    for joint, e in profile.entries.items():
        cells, flags = [], []
        for part, v in zip(("se_out", "se_back", "se_mean"), e):
            cell, flag = _value_and_flag(part, v)
            cells.append(cell)
            if flag:
                flags.append(flag)
        lines.append(f"{joint},{cells[0]},{cells[1]},{cells[2]},{';'.join(flags)}")
    return "\n".join(lines) + "\n"


def write_condition_profile_csv(profile: ConditionProfile,
                                extra_comments: Iterable[str] = ()) -> str:
    """Condition profile CSV: per-joint across-trial mean, SD, and count."""
    lines = [f"# {c}" for c in extra_comments]
    lines += [
        f"# subject: {profile.subject_id}",
        f"# condition: {profile.condition.value}",
        f"# camera: {profile.camera.value}",
        f"# config: {config_to_json(profile.config)}",
    ]
    lines += [f"# excluded: {joint}={reasons}" for joint, reasons in profile.exclusions]
    lines.append("joint,se_mean,se_sd,n_trials")
    for joint, stat in profile.entries.items():
        lines.append(f"{joint},{_fmt(stat.mean)},{_fmt(stat.sd)},{stat.n_trials}")
    return "\n".join(lines) + "\n"


def read_condition_profile_csv(text: str) -> ConditionProfile:
    """Re-read a written condition profile; values round-trip exactly.

    Unknown comment keys are ignored, so files carrying extra metadata
    (such as a full run configuration) parse the same way.
    """
    meta: dict[str, str] = {}
    exclusions: list[tuple[JointId, str]] = []
    entries: dict[JointId, ProfileStat] = {}
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            key, _, value = body.partition(":")
            key = key.strip()
            if key == "excluded":
                joint_tok, _, reasons = value.strip().partition("=")
                try:
                    exclusions.append((JointId.parse(joint_tok), reasons))
                except ValueError as err:
                    raise FormatError(f"{err} at line {lineno}") from None
            else:
                meta.setdefault(key, value.strip())
            continue
        if not header_seen:
            if line.strip() != "joint,se_mean,se_sd,n_trials":
                raise FormatError(f"bad profile header at line {lineno}: {line!r}")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise FormatError(f"expected 4 fields at line {lineno}, got {len(parts)}")
        try:
            joint = JointId.parse(parts[0])
            entries[joint] = ProfileStat(mean=float(parts[1]), sd=float(parts[2]),
                                         n_trials=int(parts[3]))
        except ValueError as err:
            raise FormatError(f"bad profile row at line {lineno}: {err}") from None
    missing = [k for k in ("subject", "condition", "camera", "config") if k not in meta]
    if missing:
        raise FormatError(f"profile file missing metadata {missing}")
    if not header_seen:
        raise FormatError("profile file has no data header")
    try:
        return ConditionProfile(
            subject_id=meta["subject"],
            condition=Condition.parse(meta["condition"]),
            camera=CameraView.parse(meta["camera"]),
            config=config_from_json(meta["config"]),
            entries=entries,
            exclusions=tuple(exclusions),
        )
    except (ValueError, KeyError, json.JSONDecodeError) as err:
        raise FormatError(f"bad profile metadata: {err}") from None
