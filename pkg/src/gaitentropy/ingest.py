"""Reading and writing recording files: frames CSV and session manifests.

Frames CSV is long-format, one row per joint per frame, header exactly
``frame,timestamp_ms,joint,x_m,y_m,z_m,state``.  Rows may arrive
joint-major or frame-major; parsing reorders by frame index.  Every
malformed input produces a positioned error, never a silent partial
result.  ``write_frames_csv`` emits the canonical form (frame-major,
canonical joint order, LF line endings, shortest round-trip float
representation), and parse/write round-trips such files byte-for-byte.

A session directory holds one ``*.manifest.json`` per trial; manifests
are parsed strictly (unknown keys rejected) so a typo in a condition
label cannot silently corrupt a cross-condition comparison.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .core import (ALL_JOINTS, CameraView, Condition, Frame, JointId, JointSample,
                   TrackState, Trial)

FRAMES_CSV_HEADER = ("frame", "timestamp_ms", "joint", "x_m", "y_m", "z_m", "state")

MANIFEST_KEYS = ("subject_id", "condition", "camera", "trial_index",
                 "fps_nominal", "path_length_ft", "frames_file")


class FormatError(ValueError):
    """Malformed input file; the message carries the position."""


@dataclass(frozen=True)
class SessionManifest:
    """Identity and recording parameters of one trial."""

    subject_id: str
    condition: Condition
    camera: CameraView
    trial_index: int
    fps_nominal: float = 30.0
    path_length_ft: float = 10.0
    frames_file: str = ""

    def __post_init__(self) -> None:
        if not self.subject_id:
            raise ValueError("subject_id must be non-empty")
        if self.trial_index < 1:
            raise ValueError(f"trial_index must be >= 1, got {self.trial_index}")
        if not self.fps_nominal > 0:
            raise ValueError(f"fps_nominal must be > 0, got {self.fps_nominal}")
        if not self.path_length_ft > 0:
            raise ValueError(f"path_length_ft must be > 0, got {self.path_length_ft}")
        if not self.frames_file:
            raise ValueError("frames_file must be non-empty")


@dataclass(frozen=True)
class ValidationReport:
    """Data-quality findings for one trial.

    ``errors`` are (field, message) pairs; an empty list means the trial
    is accepted for analysis.  Nothing here raises: suspect recordings
    are loaded, examined, and reported on.
    """

    subject_id: str
    condition: Condition
    camera: CameraView
    trial_index: int
    observed_fps: float
    untracked_fraction: Mapping[JointId, float]
    errors: tuple[tuple[str, str], ...] = field(default=())
    warnings: tuple[str, ...] = field(default=())

    @property
    def accepted(self) -> bool:
        return not self.errors


def _fmt(value: float) -> str:
    """Shortest decimal that round-trips to the same float."""
    return repr(float(value))


def parse_frames_csv(text: str) -> tuple[Frame, ...]:
    """Parse frames CSV text into Frames ordered by frame index.

    Fail-fast: the first malformed row raises FormatError naming the
    line; an incomplete frame (fewer than 15 joints) is reported after
    the full read, since its rows may be scattered.
    """
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("empty file: missing header") from None
    if tuple(h.strip() for h in header) != FRAMES_CSV_HEADER:
        raise FormatError(
            f"bad header {','.join(header)!r}, expected {','.join(FRAMES_CSV_HEADER)!r}")
    per_frame: dict[int, dict[JointId, JointSample]] = {}
    timestamps: dict[int, int] = {}
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 7:
            raise FormatError(f"expected 7 fields at line {line}, got {len(row)}")
        f_tok, ts_tok, j_tok, x_tok, y_tok, z_tok, s_tok = row
        try:
            fi = int(f_tok)
            ts = int(ts_tok)
        except ValueError:
            raise FormatError(
                f"non-integer frame/timestamp {f_tok!r},{ts_tok!r} at line {line}") from None
        try:
            joint = JointId.parse(j_tok)
        except ValueError:
            raise FormatError(f"unknown joint {j_tok!r} at line {line}") from None
        coords = []
        for tok in (x_tok, y_tok, z_tok):
            try:
                v = float(tok)
            except ValueError:
                raise FormatError(f"non-numeric coordinate {tok!r} at line {line}") from None
            if not math.isfinite(v):
                raise FormatError(f"non-finite coordinate {tok!r} at line {line}")
            coords.append(v)
        try:
            state = TrackState.parse(s_tok)
        except ValueError as err:
            raise FormatError(f"{err} at line {line}") from None
        joints = per_frame.setdefault(fi, {})
        if joint in joints:
            raise FormatError(f"duplicate joint {joint} for frame {fi} at line {line}")
        if fi in timestamps and timestamps[fi] != ts:
            raise FormatError(
                f"conflicting timestamp {ts} for frame {fi} at line {line} "
                f"(previously {timestamps[fi]})")
        timestamps[fi] = ts
        joints[joint] = JointSample(coords[0], coords[1], coords[2], state)
    if not per_frame:
        raise FormatError("no frame rows")
    for fi in sorted(per_frame):
        n = len(per_frame[fi])
        if n != len(ALL_JOINTS):
            raise FormatError(f"frame {fi}: {n}/{len(ALL_JOINTS)} joints")
    return tuple(Frame(frame_index=fi, timestamp_ms=timestamps[fi], joints=per_frame[fi])
                 for fi in sorted(per_frame))


def write_frames_csv(frames: tuple[Frame, ...]) -> str:
    """Canonical frames CSV text: frame-major, canonical joint order, LF."""
    out = [",".join(FRAMES_CSV_HEADER)]
    for f in sorted(frames, key=lambda fr: fr.frame_index):
        for joint in ALL_JOINTS:
            s = f.joints[joint]
            out.append(f"{f.frame_index},{f.timestamp_ms},{joint},"
                       f"{_fmt(s.x)},{_fmt(s.y)},{_fmt(s.z)},{s.state.value}")
    return "\n".join(out) + "\n"


def _num_field(raw: object, key: str) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise FormatError(f"manifest {key} must be a number, got {raw!r}")
    return float(raw)


def parse_manifest(text: str) -> SessionManifest:
    """Parse a manifest JSON object, strictly: exactly the documented keys."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise FormatError(f"manifest is not valid JSON: {err}") from None
    if not isinstance(obj, dict):
        raise FormatError("manifest must be a JSON object")
    missing = [k for k in MANIFEST_KEYS if k not in obj]
    if missing:
        raise FormatError(f"manifest missing keys {missing}")
    unknown = [k for k in obj if k not in MANIFEST_KEYS]
    if unknown:
        raise FormatError(f"unknown manifest keys {unknown}")
    if not isinstance(obj["subject_id"], str):
        raise FormatError(f"manifest subject_id must be a string, got {obj['subject_id']!r}")
    if not isinstance(obj["frames_file"], str):
        raise FormatError(f"manifest frames_file must be a string, got {obj['frames_file']!r}")
    try:
        condition = Condition.parse(str(obj["condition"]))
        camera = CameraView.parse(str(obj["camera"]))
    except ValueError as err:
        raise FormatError(str(err)) from None
    trial_index = obj["trial_index"]
    if isinstance(trial_index, bool) or not isinstance(trial_index, int):
        raise FormatError(f"manifest trial_index must be an integer, got {trial_index!r}")
    try:
        return SessionManifest(
            subject_id=obj["subject_id"],
            condition=condition,
            camera=camera,
            trial_index=trial_index,
            fps_nominal=_num_field(obj["fps_nominal"], "fps_nominal"),
            path_length_ft=_num_field(obj["path_length_ft"], "path_length_ft"),
            frames_file=obj["frames_file"],
        )
    except ValueError as err:
        raise FormatError(str(err)) from None


def write_manifest(manifest: SessionManifest) -> str:
    """Canonical manifest JSON text (documented key order, 2-space indent)."""
    def plain(v: float) -> object:
        return int(v) if float(v).is_integer() else v
    obj = {
        "subject_id": manifest.subject_id,
        "condition": manifest.condition.value,
        "camera": manifest.camera.value,
        "trial_index": manifest.trial_index,
        "fps_nominal": plain(manifest.fps_nominal),
        "path_length_ft": plain(manifest.path_length_ft),
        "frames_file": manifest.frames_file,
    }
    return json.dumps(obj, indent=2) + "\n"


def validate_trial(trial: Trial, manifest: SessionManifest,
                   gate: float = 0.10) -> ValidationReport:
    """Examine one trial's data quality; findings land in the report.

    Errors (reject the trial): per-joint untracked fraction above the
    gate; non-increasing timestamps.  Warnings: observed fps more than
    10% off nominal.
    """
    errors: list[tuple[str, str]] = []
    warnings: list[str] = []
    ts = [f.timestamp_ms for f in trial.frames]
    for i in range(1, len(ts)):
        if ts[i] <= ts[i - 1]:
            errors.append(("timestamps", f"non-increasing timestamp at index {i}"))
    elapsed_s = (ts[-1] - ts[0]) / 1000.0
    observed_fps = (trial.n_frames - 1) / elapsed_s if elapsed_s > 0 else float("nan")
    nominal = manifest.fps_nominal
    if math.isfinite(observed_fps) and abs(observed_fps - nominal) > 0.10 * nominal:
        warnings.append(
            f"observed fps {observed_fps:.2f} deviates from nominal {nominal:g} by more than 10%")
    untracked: dict[JointId, float] = {}
    n = trial.n_frames
    for joint in ALL_JOINTS:
        bad = sum(1 for f in trial.frames if f.joints[joint].state is TrackState.NOT_TRACKED)
        frac = bad / n
        untracked[joint] = frac
        if frac > gate:
            errors.append((joint.value, f"{joint} untracked {frac:.0%} > {gate:.0%}"))
    return ValidationReport(
        subject_id=trial.subject_id,
        condition=trial.condition,
        camera=trial.camera,
        trial_index=trial.trial_index,
        observed_fps=observed_fps,
        untracked_fraction=untracked,
        errors=tuple(errors),
        warnings=tuple(warnings),
    )


def discover_session(directory: Path | str) -> list[Path]:
    """Manifest paths in a session directory, sorted by name."""
    return sorted(Path(directory).glob("*.manifest.json"))


def load_trial(manifest_path: Path | str) -> tuple[Trial, SessionManifest]:
    """Load one trial: manifest plus its frames file (path relative to it)."""
    manifest_path = Path(manifest_path)
    manifest = parse_manifest(manifest_path.read_text(encoding="utf-8"))
    frames_path = manifest_path.parent / manifest.frames_file
    try:
        text = frames_path.read_text(encoding="utf-8")
    except OSError as err:
        raise FormatError(f"cannot read frames file {frames_path}: {err}") from None
    frames = parse_frames_csv(text)
    return Trial(
        subject_id=manifest.subject_id,
        condition=manifest.condition,
        camera=manifest.camera,
        trial_index=manifest.trial_index,
        frames=frames,
        fps_nominal=manifest.fps_nominal,
    ), manifest
