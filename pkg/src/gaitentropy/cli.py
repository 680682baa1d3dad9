"""Command-line front end for the gait-entropy pipeline.

Subcommands: ``synth`` (generate a synthetic session), ``validate``
(quality-gate a session), ``analyze`` (per-trial entropy profile),
``profile`` (per-condition aggregate), ``compare`` (condition delta
table), ``glyph`` (star-glyph SVG).

Exit codes: 0 success; 1 domain failure (quality gates, no matching
data, impossible comparisons); 2 usage or file-format errors.

Reproducibility: every output file carries the full run configuration
in its comment header (``# run_config: {...}`` in CSVs, an XML comment
in SVGs); re-running the command with that configuration and the same
inputs reproduces the file byte-for-byte.  Output files are written in
canonical (subject, condition, camera, trial) order whatever the
``--jobs`` level, so parallel runs change wall time, never bytes.

The only environment integration is ``GAITENTROPY_OUT``: when set, it
provides the output directory for commands where ``--out`` was not
given explicitly.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .core import Axis, Condition, JointId, JOINT_GROUP_NAMES, joint_group
from .entropy import EntropyConfig, ToleranceRule, variant_names
from .glyphcompare import compare_conditions, glyph_layout, render_svg, write_delta_csv
from .ingest import (FormatError, discover_session, load_trial, parse_manifest,
                     validate_trial)
from .preprocess import SegmentationConfig, SegmentationError, segment_walks
from .profile import (TrialProfile, condition_profile, read_condition_profile_csv,
                      trial_profile, write_condition_profile_csv,
                      write_trial_profile_csv)
from .synthgait import generate_session

ENV_OUT = "GAITENTROPY_OUT"

_CONDITION_ORDER = {c: i for i, c in enumerate(Condition)}


def parse_joint_list(token: str) -> tuple[JointId, ...]:
    """A joint group name or a comma-separated list of joint tokens."""
    if token in JOINT_GROUP_NAMES:
        return joint_group(token)
    return tuple(JointId.parse(t) for t in token.split(","))


def joints_label(joints: Sequence[JointId]) -> str:
    """Filename-safe label: the group name when the list is exactly a
    named group, else the joint names joined with '-'."""
    chosen = tuple(joints)
    for name in JOINT_GROUP_NAMES:
        if chosen == joint_group(name):
            return name
    return "-".join(j.value for j in chosen)


@dataclass(frozen=True)
class RunConfig:
    """Every knob that shapes analysis output, serializable to one line."""

    m: int = 2
    r_kind: str = "relative"
    r_value: float = 0.2
    variant: str = "sampen"
    detrend_window: int | None = None
    min_length: int = 60
    max_gap: int = 5
    buffer_s: float = 0.5
    min_segment_s: float = 2.0
    gate: float = 0.10
    joints: str = "all15"
    axis: str = "Y"

    def entropy_config(self) -> EntropyConfig:
        return EntropyConfig(m=self.m, tolerance=ToleranceRule(self.r_kind, self.r_value),
                             variant=self.variant, detrend_window=self.detrend_window,
                             min_length=self.min_length)

    def segmentation_config(self) -> SegmentationConfig:
        return SegmentationConfig(buffer_s=self.buffer_s,
                                  min_segment_s=self.min_segment_s,
                                  max_gap=self.max_gap)

    def joint_list(self) -> tuple[JointId, ...]:
        return parse_joint_list(self.joints)

    def axis_enum(self) -> Axis:
        return Axis.parse(self.axis)

    def to_json(self, **extra: object) -> str:
        obj = asdict(self)
        obj.update(extra)
        return json.dumps(obj, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> tuple["RunConfig", dict]:
        obj = json.loads(text)
        known = {f for f in cls.__dataclass_fields__}
        extras = {k: v for k, v in obj.items() if k not in known}
        return cls(**{k: v for k, v in obj.items() if k in known}), extras


def read_run_config(text: str) -> tuple[RunConfig, dict] | None:
    """Recover the embedded RunConfig from an output file, if present."""
    for line in text.splitlines():
        for prefix, suffix in (("# run_config: ", ""), ("<!-- run_config: ", " -->")):
            if line.startswith(prefix) and line.endswith(suffix):
                payload = line[len(prefix):len(line) - len(suffix)] if suffix else line[len(prefix):]
                return RunConfig.from_json(payload)
    return None


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="")


def _map_jobs(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _trial_sort_key(p: TrialProfile) -> tuple:
    return (p.subject_id, _CONDITION_ORDER[p.condition], p.camera.value, p.trial_index)


# Command bodies, callable directly from tests with explicit parameters.


def run_validate(session_dir: str, gate: float) -> tuple[list[str], int]:
    manifests = discover_session(session_dir)
    if not manifests:
        raise ValueError(f"no manifests found in {session_dir}")
    lines = []
    accepted = 0
    for mp in manifests:
        try:
            trial, manifest = load_trial(mp)
        except FormatError as err:
            raise FormatError(f"{mp}: {err}") from None
        report = validate_trial(trial, manifest, gate=gate)
        ident = (f"{manifest.subject_id} {manifest.condition.value} "
                 f"t{manifest.trial_index} {manifest.camera.value}")
        if report.accepted:
            accepted += 1
            lines.append(f"{ident}: ok")
        else:
            lines.append(f"{ident}: REJECTED")
            lines.extend(f"  error: {msg}" for _, msg in report.errors)
        lines.extend(f"  warning: {msg}" for msg in report.warnings)
    lines.append(f"{accepted}/{len(manifests)} trials accepted")
    return lines, 0 if accepted == len(manifests) else 1


def _analyze_one(manifest_path: Path, cfg: RunConfig) -> tuple[TrialProfile, str]:
    trial, manifest = load_trial(manifest_path)
    report = validate_trial(trial, manifest, gate=cfg.gate)
    if not report.accepted:
        msgs = "; ".join(msg for _, msg in report.errors)
        raise ValueError(f"{manifest_path}: trial rejected: {msgs}")
    segmentation = segment_walks(trial, cfg.segmentation_config())
    prof = trial_profile(trial, segmentation, cfg.joint_list(), cfg.entropy_config(),
                         axis=cfg.axis_enum(), max_gap=cfg.max_gap)
    text = write_trial_profile_csv(prof, extra_comments=[f"run_config: {cfg.to_json()}"])
    return prof, text


def run_analyze(manifest_paths: Sequence[Path], cfg: RunConfig,
                jobs: int = 1) -> list[tuple[str, str]]:
    """Per-trial profile CSVs as (filename, text), in canonical order."""
    results = _map_jobs(lambda mp: _analyze_one(Path(mp), cfg), list(manifest_paths), jobs)
    results.sort(key=lambda pair: _trial_sort_key(pair[0]))
    out = []
    for prof, text in results:
        name = (f"{prof.subject_id}_{prof.condition.value}_{prof.camera.value}"
                f"_t{prof.trial_index}.trial_profile.csv")
        out.append((name, text))
    return out


def run_profile(session_dir: str, cfg: RunConfig,
                condition: Condition | None = None,
                jobs: int = 1) -> tuple[list[tuple[str, str]], list[str]]:
    """Condition-profile CSVs as (filename, text) plus log messages."""
    manifests = discover_session(session_dir)
    selected = []
    for mp in manifests:
        manifest = parse_manifest(Path(mp).read_text(encoding="utf-8"))
        if condition is None or manifest.condition is condition:
            selected.append(mp)
    if not selected:
        raise ValueError("no trials match the filter")

    messages: list[str] = []

    def _load(mp: Path):
        trial, manifest = load_trial(mp)
        report = validate_trial(trial, manifest, gate=cfg.gate)
        if not report.accepted:
            return ("rejected", mp, "; ".join(msg for _, msg in report.errors))
        try:
            segmentation = segment_walks(trial, cfg.segmentation_config())
        except SegmentationError as err:
            return ("rejected", mp, str(err))
        prof = trial_profile(trial, segmentation, cfg.joint_list(),
                             cfg.entropy_config(), axis=cfg.axis_enum(),
                             max_gap=cfg.max_gap)
        return ("ok", mp, prof)

    groups: dict[tuple, list[TrialProfile]] = {}
    for status, mp, payload in _map_jobs(_load, selected, jobs):
        if status == "rejected":
            messages.append(f"skipped {mp}: {payload}")
            continue
        prof = payload
        key = (prof.subject_id, _CONDITION_ORDER[prof.condition], prof.camera.value)
        groups.setdefault(key, []).append(prof)
    if not groups:
        raise ValueError("no accepted trials match the filter")
    outputs = []
    for key in sorted(groups):
        trials = sorted(groups[key], key=_trial_sort_key)
        cprof = condition_profile(trials)
        name = (f"{cprof.subject_id}_{cprof.condition.value}"
                f"_{cprof.camera.value}.condition_profile.csv")
        text = write_condition_profile_csv(
            cprof, extra_comments=[f"run_config: {cfg.to_json()}"])
        outputs.append((name, text))
    return outputs, messages


def run_compare(path_a: Path, path_b: Path, cfg: RunConfig, k_sd: float,
                joints_token: str | None = None) -> tuple[str, str, list[str]]:
    a = read_condition_profile_csv(Path(path_a).read_text(encoding="utf-8"))
    b = read_condition_profile_csv(Path(path_b).read_text(encoding="utf-8"))
    joints = parse_joint_list(joints_token) if joints_token else a.joints
    # embed the joints actually compared, so the file reproduces from its
    # own config even when the default (profile A's joints) was used
    token = joints_token if joints_token else ",".join(j.value for j in joints)
    cfg = replace(cfg, joints=token)
    table = compare_conditions(a, b, joints, k_sd=k_sd)
    # the joint selection is part of the name: the same pair of profiles
    # is commonly tabulated over several joint groups side by side
    name = (f"{a.subject_id}_{a.camera.value}_{a.condition.value}"
            f"_vs_{b.condition.value}.{joints_label(joints)}.delta.csv")
    text = write_delta_csv(table, extra_comments=[f"run_config: {cfg.to_json(k_sd=k_sd)}"])
    flagged = [r.joint.value for r in table.rows if r.flagged]
    messages = ["flagged: " + (", ".join(flagged) if flagged else "none")]
    return name, text, messages


def run_glyph(profile_paths: Sequence[Path], cfg: RunConfig,
              scale_max: float | None = None) -> tuple[str, str]:
    profiles = [read_condition_profile_csv(Path(p).read_text(encoding="utf-8"))
                for p in profile_paths]
    subjects = {p.subject_id for p in profiles}
    cameras = {p.camera for p in profiles}
    if len(subjects) > 1 or len(cameras) > 1:
        raise ValueError(f"glyph profiles must share subject and camera, "
                         f"got subjects {sorted(subjects)} and cameras "
                         f"{sorted(c.value for c in cameras)}")
    joints = parse_joint_list(cfg.joints)
    figure = glyph_layout(profiles, joints, scale_max)
    svg = render_svg(figure)
    lines = svg.split("\n")
    lines.insert(1, f"<!-- run_config: {cfg.to_json(scale_max=scale_max)} -->")
    name = (f"{profiles[0].subject_id}_{profiles[0].camera.value}_"
            + "_".join(p.condition.value for p in profiles)
            + f".{joints_label(joints)}.glyph.svg")
    return name, "\n".join(lines)


# Argument plumbing.


def _positive_int(token: str) -> int:
    try:
        v = int(token)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {token!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg_int(token: str) -> int:
    try:
        v = int(token)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {token!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _positive_float(token: str) -> float:
    try:
        v = float(token)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {token!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {v}")
    return v


def _nonneg_float(token: str) -> float:
    try:
        v = float(token)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {token!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _gate_fraction(token: str) -> float:
    v = _positive_float(token)
    if v > 1:
        raise argparse.ArgumentTypeError(f"gate must be within (0, 1], got {v}")
    return v


def _joints_token(token: str) -> str:
    try:
        parse_joint_list(token)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None
    return token


def _axis_token(token: str) -> str:
    try:
        return Axis.parse(token).value
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None


def _condition_token(token: str) -> Condition:
    try:
        return Condition.parse(token)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None


def _resolve_out(flag_value: str | None) -> Path:
    if flag_value is not None:
        return Path(flag_value)
    return Path(os.environ.get(ENV_OUT, "."))


def _config_from_args(args: argparse.Namespace, default_joints: str = "all15") -> RunConfig:
    kwargs = {}
    if getattr(args, "r_absolute", None) is not None:
        kwargs["r_kind"] = "absolute"
        kwargs["r_value"] = args.r_absolute
    elif getattr(args, "r", None) is not None:
        kwargs["r_kind"] = "relative"
        kwargs["r_value"] = args.r
    for field, attr in (("m", "m"), ("variant", "variant"),
                        ("detrend_window", "detrend_window"),
                        ("min_length", "min_length"), ("max_gap", "max_gap"),
                        ("buffer_s", "buffer"), ("min_segment_s", "min_segment"),
                        ("gate", "gate"), ("axis", "axis")):
        value = getattr(args, attr, None)
        if value is not None:
            kwargs[field] = value
    joints = getattr(args, "joints", None)
    kwargs["joints"] = joints if joints is not None else default_joints
    cfg = RunConfig(**kwargs)
    cfg.entropy_config()        # validate knob combinations early
    cfg.segmentation_config()
    return cfg


def _add_entropy_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--m", type=_positive_int, help="embedding dimension (default 2)")
    r_group = p.add_mutually_exclusive_group()
    r_group.add_argument("--r", type=_positive_float,
                         help="relative tolerance factor x sample SD (default 0.2)")
    r_group.add_argument("--r-absolute", type=_nonneg_float,
                         help="absolute tolerance in meters")
    p.add_argument("--variant", choices=variant_names(),
                   help="entropy variant (default sampen)")
    p.add_argument("--detrend-window", type=_positive_int,
                   help="odd window for the detrended variant")
    p.add_argument("--min-length", type=_positive_int,
                   help="minimum usable series length (default 60)")


def _add_preprocess_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-gap", type=_nonneg_int,
                   help="longest repairable tracking gap, frames (default 5)")
    p.add_argument("--buffer", type=_positive_float,
                   help="seconds excluded around the turnaround (default 0.5)")
    p.add_argument("--min-segment", type=_positive_float,
                   help="minimum walk segment length, seconds (default 2.0)")
    p.add_argument("--gate", type=_gate_fraction,
                   help="max untracked fraction per joint (default 0.10)")


def _add_selection_flags(p: argparse.ArgumentParser, default_joints: str) -> None:
    p.add_argument("--joints", type=_joints_token,
                   help=f"joint group ({', '.join(JOINT_GROUP_NAMES)}) or "
                        f"comma-separated joints (default {default_joints})")
    p.add_argument("--axis", type=_axis_token,
                   help="axis letter or name: X/anteroposterior, Y/vertical, "
                        "Z/mediolateral (default Y)")


def _add_out_flags(p: argparse.ArgumentParser, jobs: bool = True) -> None:
    p.add_argument("--out", help=f"output directory (default: ${ENV_OUT} or .)")
    if jobs:
        p.add_argument("--jobs", type=_positive_int, default=1,
                       help="parallel workers; output bytes are identical at any level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaitentropy",
        description="Per-joint sample-entropy gait profiles from depth-camera "
                    "skeleton recordings.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="quality-gate every trial in a session")
    p.add_argument("session_dir")
    p.add_argument("--gate", type=_gate_fraction,
                   help="max untracked fraction per joint (default 0.10)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="per-trial entropy profile CSVs")
    p.add_argument("manifests", nargs="+", metavar="MANIFEST")
    _add_entropy_flags(p)
    _add_preprocess_flags(p)
    _add_selection_flags(p, "all15")
    _add_out_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("profile", help="per-condition aggregate profile CSVs")
    p.add_argument("session_dir")
    p.add_argument("--condition", type=_condition_token,
                   help="only this condition (NW, KB, AB)")
    _add_entropy_flags(p)
    _add_preprocess_flags(p)
    _add_selection_flags(p, "all15")
    _add_out_flags(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("compare", help="delta table between two condition profiles")
    p.add_argument("profile_a")
    p.add_argument("profile_b")
    p.add_argument("--k-sd", type=_positive_float, default=2.0,
                   help="flag threshold in pooled SDs (default 2.0)")
    p.add_argument("--joints", type=_joints_token,
                   help="joint group or comma-separated joints "
                        "(default: joints of PROFILE_A)")
    _add_out_flags(p, jobs=False)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("glyph", help="star-glyph SVG overlaying condition profiles")
    p.add_argument("profiles", nargs="+", metavar="PROFILE")
    p.add_argument("--joints", type=_joints_token,
                   help="joint group or comma-separated joints (default main5)")
    p.add_argument("--scale-max", type=_positive_float,
                   help="radial scale in nats (default: auto from the data)")
    _add_out_flags(p, jobs=False)
    p.set_defaults(func=cmd_glyph)

    p = sub.add_parser("synth", help="generate a seeded synthetic session")
    p.add_argument("--subjects", type=_positive_int, default=3)
    p.add_argument("--trials", type=_positive_int, default=3,
                   help="trials per condition (default 3)")
    p.add_argument("--seed", type=int, default=42)
    _add_out_flags(p, jobs=False)
    p.set_defaults(func=cmd_synth)
    return parser


def cmd_validate(args: argparse.Namespace) -> int:
    gate = args.gate if args.gate is not None else 0.10
    lines, code = run_validate(args.session_dir, gate)
    print("\n".join(lines))
    return code


def cmd_analyze(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    out_dir = _resolve_out(args.out)
    for name, text in run_analyze([Path(m) for m in args.manifests], cfg, jobs=args.jobs):
        path = out_dir / name
        _write_text(path, text)
        print(f"wrote {path}")
    return 0


def cmd_profile(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    out_dir = _resolve_out(args.out)
    outputs, messages = run_profile(args.session_dir, cfg,
                                    condition=args.condition, jobs=args.jobs)
    for msg in messages:
        print(msg)
    for name, text in outputs:
        path = out_dir / name
        _write_text(path, text)
        print(f"wrote {path}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args, default_joints="all15")
    out_dir = _resolve_out(args.out)
    name, text, messages = run_compare(Path(args.profile_a), Path(args.profile_b),
                                       cfg, k_sd=args.k_sd,
                                       joints_token=args.joints)
    path = out_dir / name
    _write_text(path, text)
    for msg in messages:
        print(msg)
    print(f"wrote {path}")
    return 0


def cmd_glyph(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args, default_joints="main5")
    out_dir = _resolve_out(args.out)
    name, text = run_glyph([Path(p) for p in args.profiles], cfg,
                           scale_max=args.scale_max)
    path = out_dir / name
    _write_text(path, text)
    print(f"wrote {path}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    out_dir = _resolve_out(args.out)
    paths = generate_session(out_dir, n_subjects=args.subjects,
                             trials_per_condition=args.trials, base_seed=args.seed)
    print(f"wrote {len(paths)} trials to {out_dir}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FormatError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main(sys.argv[1:]))
