"""Per-joint sample-entropy gait profiles from depth-camera skeleton data.

The pipeline: ingest (frames CSV + manifest JSON), preprocess (gap
repair, smoothing, out/back walk segmentation), entropy (sample entropy
with defined/undefined results), profile (per-trial and per-condition
aggregation), glyphcompare (star-glyph SVGs and delta tables), and
synthgait (a seeded synthetic recording generator for end-to-end
testing).  The ``gaitentropy`` console script wraps the whole chain.
"""

from .core import (ALL_JOINTS, Axis, CameraView, Condition, Frame, JointId,
                   JointSample, JointSeries, JOINT_GROUP_NAMES, LEFT5, MAIN5,
                   RIGHT5, joint_group, TrackState, Trial, WalkSegment)
from .entropy import (EntropyConfig, EntropyValue, ToleranceRule,
                      UndefinedReason, absolute_tolerance, relative_tolerance,
                      sample_entropy, sample_entropy_variant, tolerance,
                      variant_names)
from .glyphcompare import (DeltaTable, GlyphFigure, compare_conditions,
                           glyph_layout, render_svg, round_up_1sig,
                           write_delta_csv)
from .ingest import (FormatError, SessionManifest, ValidationReport,
                     discover_session, load_trial, parse_frames_csv,
                     parse_manifest, validate_trial, write_frames_csv,
                     write_manifest)
from .preprocess import (GapError, GapRepair, SegmentationConfig,
                         SegmentationError, SegmentationResult, extract_series,
                         repair_gaps, segment_walks, smooth)
from .profile import (ConditionProfile, JointEntropy, ProfileStat,
                      TrialProfile, condition_profile, profile_distance,
                      read_condition_profile_csv, trial_profile,
                      write_condition_profile_csv, write_trial_profile_csv)
from .synthgait import (GeneratedTrial, ImpairmentSpec, SubjectModel,
                        TrialTruth, dropout_model, generate_session,
                        generate_session_trials, generate_trial,
                        subject_model)

__version__ = "0.1.0"

__all__ = [
    "ALL_JOINTS", "Axis", "CameraView", "Condition", "ConditionProfile",
    "DeltaTable", "EntropyConfig", "EntropyValue", "FormatError", "Frame",
    "GapError", "GapRepair", "GeneratedTrial", "GlyphFigure", "ImpairmentSpec",
    "JointEntropy", "JointId", "JointSample", "JointSeries",
    "JOINT_GROUP_NAMES", "LEFT5", "MAIN5", "ProfileStat", "RIGHT5",
    "SegmentationConfig",
    "SegmentationError", "SegmentationResult", "SessionManifest",
    "SubjectModel", "ToleranceRule", "TrackState", "Trial", "TrialProfile",
    "TrialTruth", "UndefinedReason", "ValidationReport", "WalkSegment",
    "absolute_tolerance", "compare_conditions", "condition_profile",
    "discover_session", "dropout_model", "extract_series", "generate_session",
    "generate_session_trials", "generate_trial", "glyph_layout",
    "joint_group", "load_trial", "parse_frames_csv", "parse_manifest",
    "profile_distance", "read_condition_profile_csv", "relative_tolerance",
    "render_svg", "repair_gaps", "round_up_1sig", "sample_entropy",
    "sample_entropy_variant", "segment_walks", "smooth", "subject_model",
    "tolerance", "trial_profile", "validate_trial", "variant_names",
    "write_condition_profile_csv", "write_delta_csv", "write_frames_csv",
    "write_manifest", "write_trial_profile_csv",
]
