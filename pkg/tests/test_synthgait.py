import collections
import json

import numpy as np
import pytest

from gaitentropy.core import (ALL_JOINTS, Axis, Condition, JointId, TrackState)
from gaitentropy.ingest import (load_trial, parse_frames_csv, validate_trial,
                                write_frames_csv)
from gaitentropy.preprocess import repair_gaps
from gaitentropy.synthgait import (ImpairmentSpec, dropout_model,
                                   generate_session, generate_session_trials,
                                   generate_trial, subject_model)

AFFECTED = {
    Condition.KB: {JointId.KNEE_RIGHT, JointId.HIP_RIGHT, JointId.ANKLE_RIGHT},
    Condition.AB: {JointId.ANKLE_RIGHT, JointId.FOOT_RIGHT, JointId.KNEE_RIGHT},
}


def test_determinism_byte_identical():
    subj = subject_model(42, 0)
    spec = ImpairmentSpec.for_condition(Condition.KB)
    g1 = generate_trial(subj, spec, trial_seed=1, duration_s=10.0, fps=30.0)
    g2 = generate_trial(subj, spec, trial_seed=1, duration_s=10.0, fps=30.0)
    assert write_frames_csv(g1.trial.frames) == write_frames_csv(g2.trial.frames)
    assert g1.truth == g2.truth


def test_frame_count_and_timestamps():
    subj = subject_model(42, 0)
    spec = ImpairmentSpec.for_condition(Condition.NW)
    g = generate_trial(subj, spec, trial_seed=1, duration_s=10.0, fps=30.0)
    assert len(g.trial.frames) == 300
    assert g.trial.frames[0].timestamp_ms == 0
    assert g.trial.frames[-1].timestamp_ms == 9966
    steps = np.diff([f.timestamp_ms for f in g.trial.frames])
    assert set(steps) <= {33, 34}
    assert g.truth.turnaround_frame == 150


def test_nw_spec_is_identity():
    subj = subject_model(42, 0)
    nw = generate_trial(subj, ImpairmentSpec.for_condition(Condition.NW),
                        trial_seed=2, duration_s=10.0, fps=30.0)
    neutral_kb = ImpairmentSpec(condition=Condition.KB,
                                affected=frozenset(AFFECTED[Condition.KB]),
                                amplitude_scale=1.0, extra_noise_m=0.0,
                                phase_shift_rad=0.0)
    kb = generate_trial(subj, neutral_kb, trial_seed=2, duration_s=10.0, fps=30.0)
    for f_nw, f_kb in zip(nw.trial.frames, kb.trial.frames):
        assert f_nw.joints == f_kb.joints


def test_amplitude_scale_halves_peak_to_peak():
    subj = subject_model(42, 0)
    nw = generate_trial(subj, ImpairmentSpec.for_condition(Condition.NW),
                        trial_seed=3, duration_s=10.0, fps=30.0)
    half = ImpairmentSpec(condition=Condition.KB,
                          affected=frozenset(AFFECTED[Condition.KB]),
                          amplitude_scale=0.5, extra_noise_m=0.0,
                          phase_shift_rad=0.0)
    kb = generate_trial(subj, half, trial_seed=3, duration_s=10.0, fps=30.0)

    def ptp(g, joint):
        return np.ptp(g.trial.axis_values(joint, Axis.Y))

    ratio = ptp(kb, JointId.KNEE_RIGHT) / ptp(nw, JointId.KNEE_RIGHT)
    assert 0.35 < ratio < 0.65  # noise keeps it off exactly 0.5
    # unaffected joint untouched
    assert ptp(kb, JointId.KNEE_LEFT) == ptp(nw, JointId.KNEE_LEFT)


def test_affected_sets_enforced():
    with pytest.raises(ValueError):
        ImpairmentSpec(condition=Condition.KB,
                       affected=frozenset({JointId.HEAD}),
                       amplitude_scale=0.5)
    with pytest.raises(ValueError):
        ImpairmentSpec(condition=Condition.NW, affected=frozenset(),
                       amplitude_scale=0.5)  # NW must stay neutral
    with pytest.raises(ValueError):
        ImpairmentSpec.for_condition(Condition.NW, amplitude_scale=0.7)
    spec = ImpairmentSpec.for_condition(Condition.AB)
    assert spec.affected == frozenset(AFFECTED[Condition.AB])


def test_generate_trial_validation():
    subj = subject_model(42, 0)
    spec = ImpairmentSpec.for_condition(Condition.NW)
    with pytest.raises(ValueError):
        generate_trial(subj, spec, trial_seed=1, duration_s=5.0, fps=30.0)
    with pytest.raises(ValueError):
        generate_trial(subj, spec, trial_seed=1, duration_s=10.0, fps=0.0)


def test_subject_models_similar_but_distinct():
    models = [subject_model(42, i) for i in range(3)]
    freqs = {m.step_frequency_hz for m in models}
    assert len(freqs) == 3
    for m in models:
        assert 0.5 < m.step_frequency_hz < 3.0
        # anatomical ordering preserved under stature jitter
        assert m.baseline_m[JointId.HEAD] > m.baseline_m[JointId.NECK]
        assert m.baseline_m[JointId.NECK] > m.baseline_m[JointId.SPINE_SHOULDER]
        assert m.baseline_m[JointId.KNEE_RIGHT] > m.baseline_m[JointId.ANKLE_RIGHT]
        assert m.baseline_m[JointId.ANKLE_RIGHT] > m.baseline_m[JointId.FOOT_RIGHT]
    # within +-10% of each other (similar body types)
    heads = [m.baseline_m[JointId.HEAD] for m in models]
    assert max(heads) / min(heads) < 1.25


def test_dropout_rate_zero_identity():
    subj = subject_model(42, 0)
    g = generate_trial(subj, ImpairmentSpec.for_condition(Condition.NW),
                       trial_seed=1, duration_s=10.0, fps=30.0)
    assert dropout_model(g.trial, rate=0.0, max_run=3, seed=5) is g.trial


def test_dropout_statistics_and_repairability():
    subj = subject_model(42, 0)
    g = generate_trial(subj, ImpairmentSpec.for_condition(Condition.NW),
                       trial_seed=1, duration_s=10.0, fps=30.0)
    dropped = dropout_model(g.trial, rate=0.05, max_run=3, seed=7)
    n = len(dropped.frames)
    fractions = []
    for joint in ALL_JOINTS:
        states = [f.joints[joint].state for f in dropped.frames]
        assert states[0] is not TrackState.NOT_TRACKED
        assert states[-1] is not TrackState.NOT_TRACKED
        run = 0
        longest = 0
        miss = 0
        for s in states:
            if s is TrackState.NOT_TRACKED:
                run += 1
                miss += 1
                longest = max(longest, run)
            else:
                run = 0
        assert longest <= 3
        fractions.append(miss / n)
        ys = dropped.axis_values(joint, Axis.Y)
        rep = repair_gaps(ys, max_gap=5)
        assert rep.interpolated_fraction == pytest.approx(miss / n, abs=1e-9)
    assert np.mean(fractions) == pytest.approx(0.05, abs=0.02)


def test_dropout_determinism_and_validation():
    subj = subject_model(42, 0)
    g = generate_trial(subj, ImpairmentSpec.for_condition(Condition.NW),
                       trial_seed=1, duration_s=10.0, fps=30.0)
    d1 = dropout_model(g.trial, rate=0.05, max_run=3, seed=7)
    d2 = dropout_model(g.trial, rate=0.05, max_run=3, seed=7)
    assert write_frames_csv(d1.frames) == write_frames_csv(d2.frames)
    with pytest.raises(ValueError):
        dropout_model(g.trial, rate=1.0, max_run=3, seed=7)
    with pytest.raises(ValueError):
        dropout_model(g.trial, rate=0.1, max_run=0, seed=7)


def test_heavy_dropout_trips_validation_gate():
    from gaitentropy.ingest import SessionManifest
    subj = subject_model(42, 0)
    g = generate_trial(subj, ImpairmentSpec.for_condition(Condition.NW),
                       trial_seed=1, duration_s=10.0, fps=30.0)
    dropped = dropout_model(g.trial, rate=0.15, max_run=6, seed=11)
    manifest = SessionManifest(subject_id="S1", condition=Condition.NW,
                               camera=dropped.camera, trial_index=1,
                               fps_nominal=30.0, frames_file="t.csv")
    report = validate_trial(dropped, manifest)
    assert not report.accepted
    assert any("untracked" in msg for _, msg in report.errors)


def test_session_trial_enumeration():
    rows = list(generate_session_trials(n_subjects=2, trials_per_condition=2,
                                        base_seed=7))
    assert len(rows) == 12
    stems = [r.stem for r in rows]
    assert stems[0] == "S1_NW_t1"
    assert stems[-1] == "S2_AB_t2"
    counts = collections.Counter(r.trial.condition for r in rows)
    assert counts == {Condition.NW: 4, Condition.KB: 4, Condition.AB: 4}
    # conditions share the per-trial noise stream: same subject, same
    # trial index, unaffected joint => identical coordinates
    by_stem = {r.stem: r.trial for r in rows}
    nw = by_stem["S1_NW_t1"].axis_values(JointId.SHOULDER_LEFT, Axis.Y)
    kb = by_stem["S1_KB_t1"].axis_values(JointId.SHOULDER_LEFT, Axis.Y)
    np.testing.assert_array_equal(nw, kb)


def test_generate_session_files(tmp_path):
    paths = generate_session(tmp_path, n_subjects=1, trials_per_condition=2,
                             base_seed=9)
    assert len(paths) == 6
    for mp in paths:
        trial, manifest = load_trial(mp)
        assert len(trial.frames) == 300
        truth = json.loads(mp.with_name(
            mp.name.replace(".manifest.json", ".truth.json")).read_text())
        assert truth["turnaround_frame"] == 150
        assert set(truth["amplitudes_m"]) == {j.value for j in ALL_JOINTS}
    # regeneration is byte-stable
    other = tmp_path / "again"
    generate_session(other, n_subjects=1, trials_per_condition=2, base_seed=9)
    for mp in paths:
        a = mp.with_name(mp.name.replace(".manifest.json", ".frames.csv"))
        b = other / a.name
        assert a.read_bytes() == b.read_bytes()


def test_impairment_raises_entropy_on_affected_joints():
    """Scaled amplitude + extra noise push SE up on average (>= 20 seeds)."""
    from gaitentropy.entropy import EntropyConfig, sample_entropy
    cfg = EntropyConfig(min_length=60)
    deltas = []
    for seed in range(20):
        subj = subject_model(1000 + seed, 0)
        nw = generate_trial(subj, ImpairmentSpec.for_condition(Condition.NW),
                            trial_seed=1, duration_s=10.0, fps=30.0)
        kb = generate_trial(subj, ImpairmentSpec.for_condition(Condition.KB),
                            trial_seed=1, duration_s=10.0, fps=30.0)
        se_nw = sample_entropy(
            nw.trial.axis_values(JointId.KNEE_RIGHT, Axis.Y)[:150], cfg)
        se_kb = sample_entropy(
            kb.trial.axis_values(JointId.KNEE_RIGHT, Axis.Y)[:150], cfg)
        deltas.append(se_kb.value - se_nw.value)
    assert np.mean(deltas) > 0
