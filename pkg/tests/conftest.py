import pytest

from gaitentropy.cli import main
from gaitentropy.synthgait import generate_session


@pytest.fixture(scope="session")
def default_session_dir(tmp_path_factory):
    """Seed-42 session, 3 subjects x 3 conditions x 3 trials, written once."""
    out = tmp_path_factory.mktemp("session42")
    paths = generate_session(out, n_subjects=3, trials_per_condition=3, base_seed=42)
    assert len(paths) == 27
    return out


@pytest.fixture(scope="session")
def profile_dir(default_session_dir, tmp_path_factory):
    """NW and KB condition profiles for all subjects, written via the CLI."""
    out = tmp_path_factory.mktemp("profiles")
    for cond in ("NW", "KB"):
        rc = main(["profile", str(default_session_dir), "--condition", cond,
                   "--out", str(out)])
        assert rc == 0
    return out
