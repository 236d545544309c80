import json

import pytest

from rsabench.bundles import write_reference_bundle
from rsabench.challenge import ChallengeConfig, ChallengeService, hash_token
from rsabench.synthetic import SyntheticSpec

TOKENS = {"alpha": "token-alpha-0123456789abcdef", "beta": "token-beta-0123456789abcdef"}


@pytest.fixture(scope="session")
def small_bundle_dir(tmp_path_factory):
    """20-condition, 5-subject fmri bundle; big enough to be non-trivial, fast."""
    directory = tmp_path_factory.mktemp("bundle") / "fmri"
    spec = SyntheticSpec(n_conditions=20, n_subjects=5, noise_sigma=0.5, seed=42)
    write_reference_bundle(str(directory), spec, "fmri")
    return str(directory)


@pytest.fixture(scope="session")
def meg_bundle_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("bundle_meg") / "meg"
    spec = SyntheticSpec(n_conditions=12, n_subjects=4, noise_sigma=0.4, seed=7)
    write_reference_bundle(str(directory), spec, "meg")
    return str(directory)


def make_config(tmp_path, bundle_dir, *, quota=5, journal_name="journal.bin", clock=None,
                window=("2026-01-01T00:00:00Z", "2027-01-01T00:00:00Z")):
    raw = {
        "tracks": {"fmri": bundle_dir},
        "quota_per_day": quota,
        "window": {"open": window[0], "close": window[1]},
        "teams": [
            {"team_id": name, "display_name": f"Team {name.title()}",
             "token_sha256": hash_token(token)}
            for name, token in TOKENS.items()
        ],
        "journal": str(tmp_path / journal_name),
    }
    return ChallengeConfig.from_dict(raw, base_dir=str(tmp_path))


@pytest.fixture
def service(tmp_path, small_bundle_dir):
    svc = ChallengeService(make_config(tmp_path, small_bundle_dir))
    yield svc
    svc.close()


def write_config_file(path, bundle_dir, journal_path, *, quota=5):
    raw = {
        "tracks": {"fmri": bundle_dir},
        "quota_per_day": quota,
        "window": {"open": "2026-01-01T00:00:00Z", "close": "2027-01-01T00:00:00Z"},
        "teams": [
            {"team_id": name, "display_name": f"Team {name.title()}",
             "token_sha256": hash_token(token)}
            for name, token in TOKENS.items()
        ],
        "journal": journal_path,
    }
    path.write_text(json.dumps(raw, indent=2), encoding="utf-8")
    return path
