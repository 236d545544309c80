"""HTTP surface: status codes, error bodies, and response shapes."""

import json

import pytest
from fastapi.testclient import TestClient

from rsabench.bundles import read_reference_bundle
from rsabench.challenge import ChallengeService
from rsabench.fileformat import rdm_document
from rsabench.rdm import average_rdms
from rsabench.webapi import create_app

from conftest import TOKENS, make_config

ALPHA = {"Authorization": f"Bearer {TOKENS['alpha']}"}
BETA = {"Authorization": f"Bearer {TOKENS['beta']}"}


@pytest.fixture
def client(tmp_path, small_bundle_dir):
    service = ChallengeService(make_config(tmp_path, small_bundle_dir, quota=3))
    with TestClient(create_app(service), raise_server_exceptions=False) as c:
        c.service = service
        yield c
    service.close()


@pytest.fixture
def perfect_doc(small_bundle_dir):
    bundle = read_reference_bundle(small_bundle_dir)
    targets = {
        name: average_rdms(list(s.subjects)) for name, s in bundle.subject_sets.items()
    }
    return rdm_document(bundle.track, targets)


def _submit(client, doc, headers=ALPHA, **overrides):
    body = {"track": "fmri", "attestation": True, "rdm_file": doc}
    body.update(overrides)
    return client.post("/api/v1/submissions", headers=headers, json=body)


class TestAuth:
    def test_missing_header(self, client, perfect_doc):
        r = client.post(
            "/api/v1/submissions",
            json={"track": "fmri", "attestation": True, "rdm_file": perfect_doc},
        )
        assert r.status_code == 401
        assert r.json()["error"]["code"] == "unauthorized"

    def test_wrong_scheme(self, client):
        r = client.get(
            "/api/v1/teams/me/submissions", headers={"Authorization": "Basic abc"}
        )
        assert r.status_code == 401

    def test_unknown_token(self, client, perfect_doc):
        r = _submit(client, perfect_doc, headers={"Authorization": "Bearer nope"})
        assert r.status_code == 401


class TestSubmissions:
    def test_created_shape(self, client, perfect_doc):
        r = _submit(client, perfect_doc)
        assert r.status_code == 201
        body = r.json()
        assert set(body) == {"submission_id", "track", "sub_targets", "track_score_pct"}
        assert body["track"] == "fmri"
        assert set(body["sub_targets"]) == {"EVC", "IT"}
        for score in body["sub_targets"].values():
            assert set(score) == {"raw_r2", "ceiling_r2", "normalized_pct", "degenerate"}
        assert body["track_score_pct"] == 100.0

    def test_attestation_false_is_403(self, client, perfect_doc):
        r = _submit(client, perfect_doc, attestation=False)
        assert r.status_code == 403
        assert r.json()["error"]["code"] == "attestation_required"

    def test_validation_error_carries_coordinates(self, client, perfect_doc):
        doc = json.loads(json.dumps(perfect_doc))
        doc["targets"]["EVC"][2][4] = None
        r = _submit(client, doc)
        # a null entry is a malformed payload, not a matrix with coordinates
        assert r.status_code == 400

        doc = json.loads(json.dumps(perfect_doc))
        doc["targets"]["IT"][2][4] = 1e9  # symmetric partner untouched
        r = _submit(client, doc)
        assert r.status_code == 400
        err = r.json()["error"]
        assert err["code"] == "validation_failed"
        assert err["cause_code"] == "asymmetry_exceeded"
        assert {err["row"], err["col"]} == {2, 4}

    def test_wrong_condition_ids(self, client, perfect_doc):
        doc = json.loads(json.dumps(perfect_doc))
        doc["condition_ids"] = [f"q{i}" for i in range(len(doc["condition_ids"]))]
        r = _submit(client, doc)
        assert r.status_code == 400
        assert r.json()["error"]["code"] == "wrong_condition_set"

    def test_missing_body_key(self, client):
        r = client.post("/api/v1/submissions", headers=ALPHA, json={"track": "fmri"})
        assert r.status_code == 400
        assert r.json()["error"]["code"] == "malformed_file"

    def test_quota_429_with_retry(self, client, perfect_doc):
        for _ in range(3):
            assert _submit(client, perfect_doc).status_code == 201
        r = _submit(client, perfect_doc)
        assert r.status_code == 429
        err = r.json()["error"]
        assert err["code"] == "quota_exceeded"
        assert err["retry_after_utc"].endswith("T00:00:00Z")

    def test_report_url_recorded(self, client, perfect_doc):
        r = _submit(client, perfect_doc, report_url="https://example.org/preprint")
        assert r.status_code == 201
        history = client.get("/api/v1/teams/me/submissions", headers=ALPHA).json()
        assert history["submissions"][0]["report_url"] == "https://example.org/preprint"


class TestReads:
    def test_leaderboard_orders_and_limits(self, client, perfect_doc):
        _submit(client, perfect_doc, headers=ALPHA)
        _submit(client, perfect_doc, headers=BETA)
        r = client.get("/api/v1/leaderboard", params={"track": "fmri"})
        assert r.status_code == 200
        entries = r.json()["entries"]
        assert [e["rank"] for e in entries] == [1, 2]
        assert entries[0]["display_name"] == "Team Alpha"  # earlier same-score submit
        r = client.get("/api/v1/leaderboard", params={"track": "fmri", "limit": 1})
        assert len(r.json()["entries"]) == 1

    def test_leaderboard_unknown_track(self, client):
        r = client.get("/api/v1/leaderboard", params={"track": "eeg"})
        assert r.status_code == 400
        assert r.json()["error"]["code"] == "unknown_track"

    def test_leaderboard_bad_limit(self, client):
        r = client.get("/api/v1/leaderboard", params={"track": "fmri", "limit": "ten"})
        assert r.status_code == 400

    def test_history_requires_auth_and_isolates(self, client, perfect_doc):
        _submit(client, perfect_doc, headers=ALPHA)
        assert client.get("/api/v1/teams/me/submissions").status_code == 401
        mine = client.get("/api/v1/teams/me/submissions", headers=BETA).json()
        assert mine["submissions"] == []

    def test_challenge_metadata_has_no_reference_data(self, client):
        r = client.get("/api/v1/challenge")
        assert r.status_code == 200
        info = r.json()
        assert info["quota_per_day"] == 3
        assert info["tracks"]["fmri"]["sub_targets"] == ["EVC", "IT"]
        assert info["tracks"]["fmri"]["n_conditions"] == 20
        # scores and ceilings only; no matrices anywhere in the payload
        def no_matrices(node):
            if isinstance(node, dict):
                assert "targets" not in node
                for v in node.values():
                    no_matrices(v)
            elif isinstance(node, list):
                assert not any(isinstance(v, list) for v in node)

        no_matrices(info)
