"""The committed cross-boundary fixtures must match what this package computes.

The devkit's agreement tests compare against the expected_*.json files, so
those files have to stay in lockstep with build_rdm. Regenerate with
`python3 fixtures/make_fixtures.py` if this fails after an intentional
change.
"""

import json
from pathlib import Path

import numpy as np
import pytest

from rsabench import ConditionSet, FeatureTable, build_rdm, serialize_rdm_document

FIXTURES = Path(__file__).parent.parent / "fixtures"


def load_layer(name, ids):
    rows = []
    for cid in ids:
        text = (FIXTURES / "features" / name / cid).read_text(encoding="utf-8")
        rows.append([float(tok) for tok in text.split()])
    return np.asarray(rows)


@pytest.mark.parametrize(
    "expected_name,track,layers,metric",
    [
        (
            "expected_fmri.json",
            "fmri",
            {"EVC": "evc_layer", "IT": "it_layer"},
            "one-minus-pearson",
        ),
        (
            "expected_fmri_euclidean.json",
            "fmri",
            {"EVC": "evc_layer", "IT": "it_layer"},
            "euclidean",
        ),
        (
            "expected_meg.json",
            "meg",
            {"early": "early_layer", "late": "late_layer"},
            "one-minus-pearson",
        ),
    ],
)
def test_committed_fixture_matches_recomputation(expected_name, track, layers, metric):
    text = (FIXTURES / expected_name).read_text(encoding="utf-8")
    ids = json.loads(text)["condition_ids"]
    conditions = ConditionSet(ids)
    targets = {
        target: build_rdm(FeatureTable(conditions, load_layer(layer, ids)), metric=metric)
        for target, layer in layers.items()
    }
    assert serialize_rdm_document(track, targets) == text
