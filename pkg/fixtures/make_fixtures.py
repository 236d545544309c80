"""Regenerate the shared cross-boundary fixtures.

Feature files are plain text, one whitespace-separated vector per file,
filename = condition id. The expected_*.json files are what the scoring
package computes from those exact vectors; the devkit must reproduce them
to 1e-9. Run from the repo root after any change to RDM construction:

    python3 fixtures/make_fixtures.py
"""

from pathlib import Path

import numpy as np

from rsabench import ConditionSet, FeatureTable, build_rdm, write_rdm_file

ROOT = Path(__file__).parent
DIM = 12


def write_features(dirname: str, ids: list[str], seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    directory = ROOT / "features" / dirname
    directory.mkdir(parents=True, exist_ok=True)
    rows = []
    for cid in ids:
        v = rng.standard_normal(DIM)
        (directory / cid).write_text(
            " ".join(repr(float(x)) for x in v) + "\n", encoding="utf-8"
        )
        rows.append(v)
    return np.asarray(rows)


def main() -> None:
    fmri_ids = [f"img{i:03d}" for i in range(1, 9)]
    meg_ids = [f"stim{i:02d}" for i in range(1, 7)]

    evc = write_features("evc_layer", fmri_ids, 101)
    it = write_features("it_layer", fmri_ids, 102)
    early = write_features("early_layer", meg_ids, 201)
    late = write_features("late_layer", meg_ids, 202)

    fmri = ConditionSet(fmri_ids)
    meg = ConditionSet(meg_ids)

    write_rdm_file(
        ROOT / "expected_fmri.json",
        "fmri",
        {
            "EVC": build_rdm(FeatureTable(fmri, evc)),
            "IT": build_rdm(FeatureTable(fmri, it)),
        },
    )
    write_rdm_file(
        ROOT / "expected_fmri_euclidean.json",
        "fmri",
        {
            "EVC": build_rdm(FeatureTable(fmri, evc), metric="euclidean"),
            "IT": build_rdm(FeatureTable(fmri, it), metric="euclidean"),
        },
    )
    write_rdm_file(
        ROOT / "expected_meg.json",
        "meg",
        {
            "early": build_rdm(FeatureTable(meg, early)),
            "late": build_rdm(FeatureTable(meg, late)),
        },
    )
    print("fixtures written under", ROOT)


if __name__ == "__main__":
    main()
