"""Reference-set bundles: a directory of per-subject RDM files plus a manifest.

A bundle is the on-disk form of one track's held-out reference data. Each
subject file is an ordinary RDM document carrying both sub-targets, so any
tool that reads submissions can also inspect reference sets. The manifest
ties the directory together and is deliberately tiny:

    {
      "format_version": "1.0",
      "track": "fmri",
      "sub_targets": ["EVC", "IT"],
      "subject_files": ["subject_01.json", ...],
      "truth_file": "truth.json"
    }
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .errors import ConditionMismatch, MalformedFile
from .fileformat import (
    FORMAT_VERSION,
    read_rdm_file,
    sub_targets_for,
    write_rdm_file,
)
from .rdm import ConditionSet, Rdm
from .scoring import SubjectRdmSet
from .synthetic import (
    SyntheticSpec,
    generate_subjects,
    generate_truth,
    spec_for_sub_target,
)

MANIFEST_NAME = "manifest.json"
TRUTH_NAME = "truth.json"

_MANIFEST_KEYS = {"format_version", "track", "sub_targets", "subject_files", "truth_file"}


@dataclass(frozen=True)
class ReferenceBundle:
    """One track's reference data, loaded into memory."""

    track: str
    conditions: ConditionSet
    subject_sets: dict[str, SubjectRdmSet]
    truth: dict[str, Rdm]

    @property
    def sub_targets(self) -> tuple[str, ...]:
        return sub_targets_for(self.track)

    @property
    def subject_count(self) -> int:
        first = next(iter(self.subject_sets.values()))
        return first.subject_count


def _subject_name(index: int) -> str:
    return f"subject_{index + 1:02d}.json"


def write_reference_bundle(directory: str, spec: SyntheticSpec, track: str) -> dict:
    """Generate a synthetic bundle and write it under ``directory``.

    Each sub-target gets an independent truth and independent subject noise,
    derived from the spec seed, so the whole directory is reproducible from
    (spec, track) alone. Returns the manifest dict.
    """
    names = sub_targets_for(track)
    truths: dict[str, Rdm] = {}
    subject_sets: dict[str, SubjectRdmSet] = {}
    for idx, name in enumerate(names):
        child = spec_for_sub_target(spec, idx)
        truth = generate_truth(child)
        truths[name] = truth
        subject_sets[name] = generate_subjects(truth, child, name)

    os.makedirs(directory, exist_ok=True)
    subject_files = []
    for s in range(spec.n_subjects):
        fname = _subject_name(s)
        targets = {name: subject_sets[name].subjects[s] for name in names}
        write_rdm_file(os.path.join(directory, fname), track, targets)
        subject_files.append(fname)
    write_rdm_file(os.path.join(directory, TRUTH_NAME), track, truths)

    manifest = {
        "format_version": FORMAT_VERSION,
        "track": track,
        "sub_targets": list(names),
        "subject_files": subject_files,
        "truth_file": TRUTH_NAME,
    }
    with open(os.path.join(directory, MANIFEST_NAME), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def read_reference_bundle(directory: str) -> ReferenceBundle:
    """Load a bundle directory back into subject sets keyed by sub-target."""
    manifest_path = os.path.join(directory, MANIFEST_NAME)
    try:
        with open(manifest_path, encoding="utf-8") as fh:
            manifest = json.load(fh)
    except OSError as exc:
        raise MalformedFile(f"cannot read bundle manifest: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"bundle manifest is not valid JSON: {exc}") from exc

    if not isinstance(manifest, dict) or set(manifest) != _MANIFEST_KEYS:
        raise MalformedFile(
            f"bundle manifest must have exactly the keys {sorted(_MANIFEST_KEYS)}"
        )
    if manifest["format_version"] != FORMAT_VERSION:
        raise MalformedFile(
            f"unsupported bundle format_version {manifest['format_version']!r}"
        )
    track = manifest["track"]
    names = sub_targets_for(track)
    if tuple(manifest["sub_targets"]) != names:
        raise MalformedFile(
            f"manifest sub_targets {manifest['sub_targets']!r} do not match "
            f"track {track!r} (expected {list(names)})"
        )
    subject_files = manifest["subject_files"]
    if not isinstance(subject_files, list) or not subject_files:
        raise MalformedFile("manifest subject_files must be a non-empty list")

    conditions: ConditionSet | None = None
    per_target: dict[str, list[Rdm]] = {name: [] for name in names}
    for fname in subject_files:
        file_track, targets = read_rdm_file(os.path.join(directory, str(fname)))
        if file_track != track:
            raise MalformedFile(
                f"subject file {fname!r} carries track {file_track!r}, "
                f"manifest says {track!r}"
            )
        some_rdm = targets[names[0]]
        if conditions is None:
            conditions = some_rdm.conditions
        elif some_rdm.conditions != conditions:
            raise ConditionMismatch(
                f"subject file {fname!r} uses a different condition set"
            )
        for name in names:
            per_target[name].append(targets[name])

    truth_track, truth = read_rdm_file(os.path.join(directory, str(manifest["truth_file"])))
    if truth_track != track:
        raise MalformedFile("truth file track does not match manifest")
    assert conditions is not None
    subject_sets = {
        name: SubjectRdmSet(name, rdms) for name, rdms in per_target.items()
    }
    return ReferenceBundle(track, conditions, subject_sets, truth)
