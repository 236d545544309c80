"""The RDM wire format: one UTF-8 JSON document per submission or reference file.

Layout::

    { "format_version": "1.0",
      "track": "fmri" | "meg",
      "condition_ids": ["img001", ...],
      "targets": { "<sub-target>": [[...], ...], "<sub-target>": [[...], ...] } }

Track ``fmri`` carries exactly the sub-targets ``EVC`` and ``IT``; track
``meg`` carries ``early`` and ``late``. The writer emits floats as decimals
with 17 significant digits (lossless for float64) in a pinned layout, so
write -> read -> write is byte-identical.
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from pathlib import Path

import numpy as np

from .errors import MalformedFile, MissingSubTarget, UnknownTrack
from .rdm import ConditionSet, Rdm, validate_and_canonicalize

FORMAT_VERSION = "1.0"

#: track name -> its two sub-targets, in canonical order
TRACKS: dict[str, tuple[str, str]] = {
    "fmri": ("EVC", "IT"),
    "meg": ("early", "late"),
}

_TOP_LEVEL_KEYS = {"format_version", "track", "condition_ids", "targets"}


def sub_targets_for(track: str) -> tuple[str, str]:
    if track not in TRACKS:
        raise UnknownTrack(track)
    return TRACKS[track]


def format_float(x: float) -> str:
    """Decimal representation with 17 significant digits (round-trip exact)."""
    return format(float(x), ".17g")


def parse_rdm_document(doc: object) -> tuple[str, dict[str, Rdm]]:
    """Validate a decoded wire document and return (track, sub-target -> Rdm)."""
    if not isinstance(doc, dict):
        raise MalformedFile("top level must be a JSON object")
    extra = set(doc) - _TOP_LEVEL_KEYS
    if extra:
        raise MalformedFile(f"unexpected top-level keys: {sorted(extra)}")
    missing = _TOP_LEVEL_KEYS - set(doc)
    if missing:
        raise MalformedFile(f"missing top-level keys: {sorted(missing)}")
    if doc["format_version"] != FORMAT_VERSION:
        raise MalformedFile(f"unsupported format_version {doc['format_version']!r}")

    track = doc["track"]
    if not isinstance(track, str) or track not in TRACKS:
        raise UnknownTrack(track)

    ids = doc["condition_ids"]
    if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
        raise MalformedFile("condition_ids must be a list of strings")
    try:
        conditions = ConditionSet(ids)
    except Exception as exc:
        raise MalformedFile(f"invalid condition_ids: {exc}") from exc

    targets = doc["targets"]
    if not isinstance(targets, dict):
        raise MalformedFile("targets must be an object")
    expected = sub_targets_for(track)
    for name in expected:
        if name not in targets:
            raise MissingSubTarget(name)
    unknown = set(targets) - set(expected)
    if unknown:
        raise MalformedFile(
            f"unexpected sub-targets {sorted(unknown)} for track {track!r}"
        )

    rdms: dict[str, Rdm] = {}
    for name in expected:
        matrix = targets[name]
        if not isinstance(matrix, list):
            raise MalformedFile(f"target {name!r} must be an array of rows")
        rdms[name] = validate_and_canonicalize(matrix, conditions)
    return track, rdms


def read_rdm_text(text: str) -> tuple[str, dict[str, Rdm]]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"not valid JSON: {exc}") from exc
    return parse_rdm_document(doc)


def read_rdm_file(path: str | Path) -> tuple[str, dict[str, Rdm]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedFile(f"cannot read {path}: {exc}") from exc
    return read_rdm_text(text)


def serialize_rdm_document(track: str, targets: Mapping[str, Rdm]) -> str:
    """Render the wire document deterministically (pinned layout and digits)."""
    expected = sub_targets_for(track)
    for name in expected:
        if name not in targets:
            raise MissingSubTarget(name)
    if set(targets) != set(expected):
        raise MalformedFile(
            f"unexpected sub-targets {sorted(set(targets) - set(expected))} for track {track!r}"
        )
    conditions = targets[expected[0]].conditions
    for name in expected:
        if targets[name].conditions != conditions:
            raise MalformedFile("sub-target RDMs do not share one condition set")

    lines = ["{"]
    lines.append(f'  "format_version": {json.dumps(FORMAT_VERSION)},')
    lines.append(f'  "track": {json.dumps(track)},')
    ids = ", ".join(json.dumps(i) for i in conditions.ids)
    lines.append(f'  "condition_ids": [{ids}],')
    lines.append('  "targets": {')
    for t_idx, name in enumerate(expected):
        lines.append(f"    {json.dumps(name)}: [")
        values = targets[name].values
        n = conditions.n
        for r in range(n):
            row = ", ".join(format_float(v) for v in values[r])
            comma = "," if r < n - 1 else ""
            lines.append(f"      [{row}]{comma}")
        comma = "," if t_idx < len(expected) - 1 else ""
        lines.append(f"    ]{comma}")
    lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_rdm_file(path: str | Path, track: str, targets: Mapping[str, Rdm]) -> None:
    Path(path).write_text(serialize_rdm_document(track, targets), encoding="utf-8")


def payload_digest_bytes(doc: object) -> bytes:
    """Canonical bytes of a wire document, for hashing submission payloads."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=True).encode("utf-8")


def rdm_document(track: str, targets: Mapping[str, Rdm]) -> dict:
    """The wire document as a plain JSON-ready object (floats unrounded)."""
    expected = sub_targets_for(track)
    conditions = targets[expected[0]].conditions
    return {
        "format_version": FORMAT_VERSION,
        "track": track,
        "condition_ids": list(conditions.ids),
        "targets": {name: targets[name].values.tolist() for name in expected},
    }


def expected_upper_length(n: int) -> int:
    return n * (n - 1) // 2
