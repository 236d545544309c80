"""RDM comparison and challenge scoring.

The pipeline: vectorize the strictly-upper triangles, correlate with
tie-aware Spearman, square to R^2, and normalize by the noise ceiling
(mean squared correlation of each subject's RDM with the subject-averaged
RDM, the averaged RDM including the subject itself). A model equal to the
subject average therefore scores exactly 100%.

`spearman` is written to be bit-exactly symmetric in its arguments and to
return exactly 1.0 for identical inputs: the numerator is a deterministic
elementwise-product sum and the denominator a single square root of the
product of the two sums of squares.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConditionMismatch,
    LengthMismatch,
    MalformedFile,
    MissingSubTarget,
    NoiseCeilingUndefined,
    SizeMismatch,
    ZeroRankVariance,
)
from .fileformat import sub_targets_for
from .rdm import Rdm, average_rdms, vectorize_upper


def midranks(x: np.ndarray) -> np.ndarray:
    """Average-rank transform (ties get the mean of their rank range)."""
    x = np.asarray(x)
    order = np.argsort(x, kind="stable")
    sorted_x = x[order]
    new_group = np.empty(len(x), dtype=bool)
    new_group[0] = True
    new_group[1:] = sorted_x[1:] != sorted_x[:-1]
    group = np.cumsum(new_group) - 1
    counts = np.bincount(group)
    ends = np.cumsum(counts)  # 1-based last rank of each tie group
    starts = ends - counts
    group_rank = (starts + ends + 1) / 2.0
    ranks = np.empty(len(x), dtype=np.float64)
    ranks[order] = group_rank[group]
    return ranks


def spearman(a: np.ndarray, b: np.ndarray) -> float:
    """Tie-aware Spearman rank correlation of two dissimilarity vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
        raise LengthMismatch(f"vectors have shapes {a.shape} and {b.shape}")
    if len(a) < 3:
        raise LengthMismatch(f"need at least 3 paired observations, got {len(a)}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("inputs must be finite")
    if np.all(a == a[0]) or np.all(b == b[0]):
        raise ZeroRankVariance("an input is constant; ranks carry no information")

    ra = midranks(a)
    rb = midranks(b)
    da = ra - np.mean(ra)
    db = rb - np.mean(rb)
    num = float(np.sum(da * db))
    sa2 = float(np.sum(da * da))
    sb2 = float(np.sum(db * db))
    rho = num / float(np.sqrt(sa2 * sb2))
    return float(min(1.0, max(-1.0, rho)))


@dataclass(frozen=True)
class SubjectRdmSet:
    """The brain side of a comparison: one RDM per subject for one sub-target."""

    sub_target: str
    subjects: tuple[Rdm, ...]

    def __init__(self, sub_target: str, subjects: Sequence[Rdm]):
        subjects = tuple(subjects)
        if len(subjects) < 2:
            raise SizeMismatch(
                f"need at least 2 subjects for a noise ceiling, got {len(subjects)}"
            )
        conditions = subjects[0].conditions
        for s in subjects[1:]:
            if s.conditions != conditions:
                raise ConditionMismatch("subject RDMs do not share one condition set")
        object.__setattr__(self, "sub_target", sub_target)
        object.__setattr__(self, "subjects", subjects)

    @property
    def subject_count(self) -> int:
        return len(self.subjects)

    @property
    def conditions(self):
        return self.subjects[0].conditions


@dataclass(frozen=True)
class NoiseCeiling:
    """Per-subject correlations with the subject average, and their mean square."""

    per_subject_rho: tuple[float, ...]
    ceiling_r2: float


def _mean_square(rhos: Sequence[float]) -> float:
    # shared by ceiling and model scoring so a perfect model hits 100 exactly
    arr = np.asarray(rhos, dtype=np.float64)
    return float(np.mean(arr * arr))


def noise_ceiling(subjects: SubjectRdmSet) -> NoiseCeiling:
    """Expected agreement of the ideal model with the data, given its noise.

    Correlates every subject's RDM with the subject-averaged RDM (average
    including that subject — the upper-bound convention) and averages the
    squared correlations.
    """
    avg = vectorize_upper(average_rdms(list(subjects.subjects)))
    rhos = []
    try:
        for s in subjects.subjects:
            rhos.append(spearman(vectorize_upper(s), avg))
    except ZeroRankVariance as exc:
        raise NoiseCeilingUndefined(str(exc)) from exc
    ceiling = _mean_square(rhos)
    if ceiling <= 0.0:
        raise NoiseCeilingUndefined("all subject-vs-average correlations are zero")
    return NoiseCeiling(tuple(rhos), ceiling)


@dataclass(frozen=True)
class SubTargetScore:
    raw_r2: float
    ceiling_r2: float
    normalized_pct: float
    degenerate: bool


@dataclass(frozen=True)
class ScoreRecord:
    """Scores for the two sub-targets of one track, plus their mean."""

    track: str
    sub_targets: dict[str, SubTargetScore] = field(compare=True)
    track_score_pct: float = 0.0

    @property
    def degenerate_flags(self) -> set[str]:
        return {name for name, s in self.sub_targets.items() if s.degenerate}

    def to_json_dict(self) -> dict:
        return {
            "track": self.track,
            "sub_targets": {
                name: {
                    "raw_r2": s.raw_r2,
                    "ceiling_r2": s.ceiling_r2,
                    "normalized_pct": s.normalized_pct,
                    "degenerate": s.degenerate,
                }
                for name, s in self.sub_targets.items()
            },
            "track_score_pct": self.track_score_pct,
        }

    @staticmethod
    def from_json_dict(doc: Mapping) -> "ScoreRecord":
        subs = {
            name: SubTargetScore(
                raw_r2=float(s["raw_r2"]),
                ceiling_r2=float(s["ceiling_r2"]),
                normalized_pct=float(s["normalized_pct"]),
                degenerate=bool(s["degenerate"]),
            )
            for name, s in doc["sub_targets"].items()
        }
        return ScoreRecord(doc["track"], subs, float(doc["track_score_pct"]))


def score_model(
    model: Rdm,
    subjects: SubjectRdmSet,
    ceiling: NoiseCeiling | None = None,
) -> SubTargetScore:
    """Score one model RDM against one sub-target's subject RDMs.

    raw R^2 is the mean over subjects of the squared Spearman correlation;
    the normalized percentage divides by the ceiling. A model whose upper
    triangle is constant carries no ordinal information and scores 0 with
    the degenerate flag set instead of erroring.
    """
    if model.conditions != subjects.conditions:
        raise ConditionMismatch("model and subject RDMs do not share one condition set")
    if ceiling is None:
        ceiling = noise_ceiling(subjects)

    mv = vectorize_upper(model)
    if np.all(mv == mv[0]):
        return SubTargetScore(0.0, ceiling.ceiling_r2, 0.0, True)

    rhos = [spearman(mv, vectorize_upper(s)) for s in subjects.subjects]
    raw_r2 = _mean_square(rhos)
    # divide first: raw == ceiling must yield exactly 100.0
    normalized_pct = 100.0 * (raw_r2 / ceiling.ceiling_r2)
    return SubTargetScore(raw_r2, ceiling.ceiling_r2, normalized_pct, False)


def score_submission(
    submitted: Mapping[str, Rdm],
    reference: Mapping[str, SubjectRdmSet],
    track: str,
    ceilings: Mapping[str, NoiseCeiling] | None = None,
) -> ScoreRecord:
    """Score a full submission: one model RDM per sub-target of one track."""
    expected = sub_targets_for(track)
    for name in expected:
        if name not in submitted:
            raise MissingSubTarget(name)
        if name not in reference:
            raise MissingSubTarget(name)
    if set(submitted) != set(expected):
        raise MalformedFile(
            f"unexpected sub-targets {sorted(set(submitted) - set(expected))}"
        )

    scores: dict[str, SubTargetScore] = {}
    for name in expected:
        ceiling = ceilings[name] if ceilings is not None else None
        scores[name] = score_model(submitted[name], reference[name], ceiling)
    first, second = expected
    track_score = (scores[first].normalized_pct + scores[second].normalized_pct) / 2.0
    return ScoreRecord(track, scores, track_score)
