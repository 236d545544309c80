"""Seeded synthetic ground truth and noisy subject RDMs.

The real challenge's brain data is held back, so these generators provide
the quantitative oracle for every end-to-end test: a deterministic truth
RDM plus per-subject noisy copies with a controlled noise scale. Identical
specs yield bit-identical output; each subject draws from its own seed
substream, so adding subjects never changes earlier subjects' data.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .rdm import ConditionSet, FeatureTable, Rdm, build_rdm
from .scoring import SubjectRdmSet

TRUTH_KINDS = ("random-features", "block-structured")

#: feature dimension for random-features truth
RANDOM_FEATURE_DIM = 64
#: block-structured truth geometry
BLOCK_COUNT = 4
WITHIN_BLOCK = 0.3
BETWEEN_BLOCK = 1.2

# spawn-key streams under the user seed
_TRUTH_STREAM = 0
_SUBJECT_STREAM = 1
_SUBTARGET_STREAM = 2


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of one synthetic reference set."""

    n_conditions: int = 78
    n_subjects: int = 15
    noise_sigma: float = 0.5
    seed: int = 0
    truth_kind: str = "random-features"
    block_jitter: float = 0.05

    def __post_init__(self):
        if self.n_conditions < 3:
            raise ValueError(f"n_conditions must be >= 3, got {self.n_conditions}")
        if self.n_subjects < 2:
            raise ValueError(f"n_subjects must be >= 2, got {self.n_subjects}")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.truth_kind not in TRUTH_KINDS:
            raise ValueError(f"truth_kind must be one of {TRUTH_KINDS}")
        if self.block_jitter < 0:
            raise ValueError("block_jitter must be >= 0")


def condition_ids(n: int) -> ConditionSet:
    """Default synthetic condition identifiers (img001, img002, ...)."""
    return ConditionSet([f"img{i + 1:03d}" for i in range(n)])


def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=stream))


def _symmetric_noise(rng: np.random.Generator, n: int, sigma: float) -> np.ndarray:
    """Zero-diagonal symmetric matrix with i.i.d. N(0, sigma^2) upper triangle."""
    noise = np.zeros((n, n))
    if sigma > 0:
        iu = np.triu_indices(n, k=1)
        draws = rng.normal(0.0, sigma, size=len(iu[0]))
        noise[iu] = draws
        noise[(iu[1], iu[0])] = draws
    return noise


def generate_truth(spec: SyntheticSpec) -> Rdm:
    """Deterministic ground-truth RDM for a spec."""
    n = spec.n_conditions
    conditions = condition_ids(n)
    rng = _rng(spec.seed, _TRUTH_STREAM)
    if spec.truth_kind == "random-features":
        vectors = rng.standard_normal((n, RANDOM_FEATURE_DIM))
        return build_rdm(FeatureTable(conditions, vectors), "one-minus-pearson")

    # block-structured: categorical geometry, within-block strictly below between
    sizes = [len(chunk) for chunk in np.array_split(np.arange(n), BLOCK_COUNT)]
    labels = np.repeat(np.arange(BLOCK_COUNT), sizes)
    same = labels[:, None] == labels[None, :]
    values = np.where(same, WITHIN_BLOCK, BETWEEN_BLOCK)
    if spec.block_jitter > 0:
        iu = np.triu_indices(n, k=1)
        jitter = rng.uniform(-spec.block_jitter, spec.block_jitter, size=len(iu[0]))
        values = values.astype(np.float64)
        values[iu] += jitter
        values[(iu[1], iu[0])] = values[iu]
    np.fill_diagonal(values, 0.0)
    return Rdm(conditions, values)


def generate_subjects(
    truth: Rdm, spec: SyntheticSpec, sub_target: str = "EVC"
) -> SubjectRdmSet:
    """Noisy per-subject copies of a truth RDM.

    Each subject adds an independent symmetric zero-diagonal Gaussian
    perturbation of scale ``noise_sigma`` drawn from a per-subject
    substream of the spec seed.
    """
    n = truth.n
    subjects = []
    for s in range(spec.n_subjects):
        rng = _rng(spec.seed, _SUBJECT_STREAM, s)
        noise = _symmetric_noise(rng, n, spec.noise_sigma)
        subjects.append(Rdm(truth.conditions, truth.values + noise))
    return SubjectRdmSet(sub_target, subjects)


def spec_for_sub_target(spec: SyntheticSpec, sub_target_index: int) -> SyntheticSpec:
    """Derive an independent child spec for one sub-target of a bundle.

    The child seed comes from a spawn-key substream of the user seed, so the
    two sub-targets of a track get independent truths and noise while the
    whole bundle stays a pure function of the original spec.
    """
    child_seed = int(
        np.random.SeedSequence(
            entropy=spec.seed, spawn_key=(_SUBTARGET_STREAM, sub_target_index)
        ).generate_state(1, dtype=np.uint64)[0]
    )
    return replace(spec, seed=child_seed)
