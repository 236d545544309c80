"""Seeded generators: determinism, stream independence, structure."""

import numpy as np
import pytest

from rsabench.rdm import vectorize_upper
from rsabench.scoring import noise_ceiling
from rsabench.synthetic import (
    BETWEEN_BLOCK,
    WITHIN_BLOCK,
    SyntheticSpec,
    condition_ids,
    generate_subjects,
    generate_truth,
    spec_for_sub_target,
)


def test_spec_defaults_match_challenge_shape():
    spec = SyntheticSpec()
    assert spec.n_conditions == 78
    assert spec.n_subjects == 15
    assert spec.truth_kind == "random-features"


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_conditions": 2},
        {"n_subjects": 1},
        {"noise_sigma": -0.1},
        {"truth_kind": "mystery"},
        {"block_jitter": -1.0},
        {"seed": -1},
    ],
)
def test_spec_rejects_bad_values(kwargs):
    with pytest.raises(ValueError):
        SyntheticSpec(**kwargs)


def test_condition_ids_are_stable():
    assert condition_ids(3).ids == ("img001", "img002", "img003")


class TestDeterminism:
    def test_same_spec_same_truth(self):
        spec = SyntheticSpec(n_conditions=15, n_subjects=4, seed=9)
        a = generate_truth(spec)
        b = generate_truth(spec)
        assert np.array_equal(a.values, b.values)

    def test_same_spec_same_subjects(self):
        spec = SyntheticSpec(n_conditions=15, n_subjects=4, seed=9)
        truth = generate_truth(spec)
        a = generate_subjects(truth, spec)
        b = generate_subjects(truth, spec)
        for x, y in zip(a.subjects, b.subjects):
            assert np.array_equal(x.values, y.values)

    def test_different_seeds_differ(self):
        a = generate_truth(SyntheticSpec(n_conditions=15, seed=1))
        b = generate_truth(SyntheticSpec(n_conditions=15, seed=2))
        assert not np.array_equal(a.values, b.values)

    def test_adding_subjects_keeps_earlier_ones(self):
        # subject k's data must not depend on how many subjects exist
        small = SyntheticSpec(n_conditions=12, n_subjects=3, seed=5)
        large = SyntheticSpec(n_conditions=12, n_subjects=6, seed=5)
        truth = generate_truth(small)
        few = generate_subjects(truth, small)
        many = generate_subjects(truth, large)
        for x, y in zip(few.subjects, many.subjects):
            assert np.array_equal(x.values, y.values)

    def test_truth_independent_of_subject_count(self):
        a = generate_truth(SyntheticSpec(n_conditions=12, n_subjects=3, seed=5))
        b = generate_truth(SyntheticSpec(n_conditions=12, n_subjects=9, seed=5))
        assert np.array_equal(a.values, b.values)


class TestTruthStructure:
    def test_random_features_truth_is_canonical(self):
        truth = generate_truth(SyntheticSpec(n_conditions=20, seed=3))
        assert np.array_equal(truth.values, truth.values.T)
        assert np.all(np.diag(truth.values) == 0.0)
        off = vectorize_upper(truth)
        assert np.all(off >= 0.0) and np.all(off <= 2.0)  # one-minus-pearson range

    def test_block_truth_separates_within_from_between(self):
        spec = SyntheticSpec(
            n_conditions=16, seed=3, truth_kind="block-structured", block_jitter=0.05
        )
        truth = generate_truth(spec)
        quarter = 4
        within = truth.values[0, 1]  # same block
        between = truth.values[0, quarter + 1]  # different blocks
        assert abs(within - WITHIN_BLOCK) <= 0.05
        assert abs(between - BETWEEN_BLOCK) <= 0.05
        off = vectorize_upper(truth)
        # jitter keeps the two levels fully separated
        assert np.all((off < WITHIN_BLOCK + 0.1) | (off > BETWEEN_BLOCK - 0.1))

    def test_block_truth_without_jitter_is_two_valued(self):
        spec = SyntheticSpec(
            n_conditions=12, seed=1, truth_kind="block-structured", block_jitter=0.0
        )
        off = vectorize_upper(generate_truth(spec))
        assert set(np.unique(off)) == {WITHIN_BLOCK, BETWEEN_BLOCK}


class TestSubjects:
    def test_zero_noise_copies_truth(self):
        spec = SyntheticSpec(n_conditions=10, n_subjects=3, noise_sigma=0.0, seed=2)
        truth = generate_truth(spec)
        subjects = generate_subjects(truth, spec)
        for s in subjects.subjects:
            assert np.array_equal(s.values, truth.values)
        assert noise_ceiling(subjects).ceiling_r2 == 1.0

    def test_noise_perturbs_upper_triangle_only_symmetrically(self):
        spec = SyntheticSpec(n_conditions=10, n_subjects=3, noise_sigma=0.5, seed=2)
        truth = generate_truth(spec)
        s = generate_subjects(truth, spec).subjects[0]
        assert np.array_equal(s.values, s.values.T)
        assert np.all(np.diag(s.values) == 0.0)
        assert not np.array_equal(s.values, truth.values)

    def test_sub_target_label_carried(self):
        spec = SyntheticSpec(n_conditions=10, n_subjects=3, seed=2)
        truth = generate_truth(spec)
        assert generate_subjects(truth, spec, "IT").sub_target == "IT"


def test_child_specs_are_independent_and_deterministic():
    spec = SyntheticSpec(n_conditions=10, n_subjects=3, seed=4)
    a0 = spec_for_sub_target(spec, 0)
    a1 = spec_for_sub_target(spec, 1)
    assert a0.seed != a1.seed != spec.seed
    assert spec_for_sub_target(spec, 0) == a0
    ta0 = generate_truth(a0)
    ta1 = generate_truth(a1)
    assert not np.array_equal(ta0.values, ta1.values)
