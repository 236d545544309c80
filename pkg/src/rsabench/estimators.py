"""Estimator-style wrappers around the numerical core.

These adapt RDM construction and RSA scoring to the fit/transform/score
conventions of scikit-learn pipelines, for users who want to drop the
metric into existing model-selection tooling. They work on plain arrays;
condition bookkeeping, wire formats, and error taxonomy live in the
underlying modules.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .rdm import ConditionSet, FeatureTable, Rdm, build_rdm
from .scoring import NoiseCeiling, SubjectRdmSet, noise_ceiling, score_model


def _anonymous_conditions(n: int) -> ConditionSet:
    return ConditionSet([f"c{i}" for i in range(n)])


def _as_rdm(values: np.ndarray) -> Rdm:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {values.shape}")
    return Rdm(_anonymous_conditions(values.shape[0]), values)


class PairwiseDissimilarity(TransformerMixin, BaseEstimator):
    """Turn a condition-by-feature matrix into a square RDM.

    Parameters
    ----------
    metric : str, default="one-minus-pearson"
        Dissimilarity between condition rows; also accepts "euclidean".
    """

    def __init__(self, metric: str = "one-minus-pearson"):
        self.metric = metric

    def fit(self, X, y=None):
        return self

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        table = FeatureTable(_anonymous_conditions(X.shape[0]), X)
        return build_rdm(table, self.metric).values


class RsaScorer(BaseEstimator):
    """Score candidate RDMs against a stack of subject RDMs.

    ``fit`` takes the subject RDMs (a sequence of square matrices or one
    (n_subjects, n, n) array) and computes the noise ceiling once;
    ``score`` returns the noise-normalized percentage for a candidate.
    """

    def fit(self, X, y=None):
        stack = [_as_rdm(m) for m in X]
        self.subjects_ = SubjectRdmSet("subjects", stack)
        self.ceiling_: NoiseCeiling = noise_ceiling(self.subjects_)
        return self

    def score(self, X) -> float:
        if not hasattr(self, "subjects_"):
            raise ValueError("RsaScorer must be fit on subject RDMs before scoring")
        result = score_model(_as_rdm(X), self.subjects_, self.ceiling_)
        return result.normalized_pct
