"""Core RDM data types, dissimilarity metrics, and RDM algebra.

An RDM (representational dissimilarity matrix) is a square symmetric matrix
over a fixed, ordered set of conditions, with zero diagonal and finite
entries. Everything downstream (scoring, the wire format, the service)
assumes these invariants, so `Rdm` enforces them at construction and all
public constructors canonicalize first.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import (
    AsymmetryExceeded,
    ConditionMismatch,
    DimensionMismatch,
    EmptyRdmList,
    NonFiniteEntry,
    NonzeroDiagonal,
    SizeMismatch,
    ZeroVarianceVector,
)

#: supported dissimilarity metrics for building RDMs from feature vectors
METRICS = ("one-minus-pearson", "euclidean")

#: relative tolerance for accepting near-symmetric input matrices
ASYMMETRY_RTOL = 1e-6
#: absolute tolerance for accepting near-zero diagonals
DIAGONAL_ATOL = 1e-6

#: minimum number of conditions (a rank correlation needs >= 3 pairs)
MIN_CONDITIONS = 3


@dataclass(frozen=True)
class ConditionSet:
    """Ordered, unique identifiers of the stimuli an RDM is indexed by."""

    ids: tuple[str, ...]

    def __init__(self, ids: Iterable[str]):
        ids = tuple(str(i) for i in ids)
        if len(ids) < MIN_CONDITIONS:
            raise SizeMismatch(f"need at least {MIN_CONDITIONS} conditions, got {len(ids)}")
        if len(set(ids)) != len(ids):
            seen: set[str] = set()
            dup = next(i for i in ids if i in seen or seen.add(i))
            raise ConditionMismatch(f"duplicate condition id {dup!r}")
        object.__setattr__(self, "ids", ids)

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def n(self) -> int:
        return len(self.ids)


def _as_float_matrix(values: object, what: str) -> np.ndarray:
    try:
        arr = np.asarray(values, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise DimensionMismatch(f"{what} is not a rectangular numeric array: {exc}") from exc
    return arr


@dataclass(frozen=True)
class FeatureTable:
    """One feature vector per condition, all of equal dimension d >= 2."""

    conditions: ConditionSet
    vectors: np.ndarray = field(repr=False)

    def __init__(self, conditions: ConditionSet, vectors: object):
        arr = _as_float_matrix(vectors, "feature table")
        if arr.ndim != 2:
            raise DimensionMismatch(f"feature table must be 2-D, got shape {arr.shape}")
        if arr.shape[0] != conditions.n:
            raise SizeMismatch(
                f"{arr.shape[0]} feature vectors for {conditions.n} conditions"
            )
        if arr.shape[1] < 2:
            raise DimensionMismatch(f"feature dimension must be >= 2, got {arr.shape[1]}")
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise NonFiniteEntry(int(bad[0]), int(bad[1]))
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "conditions", conditions)
        object.__setattr__(self, "vectors", arr)

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class Rdm:
    """A canonical dissimilarity matrix: symmetric, zero diagonal, finite.

    Construct through `build_rdm`, `validate_and_canonicalize`, or
    `average_rdms`; the constructor itself only accepts already-canonical
    values and rejects anything else.
    """

    conditions: ConditionSet
    values: np.ndarray = field(repr=False)

    def __init__(self, conditions: ConditionSet, values: object):
        arr = _as_float_matrix(values, "RDM")
        n = conditions.n
        if arr.shape != (n, n):
            raise SizeMismatch(f"RDM shape {arr.shape} does not match {n} conditions")
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise NonFiniteEntry(int(bad[0]), int(bad[1]))
        if not np.array_equal(arr, arr.T):
            bad = np.argwhere(arr != arr.T)[0]
            raise AsymmetryExceeded(
                int(bad[0]), int(bad[1]), float(abs(arr[bad[0], bad[1]] - arr[bad[1], bad[0]])), 0.0
            )
        diag = np.diagonal(arr)
        if np.any(diag != 0.0):
            idx = int(np.argmax(diag != 0.0))
            raise NonzeroDiagonal(idx, float(diag[idx]))
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "conditions", conditions)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.conditions.n


def build_rdm(features: FeatureTable, metric: str = "one-minus-pearson") -> Rdm:
    """Compute the pairwise dissimilarity matrix of a feature table.

    With ``one-minus-pearson`` every feature vector must have nonzero
    variance, and entries land in [0, 2]; ``euclidean`` entries are >= 0.
    The result is deterministic for identical input.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    x = features.vectors
    if metric == "one-minus-pearson":
        stds = np.std(x, axis=1)
        if np.any(stds == 0.0):
            idx = int(np.argmax(stds == 0.0))
            raise ZeroVarianceVector(features.conditions.ids[idx])
        values = 1.0 - np.corrcoef(x)  # corrcoef clips to [-1, 1]
    else:
        values = squareform(pdist(x, metric="euclidean"))
    # exact canonical form regardless of BLAS rounding quirks
    values = (values + values.T) / 2.0
    np.fill_diagonal(values, 0.0)
    return Rdm(features.conditions, values)


def validate_and_canonicalize(raw: object, conditions: ConditionSet) -> Rdm:
    """Gatekeeper for externally supplied matrices.

    Accepts matrices that are symmetric within ``1e-6 * (1 + max|raw|)`` and
    have diagonal within ``1e-6`` of zero, returning the exactly symmetrized
    matrix ``(raw + raw.T) / 2`` with the diagonal forced to 0. Anything
    outside tolerance is rejected rather than silently repaired.
    """
    arr = _as_float_matrix(raw, "matrix")
    n = conditions.n
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise SizeMismatch(f"matrix shape {arr.shape} is not square")
    if arr.shape != (n, n):
        raise SizeMismatch(f"matrix shape {arr.shape} does not match {n} conditions")
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise NonFiniteEntry(int(bad[0]), int(bad[1]))

    asym = np.abs(arr - arr.T)
    tol = ASYMMETRY_RTOL * (1.0 + float(np.max(np.abs(arr))))
    worst = float(np.max(asym))
    if worst > tol:
        i, j = np.unravel_index(int(np.argmax(asym)), asym.shape)
        raise AsymmetryExceeded(int(i), int(j), worst, tol)

    diag = np.abs(np.diagonal(arr))
    if float(np.max(diag)) > DIAGONAL_ATOL:
        idx = int(np.argmax(diag))
        raise NonzeroDiagonal(idx, float(arr[idx, idx]))

    values = (arr + arr.T) / 2.0
    np.fill_diagonal(values, 0.0)
    return Rdm(conditions, values)


def vectorize_upper(rdm: Rdm) -> np.ndarray:
    """Strictly-upper-triangle entries in row-major order (i < j)."""
    n = rdm.n
    return rdm.values[np.triu_indices(n, k=1)].copy()


def upper_vector_to_rdm(vector: np.ndarray, conditions: ConditionSet) -> Rdm:
    """Inverse of `vectorize_upper`: rebuild a canonical RDM from its triangle."""
    n = conditions.n
    vec = np.asarray(vector, dtype=np.float64)
    expected = n * (n - 1) // 2
    if vec.shape != (expected,):
        raise SizeMismatch(f"expected upper-triangle length {expected}, got {vec.shape}")
    values = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    values[iu] = vec
    values[(iu[1], iu[0])] = vec
    return Rdm(conditions, values)


def average_rdms(rdms: Sequence[Rdm]) -> Rdm:
    """Entry-wise arithmetic mean of RDMs sharing one condition set."""
    if len(rdms) == 0:
        raise EmptyRdmList("cannot average an empty list of RDMs")
    conditions = rdms[0].conditions
    for r in rdms[1:]:
        if r.conditions != conditions:
            raise ConditionMismatch("RDMs do not share one condition set")
    stack = np.stack([r.values for r in rdms])
    return Rdm(conditions, np.mean(stack, axis=0))
