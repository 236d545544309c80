"""Exception taxonomy for the whole package.

Every error that crosses a module boundary has its own class so callers
(CLI exit codes, HTTP error mapping, tests) can branch on type instead of
parsing messages. Errors that point at a matrix entry carry ``row``/``col``.
"""

from __future__ import annotations


class RsaBenchError(Exception):
    """Base class for all package errors."""

    #: stable machine-readable identifier, used by the HTTP layer and CLI
    code = "error"


# --- feature / RDM construction ---------------------------------------------

class DimensionMismatch(RsaBenchError, ValueError):
    code = "dimension_mismatch"


class ZeroVarianceVector(RsaBenchError, ValueError):
    """A condition's feature vector is constant; correlation is undefined."""

    code = "zero_variance_vector"

    def __init__(self, condition_id: str):
        super().__init__(f"feature vector for condition {condition_id!r} has zero variance")
        self.condition_id = condition_id


class SizeMismatch(RsaBenchError, ValueError):
    code = "size_mismatch"


class NonFiniteEntry(RsaBenchError, ValueError):
    code = "non_finite_entry"

    def __init__(self, row: int, col: int, target: str | None = None):
        where = f"[{row}][{col}]" + (f" in target {target!r}" if target else "")
        super().__init__(f"non-finite entry at {where}")
        self.row = row
        self.col = col
        self.target = target


class AsymmetryExceeded(RsaBenchError, ValueError):
    code = "asymmetry_exceeded"

    def __init__(self, row: int, col: int, delta: float, tolerance: float):
        super().__init__(
            f"|m[{row}][{col}] - m[{col}][{row}]| = {delta:g} exceeds tolerance {tolerance:g}"
        )
        self.row = row
        self.col = col
        self.delta = delta
        self.tolerance = tolerance


class NonzeroDiagonal(RsaBenchError, ValueError):
    code = "nonzero_diagonal"

    def __init__(self, index: int, value: float):
        super().__init__(f"diagonal entry [{index}][{index}] = {value:g} is not ~0")
        self.row = index
        self.col = index
        self.value = value


class ConditionMismatch(RsaBenchError, ValueError):
    code = "condition_mismatch"


class EmptyRdmList(RsaBenchError, ValueError):
    code = "empty_rdm_list"


# --- wire format -------------------------------------------------------------

class MalformedFile(RsaBenchError, ValueError):
    code = "malformed_file"


class UnknownTrack(RsaBenchError, ValueError):
    code = "unknown_track"

    def __init__(self, track: object):
        super().__init__(f"unknown track {track!r}; expected 'fmri' or 'meg'")
        self.track = track


class MissingSubTarget(RsaBenchError, ValueError):
    code = "missing_sub_target"

    def __init__(self, sub_target: str):
        super().__init__(f"required sub-target {sub_target!r} is missing")
        self.sub_target = sub_target


# --- scoring -----------------------------------------------------------------

class LengthMismatch(RsaBenchError, ValueError):
    code = "length_mismatch"


class ZeroRankVariance(RsaBenchError, ValueError):
    """All entries tie after ranking; Spearman is undefined."""

    code = "zero_rank_variance"


class NoiseCeilingUndefined(RsaBenchError, ValueError):
    code = "noise_ceiling_undefined"


# --- service -----------------------------------------------------------------

class Unauthorized(RsaBenchError):
    code = "unauthorized"


class QuotaExceeded(RsaBenchError):
    code = "quota_exceeded"

    def __init__(self, limit: int, retry_after_utc: str):
        super().__init__(
            f"daily submission quota of {limit} reached; retry after {retry_after_utc}"
        )
        self.limit = limit
        self.retry_after_utc = retry_after_utc


class ChallengeClosed(RsaBenchError):
    code = "challenge_closed"


class AttestationRequired(RsaBenchError):
    code = "attestation_required"


class ValidationFailed(RsaBenchError):
    """Wraps a core validation error with, when available, entry coordinates."""

    code = "validation_failed"

    def __init__(self, cause: Exception):
        super().__init__(str(cause))
        self.cause = cause
        self.cause_code = getattr(cause, "code", "error")
        self.row = getattr(cause, "row", None)
        self.col = getattr(cause, "col", None)


class WrongConditionSet(RsaBenchError):
    code = "wrong_condition_set"


class ConfigInvalid(RsaBenchError):
    code = "config_invalid"


class ReferenceSetDegenerate(RsaBenchError):
    code = "reference_set_degenerate"


class JournalCorrupt(RsaBenchError):
    code = "journal_corrupt"

    def __init__(self, byte_offset: int, reason: str):
        super().__init__(f"journal corrupt at byte offset {byte_offset}: {reason}")
        self.byte_offset = byte_offset
        self.reason = reason
