"""Score model RDMs against multi-subject reference RDMs.

The numerical core (RDM construction, tie-aware Spearman, noise ceilings)
lives in `rdm` and `scoring`; `fileformat` and `bundles` define the wire
and on-disk formats; `challenge` and `webapi` run the hosted service;
`cli` exposes everything as the `rsabench` command.
"""

__version__ = "0.1.0"

from .challenge import hash_token
from .errors import RsaBenchError
from .fileformat import (
    FORMAT_VERSION,
    TRACKS,
    parse_rdm_document,
    read_rdm_file,
    serialize_rdm_document,
    sub_targets_for,
    write_rdm_file,
)
from .rdm import (
    ConditionSet,
    FeatureTable,
    Rdm,
    average_rdms,
    build_rdm,
    validate_and_canonicalize,
    vectorize_upper,
)
from .scoring import (
    NoiseCeiling,
    ScoreRecord,
    SubjectRdmSet,
    SubTargetScore,
    noise_ceiling,
    score_model,
    score_submission,
    spearman,
)
from .synthetic import SyntheticSpec, generate_subjects, generate_truth

__all__ = [
    "ConditionSet",
    "FeatureTable",
    "FORMAT_VERSION",
    "NoiseCeiling",
    "Rdm",
    "RsaBenchError",
    "ScoreRecord",
    "SubjectRdmSet",
    "SubTargetScore",
    "SyntheticSpec",
    "TRACKS",
    "__version__",
    "average_rdms",
    "build_rdm",
    "generate_subjects",
    "generate_truth",
    "hash_token",
    "noise_ceiling",
    "parse_rdm_document",
    "read_rdm_file",
    "score_model",
    "score_submission",
    "serialize_rdm_document",
    "spearman",
    "sub_targets_for",
    "validate_and_canonicalize",
    "vectorize_upper",
    "write_rdm_file",
]
