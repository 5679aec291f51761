"""canon22: a canonical 22-feature time-series vocabulary plus the
data-driven distillation pipeline that selects it.

Public surface: feature extraction (features), shared statistical
primitives (kernels), decision-tree evaluation (classify), the
significance / scoring / clustering selector (selector), benchmarking
(bench), dataset and table IO (dataio), and a command line (cli).
"""
from .core import (
    CANONICAL_FEATURE_NAMES,
    FEATURE_FAMILIES,
    CanonError,
    DegenerateInputError,
    EmptyInput,
    FeatureDescriptor,
    FeatureValue,
    FeatureVector,
    Marker,
    NonFiniteSample,
    NotComputableError,
    TimeSeries,
    validate_series,
    zscore,
)
from .features import (
    FEATURE_DESCRIPTORS,
    batch_extract,
    compute_feature,
    extract_all,
)

__version__ = "0.1.0"

__all__ = [
    "CANONICAL_FEATURE_NAMES",
    "FEATURE_FAMILIES",
    "FEATURE_DESCRIPTORS",
    "CanonError",
    "DegenerateInputError",
    "EmptyInput",
    "FeatureDescriptor",
    "FeatureValue",
    "FeatureVector",
    "Marker",
    "NonFiniteSample",
    "NotComputableError",
    "TimeSeries",
    "validate_series",
    "zscore",
    "batch_extract",
    "compute_feature",
    "extract_all",
    "__version__",
]
