"""Core value types shared by every module in the package.

All series data is 1-D float64. Non-finite samples are rejected at the
boundary so downstream feature code needs no NaN guards. Feature outputs
that cannot be computed are typed markers, never sentinel floats.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np

__all__ = [
    "CANONICAL_FEATURE_NAMES",
    "FEATURE_FAMILIES",
    "CanonError",
    "EmptyInput",
    "NonFiniteSample",
    "DegenerateInputError",
    "NotComputableError",
    "Marker",
    "TimeSeries",
    "FeatureValue",
    "FeatureVector",
    "FeatureDescriptor",
    "validate_series",
    "as_samples",
    "zscore",
]

# Canonical feature identifiers, fixed order. FeatureVector keys use these
# names verbatim and every table/CSV column order follows this tuple.
CANONICAL_FEATURE_NAMES: tuple[str, ...] = (
    "DN_HistogramMode_5",
    "DN_HistogramMode_10",
    "SB_BinaryStats_mean_longstretch1",
    "DN_OutlierInclude_p_001_mdrmd",
    "DN_OutlierInclude_n_001_mdrmd",
    "CO_f1ecac",
    "CO_FirstMin_ac",
    "SP_Summaries_welch_rect_area_5_1",
    "SP_Summaries_welch_rect_centroid",
    "FC_LocalSimple_mean3_stderr",
    "CO_trev_1_num",
    "CO_HistogramAMI_even_2_5",
    "IN_AutoMutualInfoStats_40_gaussian_fmmi",
    "MD_hrv_classic_pnn40",
    "SB_BinaryStats_diff_longstretch0",
    "SB_MotifThree_quantile_hh",
    "FC_LocalSimple_mean1_tauresrat",
    "CO_Embed2_Dist_tau_d_expfit_meandiff",
    "SC_FluctAnal_2_dfa_50_1_2_logi_prop_r1",
    "SC_FluctAnal_2_rsrangefit_50_1_logi_prop_r1",
    "SB_TransitionMatrix_3ac_sumdiagcov",
    "PD_PeriodicityWang_th0_01",
)

FEATURE_FAMILIES: tuple[str, ...] = (
    "distribution",
    "simple-temporal",
    "linear-autocorr",
    "nonlinear-autocorr",
    "successive-differences",
    "fluctuation",
    "other",
)

# Integer flag codes used by the compiled kernels; 0 means a value was
# computed, nonzero selects a Marker.
FLAG_OK = 0
FLAG_NOT_COMPUTABLE = 1
FLAG_DEGENERATE = 2


class CanonError(Exception):
    """Base class for all package errors."""


class EmptyInput(CanonError):
    """Raised when a series or collection has no entries."""


class NonFiniteSample(CanonError):
    """Raised when a raw sample is NaN or infinite.

    Attributes
    ----------
    index : int
        Position of the first offending sample.
    """

    def __init__(self, index: int):
        self.index = int(index)
        super().__init__(f"non-finite sample at index {self.index}")


class DegenerateInputError(CanonError):
    """Raised when an input is structurally unusable (e.g. constant series)."""


class NotComputableError(CanonError):
    """Raised when an otherwise valid input yields no defined output."""


class Marker(enum.Enum):
    """Special feature outputs; serialized by their string value."""

    NOT_COMPUTABLE = "NotComputable"
    DEGENERATE_INPUT = "DegenerateInput"


_FLAG_TO_MARKER = {
    FLAG_NOT_COMPUTABLE: Marker.NOT_COMPUTABLE,
    FLAG_DEGENERATE: Marker.DEGENERATE_INPUT,
}
_MARKER_TO_FLAG = {m: f for f, m in _FLAG_TO_MARKER.items()}


@dataclass(frozen=True)
class TimeSeries:
    """Immutable 1-D float64 series with all samples finite."""

    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))
        self.samples.setflags(write=False)

    def __len__(self) -> int:
        return self.samples.shape[0]


def validate_series(raw) -> TimeSeries:
    """Coerce a sequence of reals to a TimeSeries, rejecting bad samples.

    Raises
    ------
    EmptyInput
        If the sequence has no entries.
    NonFiniteSample
        With the index of the first NaN or infinite entry.
    """
    arr = np.atleast_1d(np.asarray(raw, dtype=np.float64)).ravel()
    if arr.size == 0:
        raise EmptyInput("series has no samples")
    finite = np.isfinite(arr)
    if not finite.all():
        raise NonFiniteSample(int(np.argmin(finite)))
    return TimeSeries(arr)


def as_samples(series) -> np.ndarray:
    """Return the float64 sample array of a TimeSeries or raw sequence."""
    if isinstance(series, TimeSeries):
        return series.samples
    return validate_series(series).samples


@dataclass(frozen=True, slots=True)
class FeatureValue:
    """Either a finite float or a special marker, never both."""

    value: float
    marker: Marker | None = None

    def __post_init__(self):
        if self.marker is None:
            if not np.isfinite(self.value):
                raise ValueError("computed feature value must be finite")
        elif not np.isnan(self.value):
            raise ValueError("marked feature value must carry NaN")

    @classmethod
    def of(cls, value: float) -> "FeatureValue":
        return cls(float(value), None)

    @classmethod
    def special(cls, marker: Marker) -> "FeatureValue":
        return cls(float("nan"), marker)

    @property
    def is_special(self) -> bool:
        return self.marker is not None


class FeatureVector(Mapping):
    """Ordered map of the 22 canonical feature names to FeatureValues.

    Stored internally as a value array plus an int8 flag array so batch
    extraction can stay allocation-light; FeatureValue objects are built
    on access.
    """

    __slots__ = ("values", "flags")

    def __init__(self, values: np.ndarray, flags: np.ndarray):
        values = np.asarray(values, dtype=np.float64)
        flags = np.asarray(flags, dtype=np.int8)
        n = len(CANONICAL_FEATURE_NAMES)
        if values.shape != (n,) or flags.shape != (n,):
            raise ValueError(f"feature vector must have exactly {n} entries")
        bad = (flags != FLAG_OK) & ~np.isnan(values)
        if bad.any() or not np.isfinite(values[flags == FLAG_OK]).all():
            raise ValueError("flags and values disagree")
        values.setflags(write=False)
        flags.setflags(write=False)
        self.values = values
        self.flags = flags

    @classmethod
    def from_entries(cls, entries: Mapping[str, FeatureValue]) -> "FeatureVector":
        if tuple(entries.keys()) != CANONICAL_FEATURE_NAMES:
            raise ValueError("entries must use the canonical names in order")
        values = np.array([fv.value for fv in entries.values()], dtype=np.float64)
        flags = np.array(
            [_MARKER_TO_FLAG.get(fv.marker, FLAG_OK) for fv in entries.values()],
            dtype=np.int8,
        )
        return cls(values, flags)

    @property
    def names(self) -> tuple[str, ...]:
        return CANONICAL_FEATURE_NAMES

    def __getitem__(self, name: str) -> FeatureValue:
        idx = CANONICAL_FEATURE_NAMES.index(name)
        flag = int(self.flags[idx])
        if flag == FLAG_OK:
            return FeatureValue.of(self.values[idx])
        return FeatureValue.special(_FLAG_TO_MARKER[flag])

    def __iter__(self) -> Iterator[str]:
        return iter(CANONICAL_FEATURE_NAMES)

    def __len__(self) -> int:
        return len(CANONICAL_FEATURE_NAMES)

    def markers(self) -> dict[str, Marker]:
        """Names of entries that hold a special marker."""
        return {
            CANONICAL_FEATURE_NAMES[i]: _FLAG_TO_MARKER[int(f)]
            for i, f in enumerate(self.flags)
            if f != FLAG_OK
        }

    def to_floats(self) -> np.ndarray:
        """Values as float64 with NaN at marked entries (copy)."""
        return self.values.copy()

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureVector):
            return NotImplemented
        same_vals = np.array_equal(self.values, other.values, equal_nan=True)
        return same_vals and np.array_equal(self.flags, other.flags)

    def __repr__(self) -> str:
        n_special = int((self.flags != FLAG_OK).sum())
        return f"FeatureVector(22 features, {n_special} special)"


@dataclass(frozen=True, slots=True)
class FeatureDescriptor:
    """Static metadata for one canonical feature."""

    name: str
    family: str
    min_length: int

    def __post_init__(self):
        if self.family not in FEATURE_FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.min_length < 1:
            raise ValueError("min_length must be positive")


def zscore(series) -> TimeSeries:
    """Normalize to mean 0 and sample (N-1 denominator) standard deviation 1.

    Raises
    ------
    DegenerateInputError
        If the series is constant or shorter than 2 samples.
    """
    from . import _fast

    x = as_samples(series)
    if x.shape[0] < 2:
        raise DegenerateInputError("z-score needs at least 2 samples")
    z, sd = _fast.zscore_kernel(x)
    if not sd > 0.0:
        raise DegenerateInputError("z-score undefined for a constant series")
    return TimeSeries(z)
