"""The 22 canonical features and the full-vector extractor.

Every public feature function z-scores first and raises
DegenerateInputError / NotComputableError on failure; extract_all never
raises for a valid series and reports failures as markers instead.
Both paths share the same compiled kernels, so a feature computed alone
is bit-identical to its entry in the full vector.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _fast
from .core import (
    CANONICAL_FEATURE_NAMES,
    DegenerateInputError,
    FeatureDescriptor,
    FeatureVector,
    NotComputableError,
    as_samples,
)

__all__ = [
    "FEATURE_DESCRIPTORS",
    "histogram_mode",
    "longstretch_above_mean",
    "longstretch_decreasing",
    "outlier_include_mdrmd",
    "f1ecac",
    "first_min_ac",
    "spectral_area_5_1",
    "spectral_centroid",
    "local_mean_forecast_stderr",
    "local_mean1_tauresrat",
    "trev_num",
    "histogram_ami",
    "ami_gaussian_first_min",
    "pnn40",
    "motif_three_hh",
    "embed2_dist_expfit_meandiff",
    "fluct_anal_prop_r1",
    "transition_matrix_sumdiagcov",
    "periodicity_wang",
    "extract_all",
    "batch_extract",
    "compute_feature",
    "feature_matrix",
]

_MIN_DEFAULT = 5
_MIN_SPECTRAL = 16
_MIN_FLUCT = 64


def _zsamples(series, min_length: int) -> np.ndarray:
    x = as_samples(series)
    if x.shape[0] < min_length:
        raise DegenerateInputError(
            f"need at least {min_length} samples, got {x.shape[0]}"
        )
    z, sd = _fast.zscore_kernel(x)
    if not sd > 0.0:
        raise DegenerateInputError("feature undefined for a constant series")
    return z


def histogram_mode(series, n_bins: int = 5) -> float:
    """Center of the fullest equal-width histogram bin (ties averaged)."""
    if n_bins not in (5, 10):
        raise ValueError("n_bins must be 5 or 10")
    z = _zsamples(series, _MIN_DEFAULT)
    return float(_fast.histogram_mode_kernel(z, n_bins))


def longstretch_above_mean(series) -> int:
    """Longest run of samples strictly above the series mean."""
    z = _zsamples(series, _MIN_DEFAULT)
    return int(_fast.longstretch_above_mean_kernel(z))


def longstretch_decreasing(series) -> int:
    """Longest run of strictly decreasing successive samples."""
    z = _zsamples(series, _MIN_DEFAULT)
    return int(_fast.longstretch_decreasing_kernel(z))


def outlier_include_mdrmd(series, sign: str = "positive") -> float:
    """Median over outlier thresholds of the relative median event time."""
    if sign not in ("positive", "negative"):
        raise ValueError("sign must be 'positive' or 'negative'")
    z = _zsamples(series, _MIN_DEFAULT)
    if sign == "negative":
        z = -z
    value, ok = _fast.outlier_mdrmd_kernel(z)
    if not ok:
        raise DegenerateInputError("no threshold has enough qualifying events")
    return float(value)


def f1ecac(series) -> float:
    """Interpolated first 1/e crossing of the autocorrelation function."""
    z = _zsamples(series, _MIN_DEFAULT)
    acf = _fast.acf_any(z, len(z) - 1)
    return float(_fast.f1ecac_from_acf(acf))


def first_min_ac(series) -> int:
    """First local minimum of the autocorrelation function."""
    z = _zsamples(series, _MIN_DEFAULT)
    acf = _fast.acf_any(z, len(z) - 1)
    return int(_fast.first_min_from_acf(acf))


def spectral_area_5_1(series) -> float:
    """Fraction of Welch power below one fifth of the frequency range."""
    z = _zsamples(series, _MIN_SPECTRAL)
    freqs, power = _fast.welch_rect(z)
    return float(_fast.spectral_area_from(freqs, power))


def spectral_centroid(series) -> float:
    """Angular frequency where cumulative Welch power reaches half."""
    z = _zsamples(series, _MIN_SPECTRAL)
    freqs, power = _fast.welch_rect(z)
    return float(_fast.spectral_centroid_from(freqs, power))


def local_mean_forecast_stderr(series, window: int = 3) -> float:
    """Std of residuals from forecasting by the mean of the last window."""
    if window < 1:
        raise ValueError("window must be positive")
    z = _zsamples(series, max(_MIN_DEFAULT, window + 2))
    return float(_fast.local_mean_stderr_kernel(z, window))


def local_mean1_tauresrat(series) -> float:
    """Correlation-length ratio after first differencing."""
    z = _zsamples(series, _MIN_DEFAULT)
    n = len(z)
    acf = _fast.acf_any(z, n - 1)
    fzc = _fast.first_zero_from_acf(acf)
    dz = np.diff(z)
    if _fast.pop_variance(dz) == 0.0:
        raise DegenerateInputError("differenced series is constant")
    acf_d = _fast.acf_any(dz, n - 2)
    return float(_fast.first_zero_from_acf(acf_d) / fzc)


def trev_num(series) -> float:
    """Mean cubed successive difference of the z-scored series."""
    z = _zsamples(series, _MIN_DEFAULT)
    return float(_fast.trev_kernel(z))


def histogram_ami(series, lag: int = 2, n_bins: int = 5) -> float:
    """Mutual information (nats) of the binned (x_t, x_{t+lag}) joint."""
    if lag < 1 or n_bins < 2:
        raise ValueError("lag must be >= 1 and n_bins >= 2")
    z = _zsamples(series, max(_MIN_DEFAULT, lag + 2))
    return float(_fast.histogram_ami_kernel(z, lag, n_bins))


def ami_gaussian_first_min(series, max_lag: int = 40) -> int:
    """First local minimum of the Gaussian automutual information."""
    if max_lag < 1:
        raise ValueError("max_lag must be positive")
    z = _zsamples(series, _MIN_DEFAULT)
    acf = _fast.acf_any(z, len(z) - 1)
    return int(_fast.ami_gaussian_first_min_from_acf(acf, max_lag))


def pnn40(series) -> float:
    """Fraction of successive z-scored differences larger than 0.04."""
    z = _zsamples(series, _MIN_DEFAULT)
    return float(_fast.pnn40_kernel(z))


def motif_three_hh(series) -> float:
    """Entropy (nats) of successive-letter pairs in a 3-letter alphabet."""
    z = _zsamples(series, _MIN_DEFAULT)
    sym, ok = _fast.quantile_symbolize_kernel(z, 3)
    if not ok:
        raise DegenerateInputError("fewer than 3 distinct values")
    return float(_fast.pair_entropy3_kernel(sym))


def embed2_dist_expfit_meandiff(series) -> float:
    """Mismatch between embedded-distance histogram and exponential fit."""
    z = _zsamples(series, _MIN_DEFAULT)
    n = len(z)
    acf = _fast.acf_any(z, n - 1)
    tau = max(1, n // 10)
    fzc = _fast.first_zero_from_acf(acf)
    if fzc < tau:
        tau = fzc
    value, ok = _fast.embed2_expfit_meandiff_kernel(z, tau)
    if not ok:
        raise DegenerateInputError("too few embedded points for a histogram")
    return float(value)


def fluct_anal_prop_r1(series, method: str = "dfa") -> float:
    """Relative position of the best two-regime split of log F(tau)."""
    if method not in ("dfa", "rsrange"):
        raise ValueError("method must be 'dfa' or 'rsrange'")
    z = _zsamples(series, _MIN_FLUCT)
    value, ok = _fast.fluct_prop_r1_kernel(z, method == "dfa")
    if not ok:
        raise DegenerateInputError("not enough usable scales")
    return float(value)


def transition_matrix_sumdiagcov(series) -> float:
    """Trace of the covariance of the 3-letter transition matrix columns."""
    z = _zsamples(series, _MIN_DEFAULT)
    acf = _fast.acf_any(z, len(z) - 1)
    stride = _fast.first_zero_from_acf(acf)
    value, ok = _fast.transition_sumdiagcov_kernel(z, stride)
    if not ok:
        raise DegenerateInputError(
            "downsampled series does not support a 3-letter transition matrix"
        )
    return float(value)


def periodicity_wang(series) -> int:
    """Spline-detrended ACF peak lag; 0 when no qualifying peak exists."""
    z = _zsamples(series, _MIN_DEFAULT)
    lag, flag = _fast.periodicity_wang_kernel(z)
    if flag == 1:
        raise NotComputableError("spline detrend system is singular")
    return int(lag)


_SPECTRAL = ("SP_Summaries_welch_rect_area_5_1", "SP_Summaries_welch_rect_centroid")
_FLUCT = (
    "SC_FluctAnal_2_dfa_50_1_2_logi_prop_r1",
    "SC_FluctAnal_2_rsrangefit_50_1_logi_prop_r1",
)

_FAMILY_OF = {
    "DN_HistogramMode_5": "distribution",
    "DN_HistogramMode_10": "distribution",
    "SB_BinaryStats_mean_longstretch1": "simple-temporal",
    "DN_OutlierInclude_p_001_mdrmd": "simple-temporal",
    "DN_OutlierInclude_n_001_mdrmd": "simple-temporal",
    "CO_f1ecac": "linear-autocorr",
    "CO_FirstMin_ac": "linear-autocorr",
    "SP_Summaries_welch_rect_area_5_1": "linear-autocorr",
    "SP_Summaries_welch_rect_centroid": "linear-autocorr",
    "FC_LocalSimple_mean3_stderr": "linear-autocorr",
    "CO_trev_1_num": "nonlinear-autocorr",
    "CO_HistogramAMI_even_2_5": "nonlinear-autocorr",
    "IN_AutoMutualInfoStats_40_gaussian_fmmi": "nonlinear-autocorr",
    "MD_hrv_classic_pnn40": "successive-differences",
    "SB_BinaryStats_diff_longstretch0": "successive-differences",
    "SB_MotifThree_quantile_hh": "successive-differences",
    "FC_LocalSimple_mean1_tauresrat": "successive-differences",
    "CO_Embed2_Dist_tau_d_expfit_meandiff": "successive-differences",
    "SC_FluctAnal_2_dfa_50_1_2_logi_prop_r1": "fluctuation",
    "SC_FluctAnal_2_rsrangefit_50_1_logi_prop_r1": "fluctuation",
    "SB_TransitionMatrix_3ac_sumdiagcov": "other",
    "PD_PeriodicityWang_th0_01": "other",
}


def _min_length_of(name: str) -> int:
    if name in _SPECTRAL:
        return _MIN_SPECTRAL
    if name in _FLUCT:
        return _MIN_FLUCT
    return _MIN_DEFAULT


FEATURE_DESCRIPTORS: tuple[FeatureDescriptor, ...] = tuple(
    FeatureDescriptor(name=n, family=_FAMILY_OF[n], min_length=_min_length_of(n))
    for n in CANONICAL_FEATURE_NAMES
)

_DISPATCH: dict[str, Callable] = {
    "DN_HistogramMode_5": lambda s: histogram_mode(s, 5),
    "DN_HistogramMode_10": lambda s: histogram_mode(s, 10),
    "SB_BinaryStats_mean_longstretch1": longstretch_above_mean,
    "DN_OutlierInclude_p_001_mdrmd": lambda s: outlier_include_mdrmd(s, "positive"),
    "DN_OutlierInclude_n_001_mdrmd": lambda s: outlier_include_mdrmd(s, "negative"),
    "CO_f1ecac": f1ecac,
    "CO_FirstMin_ac": first_min_ac,
    "SP_Summaries_welch_rect_area_5_1": spectral_area_5_1,
    "SP_Summaries_welch_rect_centroid": spectral_centroid,
    "FC_LocalSimple_mean3_stderr": lambda s: local_mean_forecast_stderr(s, 3),
    "CO_trev_1_num": trev_num,
    "CO_HistogramAMI_even_2_5": lambda s: histogram_ami(s, 2, 5),
    "IN_AutoMutualInfoStats_40_gaussian_fmmi": lambda s: ami_gaussian_first_min(s, 40),
    "MD_hrv_classic_pnn40": pnn40,
    "SB_BinaryStats_diff_longstretch0": longstretch_decreasing,
    "SB_MotifThree_quantile_hh": motif_three_hh,
    "FC_LocalSimple_mean1_tauresrat": local_mean1_tauresrat,
    "CO_Embed2_Dist_tau_d_expfit_meandiff": embed2_dist_expfit_meandiff,
    "SC_FluctAnal_2_dfa_50_1_2_logi_prop_r1": lambda s: fluct_anal_prop_r1(s, "dfa"),
    "SC_FluctAnal_2_rsrangefit_50_1_logi_prop_r1": lambda s: fluct_anal_prop_r1(
        s, "rsrange"
    ),
    "SB_TransitionMatrix_3ac_sumdiagcov": transition_matrix_sumdiagcov,
    "PD_PeriodicityWang_th0_01": periodicity_wang,
}


def compute_feature(name: str, series) -> float:
    """Compute one canonical feature by name."""
    try:
        fn = _DISPATCH[name]
    except KeyError:
        raise KeyError(f"unknown feature name: {name!r}") from None
    return fn(series)


def extract_all(series) -> FeatureVector:
    """All 22 features; per-feature failures become markers, never raises
    for a valid series."""
    x = as_samples(series)
    values, flags = _fast.extract_core(x)
    return FeatureVector(values, flags)


def batch_extract(series_list: Iterable, threads: int = 1) -> list[FeatureVector]:
    """extract_all over many series, order preserving.

    The kernels release the GIL, so thread-level parallelism is real;
    results are identical for any thread count.
    """
    arrays = [as_samples(s) for s in series_list]
    if threads <= 1 or len(arrays) < 2:
        return [extract_all(a) for a in arrays]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(extract_all, arrays))


def feature_matrix(
    vectors: Sequence[FeatureVector], fill_values: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stack vectors into an (n, 22) matrix, imputing markers.

    Markers are replaced by the column mean over computed entries (or by
    fill_values when given, e.g. training-set means applied to a test
    set); a column with no computed entries falls back to 0.0. Returns
    (matrix, had_marker per column, fill values used).
    """
    if not vectors:
        raise ValueError("no feature vectors given")
    raw = np.stack([v.values for v in vectors])
    special = np.stack([v.flags != 0 for v in vectors])
    had_marker = special.any(axis=0)
    if fill_values is None:
        fill_values = np.zeros(raw.shape[1])
        for j in range(raw.shape[1]):
            good = ~special[:, j]
            if good.any():
                fill_values[j] = raw[good, j].mean()
    out = raw.copy()
    for j in range(raw.shape[1]):
        out[special[:, j], j] = fill_values[j]
    return out, had_marker, fill_values
