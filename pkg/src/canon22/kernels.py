"""Shared statistical primitives with validation.

Thin wrappers over the compiled kernels in _fast, plus closed-form
helpers (OLS line fit, survival functions) implemented from scratch so
the package has no runtime dependency beyond numpy/numba. scipy may be
used in tests as an independent oracle, never here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _fast
from .core import DegenerateInputError, EmptyInput, as_samples

__all__ = [
    "Acf",
    "WelchSpectrum",
    "Histogram",
    "autocorr",
    "first_zero_ac",
    "welch_psd",
    "quantile_symbolize",
    "equal_width_histogram",
    "ols_linfit",
    "normal_sf",
    "chi2_sf",
    "gammainc_q",
]


@dataclass(frozen=True, slots=True)
class Acf:
    """Autocorrelation values for lags 0..max_lag; values[0] is 1.0."""

    values: np.ndarray

    @property
    def max_lag(self) -> int:
        return len(self.values) - 1


@dataclass(frozen=True, slots=True)
class WelchSpectrum:
    """One-sided PSD on an angular-frequency grid (0..pi]."""

    frequencies: np.ndarray
    power: np.ndarray


@dataclass(frozen=True, slots=True)
class Histogram:
    """Equal-width histogram: bin edges (n+1), counts (n)."""

    edges: np.ndarray
    counts: np.ndarray


def _finite_samples(series) -> np.ndarray:
    return as_samples(series)


def autocorr(series, max_lag: int) -> Acf:
    """Biased-normalization autocorrelation up to max_lag.

    Direct summation at small max_lag, zero-padded FFT above the
    crossover; both paths agree to ~1e-14 and share the exact lag-0 = 1
    normalization.
    """
    x = _finite_samples(series)
    n = len(x)
    if max_lag < 1:
        raise ValueError("max_lag must be a positive integer")
    if max_lag >= n:
        raise ValueError("max_lag must be smaller than the series length")
    if _fast.pop_variance(x) == 0.0:
        raise DegenerateInputError("autocorrelation undefined for a constant series")
    return Acf(values=_fast.acf_any(x, max_lag))


def first_zero_ac(series) -> int:
    """Smallest lag with autocorrelation <= 0; the max lag when none."""
    x = _finite_samples(series)
    if len(x) < 3:
        raise DegenerateInputError("need at least 3 samples to scan the ACF")
    acf = autocorr(x, len(x) - 1)
    return int(_fast.first_zero_from_acf(acf.values))


def welch_psd(series) -> WelchSpectrum:
    """Welch PSD: rectangular window, segment length = largest power of
    two <= N, 50% overlap, one-sided, mean removed first."""
    x = _finite_samples(series)
    if len(x) < 16:
        raise DegenerateInputError("need at least 16 samples for a spectrum")
    if _fast.pop_variance(x) == 0.0:
        raise DegenerateInputError("spectrum undefined for a constant series")
    freqs, power = _fast.welch_rect(x)
    freqs.setflags(write=False)
    power.setflags(write=False)
    return WelchSpectrum(frequencies=freqs, power=power)


def quantile_symbolize(series, n_symbols: int) -> np.ndarray:
    """Map samples to n_symbols alphabet by empirical quantile bands
    (type-1 inverse CDF edges; ties to the lower symbol)."""
    x = _finite_samples(series)
    if n_symbols < 2:
        raise ValueError("n_symbols must be at least 2")
    if len(x) < n_symbols:
        raise DegenerateInputError("fewer samples than symbols")
    sym, ok = _fast.quantile_symbolize_kernel(x, n_symbols)
    if not ok:
        raise DegenerateInputError(
            "fewer distinct values than symbols; symbolization is degenerate"
        )
    return sym


def equal_width_histogram(series, n_bins: int) -> Histogram:
    """Equal-width histogram over [min, max] with right-closed last bin."""
    x = _finite_samples(series)
    if n_bins < 1:
        raise ValueError("n_bins must be positive")
    lo = float(np.min(x))
    hi = float(np.max(x))
    if hi <= lo:
        raise DegenerateInputError("histogram undefined for a constant series")
    edges = lo + (hi - lo) * np.arange(n_bins + 1) / n_bins
    counts = np.zeros(n_bins, dtype=np.int64)
    width = (hi - lo) / n_bins
    for v in x:
        k = int((v - lo) / width)
        if k >= n_bins:
            k = n_bins - 1
        elif k < 0:
            k = 0
        counts[k] += 1
    edges.setflags(write=False)
    counts.setflags(write=False)
    return Histogram(edges=edges, counts=counts)


def ols_linfit(xs, ys) -> tuple[float, float, float]:
    """Least-squares line fit; returns (slope, intercept, rss)."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.ndim != 1 or x.shape != y.shape:
        raise ValueError("xs and ys must be 1-D arrays of equal length")
    if len(x) < 2:
        raise EmptyInput("need at least 2 points for a line fit")
    mx = x.mean()
    my = y.mean()
    dx = x - mx
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DegenerateInputError("line fit undefined when all xs are equal")
    slope = float(dx @ (y - my)) / sxx
    intercept = my - slope * mx
    resid = y - (slope * x + intercept)
    return slope, float(intercept), float(resid @ resid)


def _gamma_p_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma by power series (x < a+1)."""
    ap = a
    total = 1.0 / a
    delta = total
    for _ in range(1000):
        ap += 1.0
        delta *= x / ap
        total += delta
        if abs(delta) < abs(total) * 1e-17:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q_contfrac(a: float, x: float) -> float:
    """Regularized upper incomplete gamma by Lentz continued fraction
    (x >= a+1)."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-17:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def gammainc_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x)."""
    if a <= 0.0:
        raise ValueError("a must be positive")
    if x < 0.0:
        raise ValueError("x must be non-negative")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_p_series(a, x)
    return _gamma_q_contfrac(a, x)


def normal_sf(z: float) -> float:
    """Standard normal survival function P(Z > z)."""
    z = float(z)
    if math.isnan(z):
        raise ValueError("z must be a real number")
    if z == 0.0:
        return 0.5
    q = 0.5 * gammainc_q(0.5, 0.5 * z * z)
    return q if z > 0.0 else 1.0 - q


def chi2_sf(x: float, dof: float) -> float:
    """Chi-squared survival function P(X > x) with dof degrees of freedom."""
    x = float(x)
    if dof <= 0:
        raise ValueError("dof must be positive")
    if x < 0.0:
        raise ValueError("x must be non-negative")
    return gammainc_q(dof / 2.0, x / 2.0)
