"""Timing and scaling measurement for full-vector extraction.

Records are min-of-reps wall times on a monotone clock; the scaling fit
is an ordinary least-squares line in log-log space over per-length
medians across series.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .core import EmptyInput, TimeSeries, as_samples
from .features import extract_all
from .kernels import ols_linfit

__all__ = [
    "BenchRecord",
    "ScalingFit",
    "synthetic_corpus",
    "resample_to_length",
    "time_extract",
    "fit_scaling",
    "timing_table",
]


@dataclass(frozen=True)
class BenchRecord:
    """Wall time for one (series, length) cell: minimum over >= 3 reps
    unless explicitly relaxed."""

    series_id: str
    length: int
    wall_time: float

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("length must be positive")
        if not self.wall_time >= 0.0:
            raise ValueError("wall_time must be non-negative")


@dataclass(frozen=True)
class ScalingFit:
    """Power-law fit time = prefactor * length**exponent."""

    exponent: float
    prefactor: float
    r_squared: float

    def __post_init__(self):
        if not 0.0 <= self.r_squared <= 1.0 + 1e-12:
            raise ValueError("r_squared must lie in [0, 1]")


def synthetic_corpus(
    seed: int = 0, n_per_kind: int = 10, length: int = 10000
) -> list[tuple[str, TimeSeries]]:
    """40 seeded series: white noise, AR(1) phi=0.8, noisy sine, and
    random walk, n_per_kind of each."""
    rng = np.random.Generator(np.random.PCG64(seed))
    out: list[tuple[str, TimeSeries]] = []
    t = np.arange(length)
    for i in range(n_per_kind):
        out.append((f"noise_{i}", TimeSeries(rng.standard_normal(length))))
    for i in range(n_per_kind):
        e = rng.standard_normal(length)
        x = np.empty(length)
        x[0] = e[0]
        for s in range(1, length):
            x[s] = 0.8 * x[s - 1] + e[s]
        out.append((f"ar1_{i}", TimeSeries(x)))
    for i in range(n_per_kind):
        phase = rng.uniform(0.0, 2.0 * np.pi)
        period = rng.uniform(15.0, 60.0)
        x = np.sin(2.0 * np.pi * t / period + phase) + 0.3 * rng.standard_normal(length)
        out.append((f"sine_{i}", TimeSeries(x)))
    for i in range(n_per_kind):
        out.append((f"walk_{i}", TimeSeries(np.cumsum(rng.standard_normal(length)))))
    return out


def resample_to_length(series, target: int) -> TimeSeries:
    """Truncate to shorter lengths; upsample by linear interpolation."""
    x = as_samples(series)
    if target < 5:
        raise ValueError("target length must be at least 5")
    n = len(x)
    if target <= n:
        return TimeSeries(x[:target].copy())
    pos = np.linspace(0.0, n - 1.0, target)
    return TimeSeries(np.interp(pos, np.arange(n), x))


def time_extract(
    series_set: list[tuple[str, TimeSeries]],
    lengths,
    reps: int = 3,
) -> list[BenchRecord]:
    """Min-of-reps wall time of extract_all per (series, length),
    single-threaded, monotone clock."""
    if reps < 1:
        raise ValueError("reps must be positive")
    records = []
    for length in lengths:
        for sid, series in series_set:
            y = resample_to_length(series, int(length)).samples
            best = float("inf")
            for _ in range(reps):
                t0 = time.perf_counter()
                extract_all(y)
                t1 = time.perf_counter()
                if t1 - t0 < best:
                    best = t1 - t0
            records.append(
                BenchRecord(series_id=sid, length=int(length), wall_time=best)
            )
    return records


def fit_scaling(records: list[BenchRecord]) -> ScalingFit:
    """OLS line on (ln length, ln median wall time across series)."""
    by_length: dict[int, list[float]] = {}
    for r in records:
        by_length.setdefault(r.length, []).append(r.wall_time)
    if len(by_length) < 5:
        raise EmptyInput("need at least 5 distinct lengths for a scaling fit")
    lengths = sorted(by_length)
    xs = np.log(np.array(lengths, dtype=np.float64))
    ys = np.log(np.array([np.median(by_length[L]) for L in lengths]))
    slope, intercept, rss = ols_linfit(xs, ys)
    tss = float(((ys - ys.mean()) ** 2).sum())
    r2 = 1.0 if tss == 0.0 else max(0.0, 1.0 - rss / tss)
    return ScalingFit(exponent=slope, prefactor=float(np.exp(intercept)), r_squared=r2)


def timing_table(records: list[BenchRecord]) -> str:
    """CSV text: series_id, length, seconds."""
    lines = ["series_id,length,seconds"]
    for r in records:
        lines.append(f"{r.series_id},{r.length},{r.wall_time!r}")
    return "\n".join(lines) + "\n"
