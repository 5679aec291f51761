"""Dataset loading and feature-table serialization.

Datasets are UCR-style delimited text: one series per line, label
first, then the samples. Ragged lengths are allowed; labels stay
opaque strings; samples are never normalized at load time. Feature
tables round-trip bit-exactly through CSV (shortest-repr floats) and
JSON.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    CANONICAL_FEATURE_NAMES,
    CanonError,
    EmptyInput,
    FeatureVector,
    Marker,
    NonFiniteSample,
    TimeSeries,
    validate_series,
)

__all__ = [
    "EmptyFile",
    "MalformedLine",
    "IoFailure",
    "ClassifiedDataset",
    "load_ucr_tsv",
    "find_dataset_pairs",
    "write_feature_table",
    "read_feature_table",
]


class EmptyFile(CanonError):
    """A dataset file contains no data lines."""


class MalformedLine(CanonError):
    """A dataset line cannot be parsed; carries the 1-based line number."""

    def __init__(self, lineno: int, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno


class IoFailure(CanonError):
    """Filesystem-level failure while reading or writing."""


@dataclass(frozen=True)
class ClassifiedDataset:
    """Labeled series collection; split[i] is 'train'/'test' when the
    dataset came from a paired file, else None."""

    name: str
    series: tuple[TimeSeries, ...]
    labels: tuple[str, ...]
    split: tuple[str, ...] | None = None

    def __post_init__(self):
        if len(self.series) != len(self.labels):
            raise ValueError("series and labels differ in length")
        if len(self.series) < 1:
            raise EmptyInput("dataset has no series")
        if self.split is not None and len(self.split) != len(self.series):
            raise ValueError("split flags differ in length")

    def __len__(self) -> int:
        return len(self.series)

    def subset(self, split: str) -> "ClassifiedDataset":
        if self.split is None:
            raise ValueError("dataset has no split flags")
        keep = [i for i, s in enumerate(self.split) if s == split]
        if not keep:
            raise EmptyInput(f"no series in split {split!r}")
        return ClassifiedDataset(
            name=f"{self.name}_{split.upper()}",
            series=tuple(self.series[i] for i in keep),
            labels=tuple(self.labels[i] for i in keep),
            split=None,
        )


def _detect_delimiter(line: str) -> str:
    return "\t" if "\t" in line else ","


def _parse_lines(text: str) -> tuple[list[TimeSeries], list[str]]:
    series: list[TimeSeries] = []
    labels: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split(_detect_delimiter(line))
        tokens = [t for t in (tok.strip() for tok in tokens) if t != ""]
        if len(tokens) < 2:
            raise MalformedLine(lineno, "need a label and at least one sample")
        label = tokens[0]
        try:
            values = [float(t) for t in tokens[1:]]
        except ValueError as e:
            raise MalformedLine(lineno, f"non-numeric sample token ({e})") from None
        try:
            ts = validate_series(values)
        except NonFiniteSample as e:
            raise MalformedLine(lineno, str(e)) from None
        series.append(ts)
        labels.append(label)
    return series, labels


def _read_text(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e


def load_ucr_tsv(path) -> ClassifiedDataset:
    """Load a delimited dataset; a _TRAIN/_TEST sibling is merged
    automatically with split flags."""
    p = Path(path)
    stem = p.stem
    counterpart = None
    if "_TRAIN" in stem:
        counterpart = p.with_name(p.name.replace("_TRAIN", "_TEST"))
        first_split, second_split = "train", "test"
        base = stem.replace("_TRAIN", "")
    elif "_TEST" in stem:
        counterpart = p.with_name(p.name.replace("_TEST", "_TRAIN"))
        first_split, second_split = "test", "train"
        base = stem.replace("_TEST", "")
    else:
        base = stem

    series, labels = _parse_lines(_read_text(p))
    if not series:
        raise EmptyFile(f"{p} has no data lines")
    if counterpart is not None and counterpart.exists():
        s2, l2 = _parse_lines(_read_text(counterpart))
        if not s2:
            raise EmptyFile(f"{counterpart} has no data lines")
        split = [first_split] * len(series) + [second_split] * len(s2)
        series += s2
        labels += l2
        return ClassifiedDataset(
            name=base,
            series=tuple(series),
            labels=tuple(labels),
            split=tuple(split),
        )
    return ClassifiedDataset(
        name=stem, series=tuple(series), labels=tuple(labels), split=None
    )


_DATA_SUFFIXES = (".tsv", ".csv", ".txt")


def find_dataset_pairs(directory) -> list[Path]:
    """Data files under a directory, one entry per dataset: _TEST files
    whose _TRAIN sibling exists are dropped (the pair loads as one)."""
    d = Path(directory)
    if not d.is_dir():
        raise IoFailure(f"{d} is not a directory")
    out = []
    for p in sorted(d.iterdir()):
        if not p.is_file() or p.suffix.lower() not in _DATA_SUFFIXES:
            continue
        if "_TEST" in p.stem:
            train = p.with_name(p.name.replace("_TEST", "_TRAIN"))
            if train.exists():
                continue
        out.append(p)
    return out


def _fmt(value: float) -> str:
    return repr(float(value))


def write_feature_table(vectors, path, fmt: str = "csv", ids=None) -> None:
    """Write feature vectors as CSV or JSON.

    CSV: header of the 22 names plus a trailing `special` column; marker
    entries are empty cells and are listed in `special` as
    name=MarkerValue pairs joined by ';'. Floats use shortest repr, so
    a read-back is bit-identical. JSON: array of named records.
    """
    vectors = list(vectors)
    if ids is None:
        ids = [str(i) for i in range(len(vectors))]
    ids = [str(i) for i in ids]
    if len(ids) != len(vectors):
        raise ValueError("ids and vectors differ in length")
    p = Path(path)
    if fmt == "csv":
        lines = ["series_id," + ",".join(CANONICAL_FEATURE_NAMES) + ",special"]
        for sid, vec in zip(ids, vectors):
            markers = vec.markers()
            cells = [sid]
            for k, name in enumerate(CANONICAL_FEATURE_NAMES):
                cells.append("" if name in markers else _fmt(vec.values[k]))
            special = ";".join(f"{n}={m.value}" for n, m in sorted(markers.items()))
            cells.append(special)
            lines.append(",".join(cells))
        payload = "\n".join(lines) + "\n"
    elif fmt == "json":
        records = []
        for sid, vec in zip(ids, vectors):
            markers = vec.markers()
            features = {
                name: (None if name in markers else float(vec.values[k]))
                for k, name in enumerate(CANONICAL_FEATURE_NAMES)
            }
            records.append(
                {
                    "id": sid,
                    "features": features,
                    "special": {n: m.value for n, m in sorted(markers.items())},
                }
            )
        payload = json.dumps(records, sort_keys=True) + "\n"
    else:
        raise ValueError("fmt must be 'csv' or 'json'")
    try:
        p.write_text(payload)
    except OSError as e:
        raise IoFailure(f"cannot write {p}: {e}") from e


def _vector_from_parts(values_by_name, markers_by_name) -> FeatureVector:
    values = np.full(22, np.nan)
    flags = np.zeros(22, dtype=np.int8)
    for k, name in enumerate(CANONICAL_FEATURE_NAMES):
        if name in markers_by_name:
            flags[k] = (
                1 if markers_by_name[name] == Marker.NOT_COMPUTABLE.value else 2
            )
        else:
            values[k] = values_by_name[name]
    return FeatureVector(values, flags)


def read_feature_table(path, fmt: str | None = None):
    """Read a feature table back; returns (ids, vectors)."""
    p = Path(path)
    if fmt is None:
        fmt = "json" if p.suffix.lower() == ".json" else "csv"
    text = _read_text(p)
    ids: list[str] = []
    vectors: list[FeatureVector] = []
    if fmt == "csv":
        lines = [l for l in text.splitlines() if l.strip()]
        if not lines:
            raise EmptyFile(f"{p} is empty")
        header = lines[0].split(",")
        expected = ["series_id", *CANONICAL_FEATURE_NAMES, "special"]
        if header != expected:
            raise MalformedLine(1, "unexpected feature-table header")
        for lineno, line in enumerate(lines[1:], start=2):
            cells = line.split(",")
            if len(cells) != len(expected):
                raise MalformedLine(lineno, f"expected {len(expected)} cells")
            sid = cells[0]
            special = {}
            if cells[-1]:
                for pair in cells[-1].split(";"):
                    name, _, marker = pair.partition("=")
                    special[name] = marker
            values = {}
            for k, name in enumerate(CANONICAL_FEATURE_NAMES):
                cell = cells[1 + k]
                if cell == "":
                    if name not in special:
                        raise MalformedLine(
                            lineno, f"empty cell for {name} without a marker"
                        )
                    continue
                try:
                    values[name] = float(cell)
                except ValueError:
                    raise MalformedLine(lineno, f"bad float {cell!r}") from None
            ids.append(sid)
            vectors.append(_vector_from_parts(values, special))
    elif fmt == "json":
        try:
            records = json.loads(text)
        except json.JSONDecodeError as e:
            raise MalformedLine(e.lineno, f"invalid JSON: {e.msg}") from None
        for rec in records:
            ids.append(str(rec["id"]))
            features = {k: v for k, v in rec["features"].items() if v is not None}
            vectors.append(_vector_from_parts(features, rec.get("special", {})))
    else:
        raise ValueError("fmt must be 'csv' or 'json'")
    return ids, vectors
