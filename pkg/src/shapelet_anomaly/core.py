"""Domain types shared by every stage of the pipeline."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    EmptyDataset,
    MixedSampleRate,
    NonFiniteSample,
    SeriesTooShort,
)

MIN_SERIES_LENGTH = 3


class ClassLabel(enum.IntEnum):
    """The seven SHM data patterns; 1 is normal, 2-7 are anomalies."""

    NORMAL = 1
    MISSING = 2
    MINOR = 3
    OUTLIER = 4
    SQUARE = 5
    TREND = 6
    DRIFT = 7

    @property
    def label_name(self) -> str:
        return self.name.lower()

    @classmethod
    def from_name(cls, name: str) -> "ClassLabel":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown class name {name!r}") from None

    @classmethod
    def parse(cls, token) -> "ClassLabel":
        """Accept an id (``3``, ``"3"``) or a name (``"minor"``)."""
        if isinstance(token, ClassLabel):
            return token
        if isinstance(token, (int, np.integer)):
            return cls(int(token))
        token = str(token).strip()
        if token.lstrip("+-").isdigit():
            return cls(int(token))
        return cls.from_name(token)


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Uniformly sampled univariate series.

    Length is checked against the minimum meaningful length (3) by
    :func:`validate_dataset`, not here, so that short series can still be
    built and then rejected with a precise error.
    """

    samples: np.ndarray
    sample_rate_hz: float = 1.0

    def __post_init__(self):
        arr = _frozen_array(self.samples)
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise NonFiniteSample(f"non-finite sample at index {bad}")
        rate = float(self.sample_rate_hz)
        if not rate > 0:
            raise ValueError("sample_rate_hz must be positive")
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate_hz", rate)

    def __len__(self) -> int:
        return self.samples.shape[0]

    def with_samples(self, samples, sample_rate_hz=None) -> "TimeSeries":
        rate = self.sample_rate_hz if sample_rate_hz is None else sample_rate_hz
        return TimeSeries(samples, rate)


def validate_dataset(dataset: "LabeledDataset") -> "LabeledDataset":
    """Return *dataset* unchanged if every dataset invariant holds.

    Raises
    ------
    EmptyDataset, MixedSampleRate, SeriesTooShort, NonFiniteSample
    """
    entries = dataset.entries
    if len(entries) == 0:
        raise EmptyDataset("dataset has no entries")
    rates = {ts.sample_rate_hz for ts, _ in entries}
    if len(rates) > 1:
        raise MixedSampleRate(f"series use different sample rates: {sorted(rates)}")
    for i, (ts, _) in enumerate(entries):
        if len(ts) < MIN_SERIES_LENGTH:
            raise SeriesTooShort(
                f"series {i} has length {len(ts)} < {MIN_SERIES_LENGTH}"
            )
        if not np.all(np.isfinite(ts.samples)):
            raise NonFiniteSample(f"series {i} contains non-finite samples")
    return dataset


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Labelled learning set; validated on construction."""

    entries: tuple

    def __post_init__(self):
        entries = tuple((ts, ClassLabel.parse(lab)) for ts, lab in self.entries)
        object.__setattr__(self, "entries", entries)
        validate_dataset(self)

    @classmethod
    def from_arrays(cls, series: Sequence, labels: Sequence, sample_rate_hz=1.0):
        entries = [
            (s if isinstance(s, TimeSeries) else TimeSeries(s, sample_rate_hz), lab)
            for s, lab in zip(series, labels, strict=True)
        ]
        return cls(tuple(entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator:
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def series(self) -> tuple:
        return tuple(ts for ts, _ in self.entries)

    @property
    def labels(self) -> tuple:
        return tuple(lab for _, lab in self.entries)

    @property
    def classes(self) -> tuple:
        return tuple(sorted(set(self.labels)))

    @property
    def class_count(self) -> int:
        return len(set(self.labels))

    @property
    def sample_rate_hz(self) -> float:
        return self.entries[0][0].sample_rate_hz

    def subset(self, indices) -> "LabeledDataset":
        return LabeledDataset(tuple(self.entries[i] for i in indices))


@dataclass(frozen=True, eq=False)
class Shapelet:
    """A z-normalised subsequence with its provenance and quality."""

    values: np.ndarray
    source_series_index: int
    start_offset: int
    info_gain: float
    split_threshold: float
    class_hint: ClassLabel

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))
        object.__setattr__(self, "class_hint", ClassLabel.parse(self.class_hint))
        if self.values.shape[0] < MIN_SERIES_LENGTH:
            raise ValueError("shapelet length must be at least 3")

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def identifier(self) -> str:
        return f"s{self.source_series_index}_{self.start_offset}_{self.length}"

    def sort_key(self):
        """Deterministic ranking: higher gain, shorter, lower source, lower start."""
        return (-self.info_gain, self.length, self.source_series_index, self.start_offset)


@dataclass(frozen=True, eq=False)
class TransformMatrix:
    """Shapelet-distance features: one row per series, one column per shapelet."""

    values: np.ndarray
    labels: tuple
    feature_ids: tuple = field(default=())

    def __post_init__(self):
        vals = _frozen_array(self.values)
        if vals.ndim != 2:
            raise ValueError("transform values must be a 2-D matrix")
        labels = tuple(ClassLabel.parse(lab) for lab in self.labels)
        if len(labels) != vals.shape[0]:
            raise ValueError("one label per row is required")
        ids = tuple(self.feature_ids) or tuple(f"f{j}" for j in range(vals.shape[1]))
        if len(ids) != vals.shape[1]:
            raise ValueError("one feature id per column is required")
        if vals.size and (not np.all(np.isfinite(vals)) or vals.min() < 0):
            raise ValueError("transform entries must be finite and non-negative")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_ids", ids)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def label_array(self) -> np.ndarray:
        return np.array([int(lab) for lab in self.labels], dtype=np.int64)
