"""Orderlines and information-gain scoring of shapelet candidates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..core import ClassLabel, LabeledDataset, Shapelet
from ..errors import EmptyPartition
from .distance import SeriesCollection


@dataclass(frozen=True, eq=False)
class Orderline:
    """(distance, label) pairs sorted ascending by distance, ties in input order."""

    distances: np.ndarray
    labels: np.ndarray

    @classmethod
    def from_unsorted(cls, distances, labels) -> "Orderline":
        d = np.asarray(distances, dtype=np.float64)
        lab = np.asarray([int(x) for x in labels], dtype=np.int64)
        if d.shape != lab.shape:
            raise ValueError("distances and labels must have equal length")
        order = np.argsort(d, kind="stable")
        return cls(d[order], lab[order])

    def __len__(self):
        return self.distances.shape[0]

    @property
    def entries(self):
        return [(float(d), ClassLabel(int(c))) for d, c in zip(self.distances, self.labels)]


def entropy(class_counts: Mapping) -> float:
    """Shannon entropy in bits of a class-count mapping; ``0 log 0 = 0``."""
    counts = np.array([c for c in class_counts.values()], dtype=np.float64)
    if counts.size == 0 or counts.sum() < 1:
        raise EmptyPartition("entropy of an empty partition is undefined")
    if np.any(counts < 0):
        raise ValueError("class counts must be non-negative")
    return float(_entropy_rows(counts[None, :])[0])


def _entropy_rows(counts: np.ndarray) -> np.ndarray:
    totals = counts.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = counts / totals
        terms = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return 0.0 - terms.sum(axis=1)


def best_info_gain(orderline: Orderline) -> tuple[float, float]:
    """Best binary split of an orderline.

    Every midpoint between consecutive distinct distances is tried; series
    with distance below the threshold form one partition. Returns the largest
    gain and its threshold (the smallest threshold among equal gains).
    """
    d = orderline.distances
    n = d.shape[0]
    if n == 0:
        return 0.0, 0.0
    if n < 2:
        return 0.0, float(d[0])
    classes, codes = np.unique(orderline.labels, return_inverse=True)
    splits = np.flatnonzero(d[1:] > d[:-1])
    if classes.shape[0] < 2 or splits.size == 0:
        thr = 0.5 * (d[splits[0]] + d[splits[0] + 1]) if splits.size else float(d[0])
        return 0.0, float(thr)
    onehot = np.zeros((n, classes.shape[0]))
    onehot[np.arange(n), codes] = 1.0
    left = np.cumsum(onehot, axis=0)[splits]
    total = onehot.sum(axis=0)
    right = total[None, :] - left
    n_left = (splits + 1).astype(np.float64)
    h_total = _entropy_rows(total[None, :])[0]
    weighted = (n_left * _entropy_rows(left) + (n - n_left) * _entropy_rows(right)) / n
    gains = h_total - weighted
    best = int(np.argmax(gains))
    i = splits[best]
    ig = float(min(max(gains[best], 0.0), 1.0))
    return ig, float(0.5 * (d[i] + d[i + 1]))


def build_orderline(
    shapelet: Shapelet,
    dataset: LabeledDataset,
    exclude_source=False,
    normalize=True,
    length_normalized=False,
    collection: SeriesCollection | None = None,
) -> Orderline:
    """Distance from *shapelet* to every series of *dataset*, sorted.

    With ``exclude_source`` the shapelet's own source series is left out,
    giving ``n - 1`` entries.
    """
    coll = collection if collection is not None else SeriesCollection(dataset.series, normalize)
    idx = np.arange(len(dataset))
    if exclude_source:
        idx = idx[idx != shapelet.source_series_index]
    dist = coll.min_distances(shapelet.values, indices=idx)
    if length_normalized:
        dist = dist / shapelet.length
    labels = [dataset.labels[i] for i in idx]
    return Orderline.from_unsorted(dist, labels)
