"""Shapelet transform: map series into shapelet-distance feature space."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from .core import LabeledDataset, Shapelet, TransformMatrix, validate_dataset
from .discovery.distance import SeriesCollection
from .errors import EmptyShapeletSet, ShapeletLongerThanSeries


def shapelet_transform(
    dataset: LabeledDataset,
    shapelets: Sequence[Shapelet],
    normalize=True,
    length_normalized=False,
    workers=1,
) -> TransformMatrix:
    """Distance matrix ``G[i, j] = subsequence_distance(shapelet_j, series_i)``.

    Uses the same distance kernel and flags as discovery, so transforming the
    training set reproduces the distances that were scored during search.
    Columns follow the order of *shapelets*.

    Raises
    ------
    EmptyShapeletSet
    ShapeletLongerThanSeries
        Naming the first offending (shapelet, series) pair.
    """
    validate_dataset(dataset)
    shapelets = list(shapelets)
    if not shapelets:
        raise EmptyShapeletSet("no shapelets to transform with")
    lengths = [len(ts) for ts in dataset.series]
    shortest = int(np.argmin(lengths))
    for j, sh in enumerate(shapelets):
        if sh.length > lengths[shortest]:
            raise ShapeletLongerThanSeries(
                f"shapelet {j} ({sh.identifier}, length {sh.length}) is longer than "
                f"series {shortest} (length {lengths[shortest]})"
            )

    coll = SeriesCollection(dataset.series, normalize=normalize, stats_cache=2)
    out = np.empty((len(dataset), len(shapelets)))

    def column(j):
        d = coll.min_distances(shapelets[j].values)
        if length_normalized:
            d = d / shapelets[j].length
        out[:, j] = d

    # visit columns grouped by length so window statistics are reused
    order = sorted(range(len(shapelets)), key=lambda j: shapelets[j].length)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(column, order))
    else:
        for j in order:
            column(j)
    return TransformMatrix(
        values=out,
        labels=dataset.labels,
        feature_ids=tuple(sh.identifier for sh in shapelets),
    )
