"""Candidate enumeration and the single-pass shapelet search."""

from __future__ import annotations

import logging
import time
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterator

import numpy as np

from ..core import MIN_SERIES_LENGTH, ClassLabel, LabeledDataset, Shapelet, TimeSeries, validate_dataset
from ..errors import InvalidArgs, MinLenExceedsSeries, NoShapeletsFound
from .distance import SeriesCollection
from .quality import Orderline, best_info_gain

logger = logging.getLogger(__name__)

# More than this fraction of the shorter window shared => self-similar.
SELF_SIMILAR_OVERLAP = 0.5


@dataclass(frozen=True)
class DiscoveryConfig:
    """Search parameters. ``None`` fields are resolved against the dataset.

    ``max_len`` defaults to the series length, ``max_shapelets`` to ten times
    the number of series and ``per_class_cap`` to ``max_shapelets // numC``.
    ``ig_threshold`` may exceed 1, which simply makes every candidate fail.
    ``time_budget_s`` stops the pass early; a run cut short this way is not
    reproducible.
    """

    min_len: int = 3
    max_len: int | None = None
    ig_threshold: float = 0.05
    max_shapelets: int | None = None
    per_class_cap: int | None = None
    len_stride: int = 1
    pos_stride: int = 1
    candidate_sample_fraction: float = 1.0
    rng_seed: int = 0
    exclude_source: bool = False
    normalize: bool = True
    length_normalized: bool = False
    prune_self_similar: bool = True
    time_budget_s: float | None = None
    workers: int = 1

    def __post_init__(self):
        if self.min_len < MIN_SERIES_LENGTH:
            raise InvalidArgs(f"min_len must be >= {MIN_SERIES_LENGTH}")
        if self.max_len is not None and self.max_len < self.min_len:
            raise InvalidArgs("max_len must be >= min_len")
        if not self.ig_threshold >= 0:
            raise InvalidArgs("ig_threshold must be >= 0")
        if self.len_stride < 1 or self.pos_stride < 1:
            raise InvalidArgs("strides must be >= 1")
        if not 0 < self.candidate_sample_fraction <= 1:
            raise InvalidArgs("candidate_sample_fraction must be in (0, 1]")
        if self.max_shapelets is not None and self.max_shapelets < 1:
            raise InvalidArgs("max_shapelets must be >= 1")
        if self.per_class_cap is not None and self.per_class_cap < 1:
            raise InvalidArgs("per_class_cap must be >= 1")
        if self.workers < 1:
            raise InvalidArgs("workers must be >= 1")
        if self.time_budget_s is not None and not self.time_budget_s > 0:
            raise InvalidArgs("time_budget_s must be positive")

    def max_shapelets_for(self, dataset: LabeledDataset) -> int:
        return self.max_shapelets if self.max_shapelets is not None else 10 * len(dataset)

    def per_class_cap_for(self, dataset: LabeledDataset) -> int:
        if self.per_class_cap is not None:
            return self.per_class_cap
        return max(1, self.max_shapelets_for(dataset) // dataset.class_count)

    def resolved(self, dataset: LabeledDataset) -> dict:
        """All fields with dataset-dependent defaults filled in."""
        out = asdict(self)
        out["max_len"] = self.max_len if self.max_len is not None else max(len(s) for s in dataset.series)
        out["max_shapelets"] = self.max_shapelets_for(dataset)
        out["per_class_cap"] = self.per_class_cap_for(dataset)
        return out


def candidate_lengths(series_length: int, cfg: DiscoveryConfig, limit: int | None = None) -> range:
    """Candidate lengths for one series; *limit* caps them further."""
    if cfg.min_len > series_length:
        raise MinLenExceedsSeries(
            f"min_len {cfg.min_len} exceeds series length {series_length}"
        )
    top = series_length if cfg.max_len is None else min(cfg.max_len, series_length)
    if limit is not None:
        top = min(top, limit)
    return range(cfg.min_len, top + 1, cfg.len_stride)


def candidate_count(series_lengths, cfg: DiscoveryConfig) -> int:
    """Number of windows the strides allow before random sampling."""
    limit = min(series_lengths)
    total = 0
    for m in series_lengths:
        for length in candidate_lengths(m, cfg, limit):
            total += -(-(m - length + 1) // cfg.pos_stride)
    return total


# Desk-scale search: about this many lengths and starts per length per series.
DESK_LENGTHS = 9
DESK_STARTS = 36
DESK_CANDIDATE_BUDGET = 8000


def desk_scale_config(series_lengths, budget: int = DESK_CANDIDATE_BUDGET, **overrides) -> DiscoveryConfig:
    """Strides and sampling scaled to the series length.

    Roughly ``DESK_LENGTHS`` lengths and ``DESK_STARTS`` starts per length
    are enumerated per series and then sampled down to about *budget*
    candidates overall. Short series get unit strides and no sampling.
    Explicit *overrides* win over the derived values.
    """
    m = min(series_lengths)
    base = {
        "len_stride": max(1, m // DESK_LENGTHS),
        "pos_stride": max(1, m // DESK_STARTS),
    }
    base.update({k: v for k, v in overrides.items() if v is not None and k != "candidate_sample_fraction"})
    cfg = DiscoveryConfig(**base)
    fraction = overrides.get("candidate_sample_fraction")
    if fraction is None:
        count = candidate_count(series_lengths, cfg)
        fraction = 1.0 if count <= budget else round(budget / count, 6)
    return DiscoveryConfig(**{**base, "candidate_sample_fraction": fraction})


def _candidate_plan(series_length: int, cfg: DiscoveryConfig, series_index: int, limit=None):
    """Yield ``(length, starts)`` per candidate length for one series."""
    rng = None
    if cfg.candidate_sample_fraction < 1.0:
        rng = np.random.default_rng([cfg.rng_seed, series_index])
    for length in candidate_lengths(series_length, cfg, limit):
        starts = np.arange(0, series_length - length + 1, cfg.pos_stride)
        if rng is not None:
            starts = starts[rng.random(starts.shape[0]) < cfg.candidate_sample_fraction]
        if starts.size:
            yield length, starts


def generate_candidates(
    series: TimeSeries, cfg: DiscoveryConfig, series_index: int = 0
) -> Iterator[tuple[int, int]]:
    """Stream ``(start, length)`` windows, lengths ascending then starts ascending.

    The sampled subset depends only on ``cfg.rng_seed`` and *series_index*.
    """
    for length, starts in _candidate_plan(len(series), cfg, series_index):
        for s in starts:
            yield int(s), length


@dataclass
class DiscoveryStats:
    candidates: int = 0
    passed_threshold: int = 0
    after_pruning: int = 0
    retained: int = 0
    per_class: dict = field(default_factory=dict)
    elapsed_s: float = 0.0
    budget_exhausted: bool = False


def _overlap(a_start, a_len, b_start, b_len) -> float:
    inter = min(a_start + a_len, b_start + b_len) - max(a_start, b_start)
    return max(inter, 0) / min(a_len, b_len)


def _prune_self_similar(records):
    """Greedy keep-best among overlapping windows of one source series."""
    kept = []
    for rec in sorted(records, key=lambda r: (-r[0], r[4], r[3])):
        if all(_overlap(rec[3], rec[4], k[3], k[4]) <= SELF_SIMILAR_OVERLAP for k in kept):
            kept.append(rec)
    return kept


class _Scorer:
    def __init__(self, coll: SeriesCollection, labels: np.ndarray, cfg: DiscoveryConfig):
        self.coll = coll
        self.labels = labels
        self.cfg = cfg

    def orderline(self, dist, source):
        if self.cfg.exclude_source:
            mask = np.ones(dist.shape[0], dtype=bool)
            mask[source] = False
            return Orderline.from_unsorted(dist[mask], self.labels[mask])
        return Orderline.from_unsorted(dist, self.labels)

    def score(self, length, tasks, stats, flat_dist, deadline):
        """Return ``(records, evaluated, out_of_time)`` for one task slice."""
        out = []
        done = 0
        coll, cfg = self.coll, self.cfg
        for i, start in tasks:
            if deadline is not None and time.monotonic() > deadline:
                return out, done, True
            if stats is not None and stats[i][1][start] == 0.0:
                dist = flat_dist
            else:
                q = coll.extract(i, start, length)
                dist = coll.min_distances(q)
                if cfg.length_normalized:
                    dist = dist / length
            ig, thr = best_info_gain(self.orderline(dist, i))
            done += 1
            if ig >= cfg.ig_threshold:
                out.append((ig, thr, i, start, length))
        return out, done, False


def discover_with_stats(dataset: LabeledDataset, cfg: DiscoveryConfig):
    """Like :func:`discover_shapelets` but also returns :class:`DiscoveryStats`."""
    validate_dataset(dataset)
    t0 = time.monotonic()
    deadline = t0 + cfg.time_budget_s if cfg.time_budget_s else None
    n = len(dataset)
    labels = np.array([int(lab) for lab in dataset.labels], dtype=np.int64)
    r = cfg.max_shapelets_for(dataset)
    cap = cfg.per_class_cap_for(dataset)
    coll = SeriesCollection(dataset.series, normalize=cfg.normalize, stats_cache=2)
    scorer = _Scorer(coll, labels, cfg)

    # candidates must fit every series they are compared against
    shortest = min(len(ts) for ts in dataset.series)
    plan = defaultdict(list)
    for i, ts in enumerate(dataset.series):
        for length, starts in _candidate_plan(len(ts), cfg, i, limit=shortest):
            plan[length].extend((i, int(s)) for s in starts)

    stats = DiscoveryStats()
    records = []
    pool = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        for length in sorted(plan):
            tasks = plan[length]
            flat_dist = None
            wstats = None
            if cfg.normalize:
                wstats = coll.stats(length)
                if any(wstats[i][1][s] == 0.0 for i, s in tasks):
                    # every constant window z-normalises to the same zero shapelet
                    flat_dist = coll.min_distances(np.zeros(length))
                    if cfg.length_normalized:
                        flat_dist = flat_dist / length
            if pool is None:
                chunks = [scorer.score(length, tasks, wstats, flat_dist, deadline)]
            else:
                step = -(-len(tasks) // cfg.workers)
                parts = [tasks[k:k + step] for k in range(0, len(tasks), step)]
                chunks = list(pool.map(lambda p: scorer.score(length, p, wstats, flat_dist, deadline), parts))
            for recs, done, timed_out in chunks:
                records.extend(recs)
                stats.candidates += done
                stats.budget_exhausted |= timed_out
            if stats.budget_exhausted:
                logger.warning("time budget exhausted after %d candidates", stats.candidates)
                break
    finally:
        if pool is not None:
            pool.shutdown()

    stats.passed_threshold = len(records)
    by_source = defaultdict(list)
    for rec in records:
        by_source[rec[2]].append(rec)
    survivors = []
    for src in sorted(by_source):
        group = by_source[src]
        survivors.extend(_prune_self_similar(group) if cfg.prune_self_similar else group)
    stats.after_pruning = len(survivors)

    def key(rec):
        return (-rec[0], rec[4], rec[2], rec[3])

    per_class = defaultdict(list)
    for rec in survivors:
        per_class[labels[rec[2]]].append(rec)
    selected = []
    for c in sorted(per_class):
        selected.extend(sorted(per_class[c], key=key)[:cap])
    selected = sorted(selected, key=key)[:r]
    if not selected:
        raise NoShapeletsFound(
            f"no candidate reached information gain {cfg.ig_threshold} "
            f"({stats.candidates} candidates evaluated)"
        )

    shapelets = [
        Shapelet(
            values=coll.extract(src, start, length),
            source_series_index=src,
            start_offset=start,
            info_gain=ig,
            split_threshold=thr,
            class_hint=ClassLabel(int(labels[src])),
        )
        for ig, thr, src, start, length in selected
    ]
    stats.retained = len(shapelets)
    stats.per_class = {
        ClassLabel(c).label_name: k for c, k in sorted(Counter(int(labels[s[2]]) for s in selected).items())
    }
    stats.elapsed_s = time.monotonic() - t0
    logger.info(
        "discovery: %d series, %d candidates, %d above threshold, %d after pruning, %d kept %s",
        n, stats.candidates, stats.passed_threshold, stats.after_pruning,
        stats.retained, stats.per_class,
    )
    return shapelets, stats


def discover_shapelets(dataset: LabeledDataset, cfg: DiscoveryConfig | None = None) -> list[Shapelet]:
    """Find the best discriminative shapelets of *dataset*.

    One pass scores every candidate window by the information gain of its
    orderline. Candidates below ``cfg.ig_threshold`` are dropped, overlapping
    candidates from the same series are reduced to the best one, and at most
    ``per_class_cap`` shapelets per source class and ``max_shapelets`` overall
    are kept. The result is sorted by (gain desc, length, source, start).

    Raises
    ------
    NoShapeletsFound
        If no candidate reaches the threshold.
    """
    return discover_with_stats(dataset, cfg or DiscoveryConfig())[0]
