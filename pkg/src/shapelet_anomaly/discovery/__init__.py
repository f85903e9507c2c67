"""Shapelet search: candidates, distances, orderlines and information gain."""

from .distance import SeriesCollection, subsequence_distance
from .quality import Orderline, best_info_gain, build_orderline, entropy
from .search import (
    DiscoveryConfig,
    DiscoveryStats,
    candidate_count,
    candidate_lengths,
    desk_scale_config,
    discover_shapelets,
    discover_with_stats,
    generate_candidates,
)

__all__ = [
    "DiscoveryConfig",
    "DiscoveryStats",
    "Orderline",
    "SeriesCollection",
    "best_info_gain",
    "build_orderline",
    "candidate_count",
    "candidate_lengths",
    "desk_scale_config",
    "discover_shapelets",
    "discover_with_stats",
    "entropy",
    "generate_candidates",
    "subsequence_distance",
]
