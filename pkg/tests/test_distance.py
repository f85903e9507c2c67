import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_distance, znorm
from shapelet_anomaly.core import TimeSeries
from shapelet_anomaly.discovery import SeriesCollection, subsequence_distance
from shapelet_anomaly.discovery.distance import DIRECT_MAX_LENGTH
from shapelet_anomaly.errors import ShapeletLongerThanSeries


def close(a, b):
    return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12)


def test_self_match_is_exact_zero():
    x = np.random.default_rng(1).standard_normal(80)
    coll = SeriesCollection([x])
    for length in (3, 10, 30, 80):
        q = coll.extract(0, 80 - length, length)
        for method in ("direct", "fft"):
            assert coll.min_distances(q, method=method)[0] == 0.0


def test_scaled_offset_copy_matches_exactly():
    rng = np.random.default_rng(2)
    x = rng.standard_normal(50)
    q = znorm(x[10:20])
    assert subsequence_distance(q, TimeSeries(3.0 * x + 7.0)) < 1e-20


def test_raw_mode_hand_example():
    assert subsequence_distance([1, 2, 3], TimeSeries([5, 1, 2, 3, 9]), normalize=False) == 0.0
    assert subsequence_distance([1, 2, 3], TimeSeries([5, 1, 2, 4, 9]), normalize=False) == 1.0


def test_longer_shapelet_rejected():
    with pytest.raises(ShapeletLongerThanSeries):
        subsequence_distance(np.zeros(6), TimeSeries(np.arange(5.0)))


def test_length_normalized_divides():
    x = TimeSeries(np.random.default_rng(3).standard_normal(40))
    q = znorm(np.arange(5.0) ** 2)
    assert close(subsequence_distance(q, x, length_normalized=True), subsequence_distance(q, x) / 5)


def test_constant_series_against_zero_shapelet():
    x = TimeSeries(np.zeros(30))
    assert subsequence_distance(np.zeros(4), x) == 0.0
    q = znorm([0, 1, 0, 1])
    assert close(subsequence_distance(q, x), 4.0)


def test_constant_stretch_inside_signal():
    x = np.concatenate([np.arange(10.0), np.full(10, 3.0), np.arange(10.0)[::-1]])
    assert subsequence_distance(np.zeros(5), TimeSeries(x)) == 0.0
    q = znorm(np.arange(5.0))
    for method in ("direct", "fft"):
        assert close(subsequence_distance(q, TimeSeries(x), method=method), brute_distance(q, x))


@given(st.integers(0, 2**32 - 1), st.integers(3, 50), st.integers(0, 40))
def test_matches_brute_force(seed, length, extra):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(length + extra)
    q = znorm(rng.standard_normal(length))
    expected = brute_distance(q, x)
    for method in ("direct", "fft"):
        assert close(subsequence_distance(q, TimeSeries(x), method=method), expected)


@given(st.integers(0, 2**32 - 1), st.integers(3, 30), st.integers(0, 40))
def test_raw_matches_brute_force(seed, length, extra):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(length + extra)
    q = rng.standard_normal(length)
    assert close(subsequence_distance(q, TimeSeries(x), normalize=False), brute_distance(q, x, normalize=False))


@given(st.integers(0, 2**32 - 1), st.integers(3, 30), st.booleans())
@settings(max_examples=200)
def test_early_abandon_never_changes_result(seed, length, normalize):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(length + int(rng.integers(0, 60)))
    q = rng.standard_normal(length)
    if normalize:
        q = znorm(q)
    on = subsequence_distance(q, TimeSeries(x), normalize=normalize, early_abandon=True, method="direct")
    off = subsequence_distance(q, TimeSeries(x), normalize=normalize, early_abandon=False, method="direct")
    assert on == off


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fft_and_direct_are_bit_identical(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(60, 400))
    kinds = [rng.standard_normal(m), np.cumsum(rng.standard_normal(m)), np.abs(rng.standard_normal(m)) * 1e3 + 5]
    x = kinds[int(rng.integers(0, 3))]
    x[int(rng.integers(0, m // 2)):][:20] = 0.0  # a flat stretch
    coll = SeriesCollection([x, x[::-1].copy(), rng.standard_normal(m)])
    length = int(rng.integers(DIRECT_MAX_LENGTH + 1, m))
    q = coll.extract(2, int(rng.integers(0, m - length + 1)), length)
    assert np.array_equal(coll.min_distances(q, method="direct"), coll.min_distances(q, method="fft"))


def test_collection_variable_lengths_and_indices():
    rng = np.random.default_rng(5)
    series = [rng.standard_normal(m) for m in (40, 55, 40, 70)]
    coll = SeriesCollection(series)
    q = znorm(rng.standard_normal(30))
    full = coll.min_distances(q, method="fft")
    for i, x in enumerate(series):
        assert close(full[i], brute_distance(q, x))
    part = coll.min_distances(q, method="fft", indices=[3, 1])
    assert part.tolist() == [full[3], full[1]]


def test_distance_non_negative_on_flat_data():
    coll = SeriesCollection([np.full(50, 1e8) + np.arange(50) * 1e-9])
    d = coll.min_distances(znorm(np.arange(10.0)))
    assert d[0] >= 0
