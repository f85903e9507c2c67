"""Slow, obviously-correct reference implementations used as test oracles."""

import math
from collections import Counter

import numpy as np


def znorm(w):
    w = np.asarray(w, dtype=np.float64)
    sd = w.std()
    if sd < 1e-12:
        return np.zeros_like(w)
    return (w - w.mean()) / sd


def brute_distance(q, x, normalize=True):
    """Minimum squared Euclidean distance over every alignment."""
    q = np.asarray(q, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    l = q.shape[0]
    best = math.inf
    for s in range(x.shape[0] - l + 1):
        w = x[s:s + l]
        if normalize:
            w = znorm(w)
        best = min(best, float(np.sum((q - w) ** 2)))
    return best


def brute_entropy(labels):
    n = len(labels)
    return -sum((c / n) * math.log2(c / n) for c in Counter(labels).values())


def brute_best_ig(distances, labels):
    """Scan every midpoint between distinct sorted distances."""
    pairs = sorted(zip(distances, labels), key=lambda p: p[0])
    d = [p[0] for p in pairs]
    y = [p[1] for p in pairs]
    h = brute_entropy(y)
    best = 0.0
    thr = None
    for k in range(1, len(d)):
        if d[k] == d[k - 1]:
            continue
        t = 0.5 * (d[k - 1] + d[k])
        ig = ig_at(distances, labels, t, h)
        if ig > best:
            best, thr = ig, t
    return best, thr


def ig_at(distances, labels, thr, h=None):
    left = [y for d, y in zip(distances, labels) if d <= thr]
    right = [y for d, y in zip(distances, labels) if d > thr]
    n = len(labels)
    h = brute_entropy(labels) if h is None else h
    out = h
    for part in (left, right):
        if part:
            out -= len(part) / n * brute_entropy(part)
    return out


def bump_dataset(seed=0, n_per_class=10, length=60):
    """Class 1: zeros plus a triangle 0..5..0 at a random place; class 2: zeros."""
    rng = np.random.default_rng(seed)
    tri = np.concatenate([np.arange(6.0), np.arange(4.0, -1.0, -1.0)])  # 11 samples
    series, labels, bumps = [], [], []
    for _ in range(n_per_class):
        x = np.zeros(length)
        s = int(rng.integers(0, length - tri.shape[0] + 1))
        x[s:s + tri.shape[0]] = tri
        series.append(x)
        labels.append(1)
        bumps.append((s, tri.shape[0]))
    for _ in range(n_per_class):
        series.append(np.zeros(length))
        labels.append(2)
        bumps.append(None)
    return series, labels, bumps


def brute_distance_windows(q, x):
    """Vectorised all-alignments z-normalised distance (numpy only)."""
    from numpy.lib.stride_tricks import sliding_window_view

    w = sliding_window_view(np.asarray(x, dtype=np.float64), len(q))
    mu = w.mean(axis=1, keepdims=True)
    sd = w.std(axis=1, keepdims=True)
    z = np.where(sd < 1e-12, 0.0, (w - mu) / np.where(sd < 1e-12, 1.0, sd))
    return float(np.min(np.sum((np.asarray(q) - z) ** 2, axis=1)))
