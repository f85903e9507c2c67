"""Minimum subsequence distance between a shapelet and whole series."""

from __future__ import annotations

import math
import threading
from collections import OrderedDict

import numpy as np
import scipy.fft

from ..core import TimeSeries
from ..errors import ShapeletLongerThanSeries
from . import _kernels as K

# Below this shapelet length the direct scan beats an FFT correlation.
DIRECT_MAX_LENGTH = 24


class SeriesCollection:
    """Series prepared once for repeated distance queries.

    Holds the centred copy of every series, lazily computed rolling window
    statistics per shapelet length and, in normalised mode, the real FFT of
    every series grouped by series length.

    Parameters
    ----------
    series : sequence of TimeSeries or 1-D arrays
    normalize : bool
        Z-normalise every compared window (the default pipeline setting).
    stats_cache : int
        Number of shapelet lengths whose window statistics are kept.
    """

    def __init__(self, series, normalize=True, stats_cache=4):
        self.normalize = bool(normalize)
        self.raw = []
        for s in series:
            arr = s.samples if isinstance(s, TimeSeries) else np.asarray(s, np.float64)
            self.raw.append(np.ascontiguousarray(arr, dtype=np.float64))
        self.lengths = np.array([x.shape[0] for x in self.raw], dtype=np.int64)
        self.centred = []
        self.norms = []
        for x in self.raw:
            xc, _ = K.centre(x)
            self.centred.append(xc)
            self.norms.append(float(np.sqrt(np.dot(xc, xc))))
        self._stats = OrderedDict()
        self._stats_cache = stats_cache
        self._spectra = None
        self._lock = threading.RLock()

    def __len__(self):
        return len(self.raw)

    def stats(self, length):
        """Per-series ``(mean_c, inv_std, s2_total)`` for windows of *length*."""
        with self._lock:
            hit = self._stats.get(length)
            if hit is not None:
                self._stats.move_to_end(length)
                return hit
            return self._compute_stats(length)

    def _compute_stats(self, length):
        out = [
            K.window_stats(x, xc, length) if x.shape[0] >= length else None
            for x, xc in zip(self.raw, self.centred)
        ]
        self._stats[length] = out
        while len(self._stats) > self._stats_cache:
            self._stats.popitem(last=False)
        return out

    def _spectrum_groups(self):
        with self._lock:
            return self._spectra_locked()

    def _spectra_locked(self):
        if self._spectra is None:
            groups = {}
            for i, m in enumerate(self.lengths):
                groups.setdefault(int(m), []).append(i)
            self._spectra = {
                m: (np.array(idx), scipy.fft.rfft(np.stack([self.centred[i] for i in idx]), axis=1))
                for m, idx in groups.items()
            }
        return self._spectra

    def extract(self, index, start, length):
        """Z-normalised window of series *index*, as the distance kernel sees it."""
        if not self.normalize:
            return self.raw[index][start:start + length].copy()
        mean_c, inv_std, _ = self.stats(length)[index]
        return K.extract(self.centred[index], mean_c, inv_std, start, length)

    def check_length(self, length, indices=None):
        idx = range(len(self)) if indices is None else indices
        for i in idx:
            if self.lengths[i] < length:
                raise ShapeletLongerThanSeries(
                    f"shapelet of length {length} exceeds series {i} "
                    f"of length {int(self.lengths[i])}"
                )

    def min_distances(self, q, early_abandon=True, method="auto", indices=None):
        """Minimum squared distance from *q* to every series (or *indices*).

        ``method`` is ``"direct"`` (scan every window), ``"fft"`` (correlation
        estimates plus exact refinement) or ``"auto"``. All three return the
        same values.
        """
        q = np.ascontiguousarray(q, dtype=np.float64)
        length = q.shape[0]
        idx = np.arange(len(self)) if indices is None else np.asarray(indices)
        self.check_length(length, idx)
        out = np.empty(idx.shape[0])
        if not self.normalize:
            for j, i in enumerate(idx):
                out[j] = K.min_distance_raw(q, self.raw[i], early_abandon)
            return out
        stats = self.stats(length)
        if method == "auto":
            method = "direct" if length <= DIRECT_MAX_LENGTH else "fft"
        if method == "direct":
            for j, i in enumerate(idx):
                mean_c, inv_std, _ = stats[i]
                out[j] = K.min_distance_direct(q, self.centred[i], mean_c, inv_std, early_abandon)
            return out
        if method != "fft":
            raise ValueError(f"unknown method {method!r}")
        qq, sq = K.sums(q)
        q_norm = math.sqrt(qq)
        position = {int(i): j for j, i in enumerate(idx)}
        for m, (members, spectra) in self._spectrum_groups().items():
            wanted = [k for k, i in enumerate(members) if int(i) in position]
            if not wanted:
                continue
            rows = spectra if len(wanted) == len(members) else spectra[wanted]
            qf = np.conj(scipy.fft.rfft(q, m))
            dots = scipy.fft.irfft(rows * qf, m, axis=1)
            log_m = math.log2(max(m, 2))
            for r, k in enumerate(wanted):
                i = int(members[k])
                mean_c, inv_std, s2_total = stats[i]
                dot_err = log_m * q_norm * self.norms[i]
                out[position[i]] = K.min_distance_refine(
                    q, self.centred[i], mean_c, inv_std,
                    np.ascontiguousarray(dots[r, : m - length + 1]),
                    qq, sq, dot_err, s2_total,
                )
        return out


def subsequence_distance(
    shapelet_values,
    series,
    normalize=True,
    length_normalized=False,
    early_abandon=True,
    method="auto",
) -> float:
    """Minimum squared Euclidean distance between a shapelet and any window.

    The shapelet is expected to be z-normalised already; every window of
    *series* is z-normalised before comparison unless ``normalize`` is off.

    Raises
    ------
    ShapeletLongerThanSeries
    """
    coll = SeriesCollection([series], normalize=normalize)
    d = float(coll.min_distances(shapelet_values, early_abandon, method)[0])
    if length_normalized:
        d /= len(shapelet_values)
    return d
