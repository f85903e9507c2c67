"""Envelope extraction, rate reduction and the remedial filters.

All functions are pure: they return new :class:`TimeSeries` objects (or arrays
for :func:`z_normalize`) and never modify their input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.ndimage import maximum_filter1d

from .core import TimeSeries
from .errors import InvalidArgs, WindowTooLarge

# Consistency constant turning a MAD into a Gaussian standard deviation.
MAD_SCALE = 1.4826
ZNORM_STD_FLOOR = 1e-12

DEFAULT_HAMPEL_WINDOW = 11
DEFAULT_HAMPEL_K = 3.0


@dataclass(frozen=True)
class EnvelopeConfig:
    window_samples: int = 20
    downsample_factor: int = 20

    def __post_init__(self):
        if self.window_samples < 1 or self.downsample_factor < 1:
            raise InvalidArgs("window_samples and downsample_factor must be >= 1")

    def apply(self, series: TimeSeries) -> TimeSeries:
        env = peak_envelope(series, self.window_samples)
        return downsample(env, self.downsample_factor)


def peak_envelope(series: TimeSeries, window_samples: int) -> TimeSeries:
    """Centred moving maximum of ``|samples|``.

    The window is truncated at both ends of the series. For even widths the
    window covers ``window_samples // 2`` samples before the centre and
    ``window_samples // 2 - 1`` after it.
    """
    window_samples = int(window_samples)
    if window_samples < 1:
        raise InvalidArgs("window_samples must be >= 1")
    if window_samples > len(series):
        raise WindowTooLarge(
            f"envelope window {window_samples} exceeds series length {len(series)}"
        )
    # 'nearest' padding repeats the edge value, which cannot raise a maximum,
    # so it is equivalent to truncating the window.
    env = maximum_filter1d(np.abs(series.samples), size=window_samples, mode="nearest")
    return series.with_samples(env)


def downsample(series: TimeSeries, factor: int) -> TimeSeries:
    """Reduce the rate by *factor* keeping the maximum of each block.

    Block maxima (instead of decimation) keep one-sample spikes visible at the
    lower rate. A trailing partial block is dropped.
    """
    factor = int(factor)
    if factor < 1:
        raise InvalidArgs("downsample factor must be >= 1")
    if factor == 1:
        return series.with_samples(series.samples)
    n_blocks = len(series) // factor
    if n_blocks == 0:
        raise WindowTooLarge(f"downsample factor {factor} exceeds series length")
    blocks = series.samples[: n_blocks * factor].reshape(n_blocks, factor)
    return series.with_samples(blocks.max(axis=1), series.sample_rate_hz / factor)


def _hampel(x: np.ndarray, window: int, k: float) -> np.ndarray:
    half = window // 2
    padded = np.concatenate([np.full(half, np.nan), x, np.full(half, np.nan)])
    windows = sliding_window_view(padded, window)
    med = np.nanmedian(windows, axis=1)
    mad = np.nanmedian(np.abs(windows - med[:, None]), axis=1)
    # MAD == 0 gives a zero threshold: any non-zero deviation is replaced.
    bad = np.abs(x - med) > k * MAD_SCALE * mad
    out = x.copy()
    out[bad] = med[bad]
    return out


def remove_outliers(
    series: TimeSeries,
    window_samples: int = DEFAULT_HAMPEL_WINDOW,
    k: float = DEFAULT_HAMPEL_K,
) -> TimeSeries:
    """Hampel filter.

    A sample is replaced by its window median when it deviates from that
    median by more than ``k * 1.4826 * MAD`` of the window. Windows are centred
    and truncated at the series ends.

    Parameters
    ----------
    series : TimeSeries
    window_samples : int
        Odd window width, at least 3.
    k : float
        Threshold in robust standard deviations, must be positive.
    """
    window_samples = int(window_samples)
    if window_samples < 3 or window_samples % 2 == 0:
        raise InvalidArgs("Hampel window must be odd and >= 3")
    if not k > 0:
        raise InvalidArgs("Hampel k must be positive")
    return series.with_samples(_hampel(series.samples, window_samples, float(k)))


def least_squares_line(samples: np.ndarray) -> tuple[float, float]:
    """Return ``(slope, intercept)`` of the least-squares line over ``0..n-1``."""
    x = np.asarray(samples, dtype=np.float64)
    n = x.shape[0]
    t = np.arange(n, dtype=np.float64)
    t_c = t - t.mean()
    x_mean = x.mean()
    slope = float(np.dot(t_c, x - x_mean) / np.dot(t_c, t_c))
    return slope, float(x_mean - slope * t.mean())


def detrend(series: TimeSeries) -> TimeSeries:
    """Subtract the least-squares straight line."""
    x = series.samples
    if x.shape[0] < 2:
        raise InvalidArgs("detrend needs at least 2 samples")
    t = np.arange(x.shape[0], dtype=np.float64)
    t_c = t - t.mean()
    centred = x - x.mean()
    slope = np.dot(t_c, centred) / np.dot(t_c, t_c)
    return series.with_samples(centred - slope * t_c)


def z_normalize(values) -> np.ndarray:
    """Zero mean, unit population standard deviation.

    Inputs whose standard deviation is below 1e-12 map to all zeros.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise InvalidArgs("cannot z-normalise an empty sequence")
    sd = x.std()
    if sd < ZNORM_STD_FLOOR:
        return np.zeros_like(x)
    return (x - x.mean()) / sd
