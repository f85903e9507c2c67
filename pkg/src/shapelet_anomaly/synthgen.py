"""Seeded generator for the seven SHM data patterns.

Series are produced directly in the envelope domain (1 Hz by default): a
positive amplitude band whose shape carries the class. A raw mode modulates a
carrier with the envelope for exercising :mod:`preprocess` end to end.

Every series draws its randomness from ``default_rng(seed)`` where the seed
is ``(spec.rng_seed, class id, index within class)``, so datasets are
reproducible and any subset can be regenerated independently.

Recipe constants below are the generator's own contract, chosen to resemble
the typical look of each pattern. They are not measured from real data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.ndimage import gaussian_filter1d, median_filter, uniform_filter1d

from .core import MIN_SERIES_LENGTH, ClassLabel, LabeledDataset, TimeSeries
from .errors import InvalidArgs
from .preprocess import least_squares_line

# normal band: A * (1 + BAND_FLUCTUATION * smooth noise)
LEVEL_RANGE = (0.8, 1.2)
BAND_FLUCTUATION = 0.15
BAND_SMOOTHING = 3.0  # gaussian sigma in samples
# missing: at most this much of the span carries signal
MISSING_MAX_SIGNAL = 0.08
# minor: band scale relative to normal, noise floor relative to the band
MINOR_SCALE = (0.02, 0.06)
MINOR_NOISE = 0.2
# outlier: spike count, width and height relative to the band median
SPIKE_COUNT = (1, 5)
SPIKE_HEIGHT = (12.0, 20.0)
SPIKE_MIN_GAP = 60
# square: dips to a fraction of the level, each 60-300 s at 3600 samples
SQUARE_COUNT = (3, 6)
SQUARE_DEPTH = (0.2, 0.4)
SQUARE_DURATION = (60 / 3600, 300 / 3600)
SQUARE_MAX_COVER = 0.3
# drift: detrended random walk with this std relative to the level
DRIFT_STD = (0.5, 1.0)
WANDER_SMOOTHING = 0.01  # gaussian sigma as a fraction of the span
# trend: ramp height relative to the drift range
TREND_RAMP = (3.0, 6.0)
# positive floor kept under wandering baselines
BASELINE_FLOOR = 0.2

RAW_RATE_HZ = 20.0
# four-sample carrier that reaches +-1 exactly, so block maxima recover the envelope
_CARRIER = np.array([0.0, 1.0, 0.0, -1.0])

REALISTIC_PROPORTIONS = {
    ClassLabel.NORMAL: 0.48,
    ClassLabel.TREND: 0.20,
    ClassLabel.MISSING: 0.10,
    ClassLabel.SQUARE: 0.10,
    ClassLabel.DRIFT: 0.024,
    ClassLabel.OUTLIER: 0.019,
}


@dataclass(frozen=True)
class GeneratorSpec:
    """What to generate.

    ``noise_level`` is the std of white noise added to the band, relative to
    the band level.
    """

    per_class_counts: Mapping = field(default_factory=dict)
    series_length: int = 3600
    sample_rate_hz: float = 1.0
    noise_level: float = 0.005
    rng_seed: int = 0
    raw: bool = False

    def __post_init__(self):
        counts = {ClassLabel.parse(k): int(v) for k, v in dict(self.per_class_counts).items()}
        object.__setattr__(self, "per_class_counts", dict(sorted(counts.items())))
        if any(v < 0 for v in counts.values()) or not any(v > 0 for v in counts.values()):
            raise InvalidArgs("class counts must be >= 0 with at least one positive")
        if self.series_length < MIN_SERIES_LENGTH:
            raise InvalidArgs(f"series_length must be >= {MIN_SERIES_LENGTH}")
        if not self.sample_rate_hz > 0:
            raise InvalidArgs("sample_rate_hz must be positive")
        if not self.noise_level >= 0:
            raise InvalidArgs("noise_level must be >= 0")

    @classmethod
    def balanced(cls, per_class: int, **kwargs) -> "GeneratorSpec":
        """Equal counts for all seven classes."""
        if per_class < 1:
            raise InvalidArgs("per_class must be >= 1")
        return cls({c: per_class for c in ClassLabel}, **kwargs)

    @classmethod
    def realistic(cls, total: int, **kwargs) -> "GeneratorSpec":
        """Class mix of a monitoring archive; minor takes the rounding remainder."""
        if total < 1:
            raise InvalidArgs("total must be >= 1")
        counts = {c: int(round(p * total)) for c, p in REALISTIC_PROPORTIONS.items()}
        counts[ClassLabel.MINOR] = total - sum(counts.values())
        if counts[ClassLabel.MINOR] < 0:
            raise InvalidArgs(f"total {total} too small for the realistic mix")
        return cls(counts, **kwargs)

    @property
    def total(self) -> int:
        return sum(self.per_class_counts.values())


def _smooth_noise(rng, n):
    z = gaussian_filter1d(rng.standard_normal(n), BAND_SMOOTHING, mode="wrap")
    sd = z.std()
    return z / sd if sd > 0 else z


def _band(rng, n, level, noise_level):
    band = level * (1.0 + BAND_FLUCTUATION * _smooth_noise(rng, n))
    if noise_level > 0:
        band = band + noise_level * level * rng.standard_normal(n)
    return np.abs(band)


def _wander(rng, n, level):
    walk = np.cumsum(rng.standard_normal(n))
    walk = gaussian_filter1d(walk, max(1.0, n * WANDER_SMOOTHING), mode="nearest")
    slope, intercept = least_squares_line(walk)
    walk = walk - (slope * np.arange(n) + intercept)
    sd = walk.std()
    if sd > 0:
        walk = walk / sd
    return rng.uniform(*DRIFT_STD) * level * walk


def _lift(x, level):
    """Shift up so the series stays above a positive floor."""
    low = x.min()
    floor = BASELINE_FLOOR * level
    return x + (floor - low) if low < floor else x


def _spike_positions(rng, n, count):
    chosen = []
    for _ in range(200):
        if len(chosen) == count:
            break
        p = int(rng.integers(0, n))
        if all(abs(p - q) >= min(SPIKE_MIN_GAP, n // (2 * count) or 1) for q in chosen):
            chosen.append(p)
    return sorted(chosen) or [n // 2]


def _dips(rng, n):
    count = int(rng.integers(SQUARE_COUNT[0], SQUARE_COUNT[1] + 1))
    lo = max(2, int(round(SQUARE_DURATION[0] * n)))
    hi = max(lo, int(round(SQUARE_DURATION[1] * n)))
    budget = int(SQUARE_MAX_COVER * n)
    spans = []
    for _ in range(500):
        if len(spans) == count:
            break
        d = int(rng.integers(lo, hi + 1))
        if d + sum(e - s for s, e in spans) > budget:
            d = budget - sum(e - s for s, e in spans)
            if d < lo:
                break
        s = int(rng.integers(1, max(2, n - d)))
        e = min(n, s + d)
        # keep a gap so every dip has two distinct edges
        if all(e + lo <= s2 or e2 + lo <= s for s2, e2 in spans):
            spans.append((s, e))
    return sorted(spans)


def _envelope(label: ClassLabel, n: int, rng: np.random.Generator, noise_level: float) -> np.ndarray:
    level = rng.uniform(*LEVEL_RANGE)
    if label == ClassLabel.NORMAL:
        return _band(rng, n, level, noise_level)
    if label == ClassLabel.MISSING:
        out = np.zeros(n)
        k = int(rng.uniform(0.0, MISSING_MAX_SIGNAL) * n)
        if k:
            seg = _band(rng, k, level, noise_level)
            if rng.random() < 0.5:
                out[:k] = seg
            else:
                out[n - k:] = seg
        return out
    if label == ClassLabel.MINOR:
        scale = rng.uniform(*MINOR_SCALE) * level
        band = scale * (1.0 + BAND_FLUCTUATION * _smooth_noise(rng, n))
        return np.abs(band + MINOR_NOISE * scale * rng.standard_normal(n))
    if label == ClassLabel.OUTLIER:
        out = _band(rng, n, level, noise_level)
        base = np.median(out)
        count = int(rng.integers(SPIKE_COUNT[0], SPIKE_COUNT[1] + 1))
        for p in _spike_positions(rng, n, count):
            width = int(rng.integers(1, 3))
            out[p:p + width] = rng.uniform(*SPIKE_HEIGHT) * base
        return out
    if label == ClassLabel.SQUARE:
        out = _band(rng, n, level, noise_level)
        for s, e in _dips(rng, n):
            out[s:e] *= rng.uniform(*SQUARE_DEPTH)
        return out
    if label in (ClassLabel.DRIFT, ClassLabel.TREND):
        wander = _wander(rng, n, level)
        x = _band(rng, n, level, noise_level) + wander
        if label == ClassLabel.TREND:
            height = rng.uniform(*TREND_RAMP) * (wander.max() - wander.min())
            sign = 1.0 if rng.random() < 0.5 else -1.0
            x = x + sign * height * np.linspace(0.0, 1.0, n)
        return _lift(x, level)
    raise InvalidArgs(f"unknown class {label!r}")


def _carrier(envelope: np.ndarray, factor: int, phase: int) -> np.ndarray:
    up = np.repeat(envelope, factor)
    return up * np.roll(np.resize(_CARRIER, up.shape[0]), phase)


def generate_pattern(label, length: int, seed, spec: GeneratorSpec | None = None) -> TimeSeries:
    """One series of class *label*; *seed* is an int or a sequence of ints.

    In raw mode the series has ``length * 20`` samples at 20 Hz and its block
    maxima of ``|x|`` over 20 samples equal the envelope-domain series.
    """
    label = ClassLabel.parse(label)
    spec = spec or GeneratorSpec({label: 1}, series_length=max(length, MIN_SERIES_LENGTH))
    if length < MIN_SERIES_LENGTH:
        raise InvalidArgs(f"length must be >= {MIN_SERIES_LENGTH}")
    rng = np.random.default_rng(seed)
    env = _envelope(label, int(length), rng, spec.noise_level)
    if not spec.raw:
        return TimeSeries(env, spec.sample_rate_hz)
    factor = int(RAW_RATE_HZ / spec.sample_rate_hz)
    if factor < 2:
        raise InvalidArgs("raw mode needs an envelope rate below 10 Hz")
    return TimeSeries(_carrier(env, factor, int(rng.integers(0, 4))), spec.sample_rate_hz * factor)


def series_seed(spec: GeneratorSpec, label: ClassLabel, index: int) -> tuple:
    return (int(spec.rng_seed), int(label), int(index))


def generate_dataset(spec: GeneratorSpec) -> LabeledDataset:
    """All requested series, grouped by class id then index."""
    entries = []
    for label, count in spec.per_class_counts.items():
        for k in range(count):
            ts = generate_pattern(label, spec.series_length, series_seed(spec, label, k), spec)
            entries.append((ts, label))
    return LabeledDataset(entries)


# Separability statistics ---------------------------------------------------

WANDER_WINDOW_FRACTION = 1 / 20
STEP_FILTER = 5
STEP_SIGMAS = 8.0


def pattern_stats(series) -> dict:
    """Scale-aware summary statistics used by the recipe contract.

    zero_fraction
        Share of samples exactly 0.
    median_level
        Median amplitude.
    spike_ratio
        ``max / median`` (``inf`` when the median is 0).
    slope_fraction
        ``|fitted slope| * length / (p99 - p1)``: how much of the range a
        straight line explains.
    step_count
        Number of abrupt level changes: jumps of a 5-sample median-filtered
        copy larger than 8 robust standard deviations of its own increments.
    wander_ratio
        Std of a moving mean over 1/20 of the span divided by the std of
        what remains; large for slowly wandering baselines.
    """
    x = series.samples if isinstance(series, TimeSeries) else np.asarray(series, np.float64)
    n = x.shape[0]
    med = float(np.median(x))
    p1, p99 = np.percentile(x, [1, 99])
    spread = float(p99 - p1)
    slope, _ = least_squares_line(x)
    mf = median_filter(x, size=STEP_FILTER, mode="nearest")
    d = np.diff(mf)
    d = d - np.median(d)
    scale = 1.4826 * float(np.median(np.abs(d)))
    jumps = np.abs(d) > max(STEP_SIGMAS * scale, 1e-12)
    steps = int(np.count_nonzero(jumps[1:] & ~jumps[:-1]) + int(jumps[0])) if d.size else 0
    w = max(3, int(n * WANDER_WINDOW_FRACTION))
    smooth = uniform_filter1d(x, w, mode="nearest")
    rest = float(np.std(x - smooth))
    return {
        "zero_fraction": float(np.mean(x == 0.0)),
        "median_level": med,
        "spike_ratio": float(x.max() / med) if med > 0 else float("inf"),
        "slope_fraction": abs(slope) * n / spread if spread > 0 else 0.0,
        "step_count": steps,
        "wander_ratio": float(np.std(smooth)) / rest if rest > 0 else 0.0,
    }


INF = float("inf")

# Acceptance region per class: stat -> closed interval. A stat not listed is
# unconstrained. Every pair of classes has at least one stat whose intervals
# are disjoint.
ACCEPTANCE_REGIONS = {
    ClassLabel.NORMAL: {
        "zero_fraction": (0.0, 0.01), "median_level": (0.5, 2.0), "spike_ratio": (0.0, 3.0),
        "slope_fraction": (0.0, 0.3), "step_count": (0, 1), "wander_ratio": (0.0, 0.8),
    },
    ClassLabel.MISSING: {"zero_fraction": (0.9, 1.0)},
    ClassLabel.MINOR: {
        "zero_fraction": (0.0, 0.01), "median_level": (0.0, 0.1), "slope_fraction": (0.0, 0.3),
        "wander_ratio": (0.0, 0.8),
    },
    ClassLabel.OUTLIER: {
        "zero_fraction": (0.0, 0.01), "median_level": (0.5, 2.0), "spike_ratio": (10.0, INF),
        "slope_fraction": (0.0, 0.3), "wander_ratio": (0.0, 0.8),
    },
    ClassLabel.SQUARE: {
        "zero_fraction": (0.0, 0.01), "median_level": (0.5, 2.0), "spike_ratio": (0.0, 3.0),
        "step_count": (4, INF),
    },
    ClassLabel.TREND: {"zero_fraction": (0.0, 0.01), "slope_fraction": (0.6, INF), "step_count": (0, 1)},
    ClassLabel.DRIFT: {
        "zero_fraction": (0.0, 0.01), "slope_fraction": (0.0, 0.3), "step_count": (0, 1),
        "wander_ratio": (1.2, INF),
    },
}


def in_region(stats: dict, label) -> bool:
    """True when *stats* fall inside the acceptance region of *label*."""
    region = ACCEPTANCE_REGIONS[ClassLabel.parse(label)]
    return all(lo <= stats[k] <= hi for k, (lo, hi) in region.items())
