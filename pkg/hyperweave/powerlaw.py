"""Histograms, log-binned power-law fits and the slope-agreement score."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from hyperweave.errors import FitUndefinedError

BIN_RATIO = 1.5


@dataclass(frozen=True)
class DistributionHistogram:
    """
    Empirical distribution of a non-negative integer statistic.

    Attributes:
        values: Strictly increasing observed values.
        counts: Positive count for each value.
        excluded: Items left out of the histogram, e.g. zero-degree nodes.
    """

    values: tuple[int, ...] = ()
    counts: tuple[int, ...] = ()
    excluded: int = 0

    def __post_init__(self) -> None:
        if len(self.values) != len(self.counts):
            raise ValueError("values and counts differ in length")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("histogram values must be strictly increasing")
        if any(c <= 0 for c in self.counts):
            raise ValueError("histogram counts must be positive")

    @classmethod
    def from_counter(cls, counter: Counter, excluded: int = 0) -> "DistributionHistogram":
        items = sorted((int(v), int(c)) for v, c in counter.items() if c > 0)
        return cls(
            tuple(v for v, _ in items), tuple(c for _, c in items), excluded=excluded
        )

    @classmethod
    def from_values(cls, observations: Iterable[int], excluded: int = 0) -> "DistributionHistogram":
        data = np.fromiter(observations, dtype=np.int64)
        if data.size == 0:
            return cls(excluded=excluded)
        values, counts = np.unique(data, return_counts=True)
        return cls(
            tuple(int(v) for v in values), tuple(int(c) for c in counts), excluded=excluded
        )

    @property
    def total(self) -> int:
        return sum(self.counts)

    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.values, self.counts))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class PowerLawFit:
    """
    Straight-line fit of a distribution on log10-log10 axes.

    Attributes:
        slope: Fitted log-log slope (the power-law exponent, usually negative).
        intercept: Fitted log10 intercept.
        r_squared: Coefficient of determination in [0, 1].
        num_bins_used: Number of points entering the regression (>= 2).
    """

    slope: float
    intercept: float
    r_squared: float
    num_bins_used: int


def _ols(log_x: np.ndarray, log_y: np.ndarray) -> PowerLawFit:
    if log_x.size < 2:
        raise FitUndefinedError(f"need at least 2 points to fit, got {log_x.size}")
    if np.all(log_x == log_x[0]):
        raise FitUndefinedError("all x values are identical")
    result = stats.linregress(log_x, log_y)
    r_squared = min(1.0, max(0.0, float(result.rvalue) ** 2))
    return PowerLawFit(
        slope=float(result.slope),
        intercept=float(result.intercept),
        r_squared=r_squared,
        num_bins_used=int(log_x.size),
    )


def log_bins(hist: DistributionHistogram) -> tuple[np.ndarray, np.ndarray]:
    """
    Log-bin a histogram.

    Bin edges are 1, 1.5, 1.5**2, ... Each non-empty bin yields the
    geometric mean of the values observed in it and the mean count per
    observed value, normalized by the histogram total. Values below 1 are
    ignored.

    Args:
        hist: Histogram to bin.

    Returns:
        Tuple of (bin centers, densities) for the non-empty bins.
    """
    values = np.asarray(hist.values, dtype=np.float64)
    counts = np.asarray(hist.counts, dtype=np.float64)
    keep = values >= 1
    values, counts = values[keep], counts[keep]
    if values.size == 0:
        return np.empty(0), np.empty(0)

    num_edges = int(math.ceil(math.log(values.max()) / math.log(BIN_RATIO))) + 2
    edges = BIN_RATIO ** np.arange(num_edges, dtype=np.float64)
    bin_of = np.searchsorted(edges, values, side="right") - 1

    centers, densities = [], []
    total = float(hist.total)
    for b in np.unique(bin_of):
        in_bin = bin_of == b
        centers.append(math.exp(np.log(values[in_bin]).mean()))
        densities.append(counts[in_bin].mean() / total)
    return np.array(centers), np.array(densities)


def fit_power_law(hist: DistributionHistogram) -> PowerLawFit:
    """
    Fit a power law to a histogram by log-binned least squares.

    Args:
        hist: Histogram with at least two distinct values >= 1.

    Returns:
        PowerLawFit of log10(density) against log10(bin center).

    Raises:
        FitUndefinedError: If fewer than two bins are non-empty.
    """
    centers, densities = log_bins(hist)
    if centers.size < 2:
        raise FitUndefinedError(
            f"power-law fit needs 2 non-empty bins, got {centers.size}"
        )
    return _ols(np.log10(centers), np.log10(densities))


def fit_loglog_line(xs: Sequence[float], ys: Sequence[float]) -> PowerLawFit:
    """
    Unbinned least squares of log10(y) on log10(x).

    Points with a non-positive coordinate are dropped.

    Raises:
        FitUndefinedError: If fewer than two usable points remain.
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    keep = (x > 0) & (y > 0)
    return _ols(np.log10(x[keep]), np.log10(y[keep]))


def goodness_of_fit_gamma(fit_real: PowerLawFit, fit_gen: PowerLawFit) -> float:
    """
    Slope agreement score: 1 - |slope_real - slope_gen| / |slope_real|.

    The score is not clamped and goes negative when the slopes diverge.

    Raises:
        FitUndefinedError: If the reference slope is zero.
    """
    if fit_real.slope == 0:
        raise FitUndefinedError("reference slope is zero")
    return 1.0 - abs(fit_real.slope - fit_gen.slope) / abs(fit_real.slope)


def burstiness(gaps: Sequence[float]) -> float:
    """Burstiness coefficient (sigma - mu) / (sigma + mu), from -1 (periodic) to +1."""
    data = np.asarray(gaps, dtype=np.float64)
    if data.size == 0:
        raise FitUndefinedError("no inter-event gaps")
    mean = float(data.mean())
    std = float(data.std())
    if mean + std == 0:
        raise FitUndefinedError("all inter-event gaps are zero")
    return (std - mean) / (std + mean)
