"""Expected calibration error and binned variants over interval partitions.

ECE groups samples by exact (bitwise) equality of the prediction, so it is
meaningful only for predictors with repeated values; the binned variants are
what one computes for continuous-valued predictors.  Adding the mass-weighted
average bin width to the binned error turns it into an upper bound on the
distance to calibration, which the bare binned error is not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EmpiricalDistribution
from .errors import BadBins

__all__ = ["IntervalPartition", "ece", "binned_ece", "uniform_partition"]


@dataclass(frozen=True)
class IntervalPartition:
    """Ordered disjoint intervals covering [0, 1].

    ``boundaries`` are strictly increasing with first 0 and last 1; interval j
    is [b_j, b_{j+1}), the last one closed at 1.
    """

    boundaries: tuple[float, ...]

    def __post_init__(self):
        b = self.boundaries
        if len(b) < 2:
            raise BadBins("a partition needs at least two boundaries")
        if b[0] != 0.0 or b[-1] != 1.0:
            raise BadBins(f"boundaries must start at 0 and end at 1, got [{b[0]}, {b[-1]}]")
        if any(l >= r for l, r in zip(b[:-1], b[1:])):
            raise BadBins("boundaries must be strictly increasing")

    @property
    def m(self) -> int:
        return len(self.boundaries) - 1

    def widths(self) -> np.ndarray:
        return np.diff(np.asarray(self.boundaries))

    def bin_index(self, v: np.ndarray) -> np.ndarray:
        """Index of the interval containing each v; 1.0 lands in the last one."""
        b = np.asarray(self.boundaries)
        idx = np.searchsorted(b, v, side="right") - 1
        return np.minimum(idx, self.m - 1)


def uniform_partition(bins: int) -> IntervalPartition:
    """Equal-width partition with boundaries {0, 1/bins, ..., 1}."""
    if not isinstance(bins, int) or bins < 1:
        raise BadBins(f"bins must be a positive integer, got {bins!r}")
    return IntervalPartition(tuple(i / bins for i in range(bins + 1)))


def ece(dist: EmpiricalDistribution) -> float:
    """Expected calibration error: sum over distinct v of p(v) |mean_y(v) - v|.

    Distinctness is bitwise equality of the stored float64 predictions.
    """
    values, inverse = np.unique(dist.v, return_inverse=True)
    counts = np.bincount(inverse, minlength=len(values))
    ysum = np.bincount(inverse, weights=dist.y.astype(float), minlength=len(values))
    mean_y = ysum / counts
    return float(np.sum(counts * np.abs(mean_y - values)) / dist.n)


def binned_ece(
    dist: EmpiricalDistribution,
    part: IntervalPartition,
    width_penalty: bool = False,
) -> float:
    """Binned ECE over the given partition, optionally plus the average width.

    The base value is sum_j |mean[(v - y) 1(v in I_j)]|.  With the penalty the
    mass-weighted average interval width sum_j mean[1(v in I_j) w(I_j)] is
    added, making the result an upper bound on the post-processing distance
    to calibration.
    """
    idx = part.bin_index(dist.v)
    residual = dist.v - dist.y.astype(float)
    per_bin = np.bincount(idx, weights=residual, minlength=part.m)
    value = float(np.abs(per_bin).sum() / dist.n)
    if width_penalty:
        mass = np.bincount(idx, minlength=part.m) / dist.n
        value += float(mass @ part.widths())
    return value
