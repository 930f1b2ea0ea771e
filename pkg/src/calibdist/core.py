"""Domain types: empirical prediction-label distributions, seeded randomness,
grid rounding, and reliability-diagram summaries.

Everything here is immutable after construction and pure given an explicit
:class:`SeededRng`, so values can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BadBins, BadConfig, BadLabel, BadStep, EmptyInput, OutOfRange

__all__ = [
    "Sample",
    "EmpiricalDistribution",
    "SeededRng",
    "ReliabilityBin",
    "make_empirical",
    "round_to_grid",
    "reliability_bins",
]


@dataclass(frozen=True)
class Sample:
    """One prediction-label pair: v in [0, 1], y in {0, 1}."""

    v: float
    y: int

    def __post_init__(self):
        if not (0.0 <= self.v <= 1.0):
            raise OutOfRange(f"prediction {self.v!r} outside [0, 1]")
        if self.y not in (0, 1):
            raise BadLabel(f"label {self.y!r} not in {{0, 1}}")


class EmpiricalDistribution:
    """Ordered multiset of (v, y) pairs, each carrying uniform weight 1/n.

    Iteration order is insertion order.  The backing arrays are read-only;
    treat instances as values.
    """

    __slots__ = ("_v", "_y")

    def __init__(self, v: np.ndarray, y: np.ndarray):
        v = np.asarray(v, dtype=np.float64)
        y_f = np.asarray(y, dtype=np.float64)
        if v.ndim != 1 or y_f.shape != v.shape:
            raise BadConfig(f"v and y must be 1-d arrays of equal length, got {v.shape} and {y_f.shape}")
        if v.size == 0:
            raise EmptyInput("an empirical distribution needs at least one sample")
        if np.any(v < 0.0) or np.any(v > 1.0):
            bad = float(v[(v < 0.0) | (v > 1.0)][0])
            raise OutOfRange(f"prediction {bad!r} outside [0, 1]")
        if not np.all((y_f == 0.0) | (y_f == 1.0)):
            bad = float(y_f[(y_f != 0.0) & (y_f != 1.0)][0])
            raise BadLabel(f"label {bad!r} not in {{0, 1}}")
        v = v.copy()
        y = y_f.astype(np.int8)
        v.setflags(write=False)
        y.setflags(write=False)
        self._v = v
        self._y = y

    @property
    def v(self) -> np.ndarray:
        """Predictions, shape (n,), read-only."""
        return self._v

    @property
    def y(self) -> np.ndarray:
        """Labels as 0/1 integers, shape (n,), read-only."""
        return self._y

    @property
    def n(self) -> int:
        return self._v.size

    @property
    def samples(self) -> list[Sample]:
        return [Sample(float(v), int(y)) for v, y in zip(self._v, self._y)]

    def pairs(self) -> list[tuple[float, int]]:
        """The raw (v, y) list in insertion order; round-trips make_empirical."""
        return [(float(v), int(y)) for v, y in zip(self._v, self._y)]

    def __len__(self) -> int:
        return self.n

    def __iter__(self):
        return iter(self.samples)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmpiricalDistribution):
            return NotImplemented
        return np.array_equal(self._v, other._v) and np.array_equal(self._y, other._y)

    def __repr__(self) -> str:
        return f"EmpiricalDistribution(n={self.n})"

    def residuals(self) -> np.ndarray:
        """y - v per sample; the basic miscalibration signal."""
        return self._y.astype(np.float64) - self._v


class SeededRng:
    """Deterministic random stream: same seed + same call sequence -> same output.

    Thin wrapper over numpy's PCG64 generator.  ``substream`` derives an
    independent deterministic stream from (seed, *keys), which is how
    parallel lanes (per repetition, per shift batch) stay reproducible.
    """

    __slots__ = ("seed", "_keys", "_gen")

    def __init__(self, seed: int, _keys: tuple[int, ...] = ()):
        if not (0 <= int(seed) < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = int(seed)
        self._keys = tuple(int(k) for k in _keys)
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=self._keys))
        )

    def substream(self, *keys: int) -> "SeededRng":
        """A fresh stream derived from (seed, existing keys, *keys)."""
        return SeededRng(self.seed, self._keys + tuple(int(k) for k in keys))

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        return self._gen.uniform(low, high, size)

    def random(self, size=None):
        return self._gen.random(size)

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size=size)

    def choice(self, n: int, size=None, p=None):
        return self._gen.choice(n, size=size, p=p)

    def __repr__(self) -> str:
        return f"SeededRng(seed={self.seed}, keys={self._keys})"


@dataclass(frozen=True)
class ReliabilityBin:
    """Aggregates of one reliability-diagram bin.

    mean_v / mean_y are None when the bin is empty.
    """

    lo: float
    hi: float
    count: int
    mean_v: float | None
    mean_y: float | None

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BadBins(f"bin bounds must satisfy lo < hi, got [{self.lo}, {self.hi}]")
        if self.count < 0:
            raise BadBins("bin count must be nonnegative")
        if self.count == 0 and (self.mean_v is not None or self.mean_y is not None):
            raise BadBins("means must be undefined for an empty bin")


def make_empirical(pairs: Iterable[tuple[float, int]] | Sequence) -> EmpiricalDistribution:
    """Validate a list of (prediction, label) pairs into a distribution.

    Raises EmptyInput / OutOfRange / BadLabel; preserves input order.
    """
    pairs = list(pairs)
    if not pairs:
        raise EmptyInput("no samples given")
    v = np.array([p[0] for p in pairs], dtype=np.float64)
    y_raw = [p[1] for p in pairs]
    for lab in y_raw:
        if lab not in (0, 1):
            raise BadLabel(f"label {lab!r} not in {{0, 1}}")
    return EmpiricalDistribution(v, np.array(y_raw, dtype=np.int8))


def round_to_grid(dist: EmpiricalDistribution, step: float) -> EmpiricalDistribution:
    """Round every prediction to the nearest multiple of ``step``, clamped to [0, 1].

    Exact ties go to the larger grid point, so the operation is deterministic
    and idempotent.  When the nearest multiple exceeds 1 the value clamps to
    1 itself, which only shortens the move; either way
    |v_out - v_in| <= step / 2 and labels are unchanged.
    """
    if not (0.0 < step <= 1.0):
        raise BadStep(f"step must satisfy 0 < step <= 1, got {step}")
    k = np.floor(dist.v / step + 0.5)
    out = np.minimum(k * step, 1.0)
    return EmpiricalDistribution(out, dist.y)


def reliability_bins(dist: EmpiricalDistribution, bins: int) -> list[ReliabilityBin]:
    """Equal-width reliability-diagram summary.

    Bins are [i/bins, (i+1)/bins), half-open, with the last bin closed at 1
    so counts always sum to n.
    """
    if not isinstance(bins, int) or bins < 1:
        raise BadBins(f"bins must be a positive integer, got {bins!r}")
    idx = np.minimum((dist.v * bins).astype(np.int64), bins - 1)
    out: list[ReliabilityBin] = []
    for b in range(bins):
        mask = idx == b
        count = int(mask.sum())
        if count:
            mean_v = float(dist.v[mask].mean())
            mean_y = float(dist.y[mask].mean())
        else:
            mean_v = mean_y = None
        out.append(ReliabilityBin(lo=b / bins, hi=(b + 1) / bins, count=count,
                                  mean_v=mean_v, mean_y=mean_y))
    return out
