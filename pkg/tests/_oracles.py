"""Independent brute-force oracles used only by the tests.

These deliberately re-derive values from first principles (direct double
loops, per-draw Monte Carlo, contiguous-grouping enumeration) so the fast
implementations in the package are checked against a second route.
"""

from __future__ import annotations

import itertools

import numpy as np

from calibdist.core import EmpiricalDistribution, SeededRng


def kce2_direct(dist: EmpiricalDistribution, kind: str) -> float:
    """The defining quadratic form, as a plain double sum."""
    v = dist.v
    r = dist.residuals()
    total = 0.0
    for i in range(dist.n):
        for j in range(dist.n):
            d = abs(v[i] - v[j])
            k = np.exp(-d) if kind == "laplace" else np.exp(-d * d)
            total += r[i] * r[j] * k
    return total / dist.n**2


def rintce_mc_direct(dist: EmpiricalDistribution, width: float, shifts: int,
                     rng: SeededRng) -> float:
    """Monte Carlo randomized-shift error, binning every draw from scratch."""
    v = dist.v
    r = dist.residuals()
    total = 0.0
    for s in rng.uniform(0.0, width, shifts):
        idx = np.floor((v - s) / width).astype(int)
        sums: dict[int, float] = {}
        for j, ri in zip(idx, r):
            sums[j] = sums.get(j, 0.0) + ri
        total += sum(abs(x) for x in sums.values()) / dist.n
    return total / shifts


def intce_small_support(dist: EmpiricalDistribution) -> float:
    """Exact interval calibration error for tiny supports.

    An optimal interval partition groups contiguous runs of the sorted
    distinct values; within a grouping, the binned error is fixed and the
    mass-weighted average width is minimized by intervals hugging each
    block, approaching the block's value span.  Enumerating the 2^(d-1)
    contiguous groupings therefore yields the infimum.
    """
    values, inverse = np.unique(dist.v, return_inverse=True)
    d = len(values)
    resid = np.bincount(inverse, weights=(dist.v - dist.y), minlength=d) / dist.n
    mass = np.bincount(inverse, minlength=d) / dist.n
    best = np.inf
    for cuts in itertools.product([0, 1], repeat=d - 1):
        bounds = [0] + [i + 1 for i, c in enumerate(cuts) if c] + [d]
        total = 0.0
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            total += abs(resid[lo:hi].sum())
            total += mass[lo:hi].sum() * (values[hi - 1] - values[lo])
        best = min(best, total)
    return float(best)


def random_distribution(rng: np.random.Generator, max_n: int = 200) -> EmpiricalDistribution:
    """A deliberately varied random empirical distribution."""
    n = int(rng.integers(1, max_n + 1))
    style = rng.integers(0, 4)
    if style == 0:
        v = rng.random(n)
    elif style == 1:
        v = np.round(rng.random(n), 1)  # heavy ties
    elif style == 2:
        v = np.clip(rng.normal(0.5, 0.15, n), 0.0, 1.0)
    else:
        v = rng.choice([0.0, 0.25, 0.5, 0.75, 1.0], size=n)
    mode = rng.integers(0, 3)
    if mode == 0:
        y = rng.random(n) < v  # calibrated
    elif mode == 1:
        y = rng.random(n) < np.clip(v + rng.normal(0, 0.2), 0, 1)
    else:
        y = rng.random(n) < rng.random()  # constant rate, arbitrary v
    return EmpiricalDistribution(v, y.astype(np.int8))
