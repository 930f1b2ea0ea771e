"""Kernel calibration error for the Laplace and Gaussian kernels.

The squared error is the quadratic form mean_{i,j} r_i r_j K(v_i, v_j) with
r = y - v.  Exact evaluation avoids the n^2 loop through algebraic identities
specific to each kernel on the line (verified against the direct quadratic
form in the tests):

* Laplace exp(-|u-v|) factors as exp(-u) exp(v) once the values are sorted,
  so a prefix sum gives the exact value in O(n log n).
* Gaussian exp(-(u-v)^2) = exp(-u^2) exp(-v^2) sum_k (2uv)^k / k!; with
  v in [0, 1] the series is a sum of squares that reaches machine precision
  after ~48 terms.

Randomized estimators of the squared error for the Laplace kernel:

* subsample: average of M uniformly-with-replacement sampled terms (any kind);
* fourier: |sum_j r_j e^{-i omega v_j}|^2 / n^2 with omega ~ Cauchy(1),
  sampled as tan(pi (U - 1/2)) and realized with cosine and sine accumulators;
* binning: sum of squared per-bin residual sums / n^2, with bin width
  delta ~ Gamma(2, 1) sampled as -ln U1 - ln U2 and shift tau ~ Unif[0, delta).

Each fourier/binning draw is an unbiased estimate of the squared error and
lies in [0, 1].  The published binning pseudocode omits the 1/n^2 factor that
its own unbiasedness argument carries; the implementation normalizes by n^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gammaln

from .core import EmpiricalDistribution, SeededRng
from .errors import BadConfig, ModeKindMismatch, TooLarge

__all__ = [
    "KernelKind",
    "KernelEstimatorConfig",
    "kce_exact",
    "kce_estimate",
    "kce_estimate_squared",
    "kernel_identity_check",
]

DEFAULT_QUADRATIC_CAP = 20_000
_GAUSS_SERIES_TERMS = 48
_REP_BATCH = 4096  # fixed batching keeps results bit-identical across machines


class KernelKind(str, Enum):
    LAPLACE = "laplace"
    GAUSSIAN = "gaussian"

    def evaluate(self, u, v):
        d = np.abs(np.asarray(u, dtype=float) - np.asarray(v, dtype=float))
        if self is KernelKind.LAPLACE:
            return np.exp(-d)
        return np.exp(-(d * d))


@dataclass(frozen=True)
class KernelEstimatorConfig:
    """mode: exact | subsample | fourier | binning.

    terms_m (subsample size) defaults to 10 n at call time, the linear-time
    setting; reps_r defaults to 1000 randomized repetitions, i.e. target
    accuracy ~0.1 on the squared value under the ceil(10 / eps^2) rule.
    """

    mode: str = "exact"
    terms_m: int | None = None
    reps_r: int | None = None
    rng: SeededRng | None = None

    def __post_init__(self):
        if self.mode not in ("exact", "subsample", "fourier", "binning"):
            raise BadConfig(f"unknown estimator mode {self.mode!r}")
        if self.mode == "subsample" and self.terms_m is not None and self.terms_m < 1:
            raise BadConfig(f"terms_m must be >= 1, got {self.terms_m}")
        if self.mode in ("fourier", "binning") and self.reps_r is not None and self.reps_r < 1:
            raise BadConfig(f"reps_r must be >= 1, got {self.reps_r}")


def default_reps(target_eps: float = 0.1) -> int:
    """Repetition count giving ~target_eps accuracy on the squared value."""
    return math.ceil(10.0 / target_eps**2)


def _canonical(dist: EmpiricalDistribution):
    # (v, y)-lexicographic order makes the result invariant to permutations
    # of the input, bit for bit.
    order = np.lexsort((dist.y, dist.v))
    v = dist.v[order]
    r = dist.residuals()[order]
    return v, r


def _kce2_laplace(v: np.ndarray, r: np.ndarray) -> float:
    prefix = np.cumsum(r * np.exp(v))
    s = float(np.sum(r * np.exp(-v) * prefix))
    return (2.0 * s - float(r @ r)) / len(v) ** 2


def _kce2_gaussian(v: np.ndarray, r: np.ndarray) -> float:
    w = r * np.exp(-v * v)
    total = 0.0
    vk = np.ones_like(v)
    for k in range(_GAUSS_SERIES_TERMS):
        sk = float(w @ vk)
        total += math.exp(k * math.log(2.0) - gammaln(k + 1)) * sk * sk
        vk = vk * v
    return total / len(v) ** 2


def kce_exact(dist: EmpiricalDistribution, kind: KernelKind,
              max_n: int = DEFAULT_QUADRATIC_CAP) -> float:
    """Exact kernel calibration error sqrt(mean_{i,j} r_i r_j K(v_i, v_j)).

    The quadratic form is positive semidefinite; tiny negative round-off
    (>= -1e-12) is clamped to zero before the square root.
    """
    if dist.n > max_n:
        raise TooLarge(f"kce_exact capped at n = {max_n}, got {dist.n}")
    kind = KernelKind(kind)
    v, r = _canonical(dist)
    sq = _kce2_laplace(v, r) if kind is KernelKind.LAPLACE else _kce2_gaussian(v, r)
    return math.sqrt(max(sq, 0.0))


def _fourier_draws(v, r, reps, rng: SeededRng) -> np.ndarray:
    n = len(v)
    out = np.empty(reps)
    for start in range(0, reps, _REP_BATCH):
        stop = min(start + _REP_BATCH, reps)
        omega = np.tan(np.pi * (rng.random(stop - start) - 0.5))
        phase = omega[:, None] * v[None, :]
        cos_acc = np.cos(phase) @ r
        sin_acc = np.sin(phase) @ r
        out[start:stop] = (cos_acc**2 + sin_acc**2) / n**2
    return out


def _binning_draws(v, r, reps, rng: SeededRng) -> np.ndarray:
    n = len(v)
    out = np.empty(reps)
    for start in range(0, reps, _REP_BATCH):
        stop = min(start + _REP_BATCH, reps)
        b = stop - start
        # Gamma(2, 1) as a sum of two unit exponentials; 1 - U keeps U > 0,
        # and the floor keeps the bin index finite if both draws hit 1.
        u1 = 1.0 - rng.random(b)
        u2 = 1.0 - rng.random(b)
        delta = np.maximum(-np.log(u1) - np.log(u2), 1e-12)
        tau = delta * rng.random(b)
        t = np.floor((v[None, :] + tau[:, None]) / delta[:, None]).astype(np.int64)
        t -= t.min(axis=1, keepdims=True)
        span = int(t.max()) + 1
        keys = (np.arange(b, dtype=np.int64)[:, None] * span + t).ravel()
        uniq, inverse = np.unique(keys, return_inverse=True)
        sums = np.bincount(inverse, weights=np.tile(r, b), minlength=len(uniq))
        per_rep = np.bincount(uniq // span, weights=sums * sums, minlength=b)
        out[start:stop] = per_rep / n**2
    return out


def kce_estimate_squared(dist: EmpiricalDistribution, kind: KernelKind,
                         cfg: KernelEstimatorConfig) -> float:
    """Raw estimate of the squared kernel calibration error.

    Subsampling can return a negative value; callers that need the error
    itself should go through ``kce_estimate`` which clamps before the root.
    """
    kind = KernelKind(kind)
    if cfg.mode in ("fourier", "binning") and kind is not KernelKind.LAPLACE:
        raise ModeKindMismatch(f"{cfg.mode} estimation is specific to the Laplace kernel")
    if cfg.mode == "exact":
        return kce_exact(dist, kind, max_n=max(dist.n, DEFAULT_QUADRATIC_CAP)) ** 2
    rng = cfg.rng if cfg.rng is not None else SeededRng(0)
    v, r = _canonical(dist)
    n = dist.n
    if cfg.mode == "subsample":
        m = cfg.terms_m if cfg.terms_m is not None else 10 * n
        i = rng.integers(0, n, m)
        j = rng.integers(0, n, m)
        return float(np.mean(r[i] * r[j] * kind.evaluate(v[i], v[j])))
    reps = cfg.reps_r if cfg.reps_r is not None else default_reps()
    if cfg.mode == "fourier":
        return float(_fourier_draws(v, r, reps, rng).mean())
    return float(_binning_draws(v, r, reps, rng).mean())


def kce_estimate(dist: EmpiricalDistribution, kind: KernelKind,
                 cfg: KernelEstimatorConfig) -> float:
    """Kernel calibration error estimate: signed sqrt of the squared estimate."""
    return math.sqrt(max(kce_estimate_squared(dist, kind, cfg), 0.0))


def kernel_identity_check(d: float, reps: int, rng: SeededRng) -> tuple[float, float]:
    """Monte Carlo check of the two Laplace-kernel identities at distance d.

    Returns (mean of cos(omega d) for omega ~ Cauchy(1), probability that two
    points at distance d share a bin under the Gamma(2,1)-width random
    binning); both converge to exp(-d).
    """
    if d < 0:
        raise BadConfig(f"distance must be nonnegative, got {d}")
    cos_total = 0.0
    bin_total = 0
    for start in range(0, reps, _REP_BATCH * 16):
        b = min(_REP_BATCH * 16, reps - start)
        omega = np.tan(np.pi * (rng.random(b) - 0.5))
        cos_total += float(np.cos(omega * d).sum())
        delta = -np.log(1.0 - rng.random(b)) - np.log(1.0 - rng.random(b))
        tau = delta * rng.random(b)
        bin_total += int(np.count_nonzero(d + tau < delta))
    return cos_total / reps, bin_total / reps
