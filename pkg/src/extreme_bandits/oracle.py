"""
Brute-force references for tests and Monte Carlo checks.

Nothing here imports the estimator or the maxima store: QoMax is recomputed from
raw tables, and samples come from numpy's own generators rather than the
inverse-transform samplers of the distribution classes.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .distributions import (
    ArmDistribution,
    DiracParetoMixture,
    Exponential,
    Gaussian,
    GeneralizedGaussian,
    LogNormal,
    Pareto,
)

# brute-force sampling is used up to this many raw draws per distribution
BRUTE_FORCE_LIMIT = 2 * 10**8
# raw draws materialized at once
_CHUNK_CELLS = 2 * 10**6


def _rank(size: int, q: float) -> int:
    """``ceil(size * q)`` computed on the decimal value of ``q``."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile must lie in (0, 1), got {q}")
    return min(max(math.ceil(Fraction(str(q)) * size), 1), size)


def naive_qomax(batches: Sequence[Sequence[float]], q: float) -> float:
    """QoMax of a raw table whose rows are the batches."""
    if len(batches) == 0 or any(len(row) == 0 for row in batches):
        raise ValueError("naive_qomax needs at least one non-empty batch")
    maxima = sorted(max(row) for row in batches)
    return maxima[_rank(len(maxima), q) - 1]


def naive_suffix_max(seq: Sequence[float], cutoff: int) -> float:
    """Maximum of the elements with 1-based index > ``cutoff``."""
    if cutoff >= len(seq):
        raise ValueError(f"empty suffix: cutoff {cutoff} >= length {len(seq)}")
    return max(seq[cutoff:])


def harmonic(n: int) -> float:
    """``H_n = 1 + 1/2 + ... + 1/n``."""
    if n < 1:
        raise ValueError("harmonic number needs n >= 1")
    return math.fsum(1.0 / k for k in range(1, n + 1))


def native_sample(dist: ArmDistribution, rng: np.random.Generator, size) -> np.ndarray:
    """Draw with numpy's built-in samplers (an independent route to the same laws)."""
    if isinstance(dist, Pareto):
        # numpy's pareto is the Lomax law; shift and scale to the floor C^(1/lambda)
        return (1.0 + rng.pareto(dist.lam, size)) * dist.scale_c ** (1.0 / dist.lam)
    if isinstance(dist, Exponential):
        return rng.exponential(1.0 / dist.rate, size)
    if isinstance(dist, Gaussian):
        return rng.normal(dist.mean, dist.std, size)
    if isinstance(dist, LogNormal):
        return rng.lognormal(dist.mu, dist.sigma, size)
    if isinstance(dist, GeneralizedGaussian):
        # |X|^beta ~ Gamma(1/beta, 1), symmetric sign
        magnitude = rng.gamma(1.0 / dist.beta, 1.0, size) ** (1.0 / dist.beta)
        return np.where(rng.random(size) < 0.5, -magnitude, magnitude)
    if isinstance(dist, DiracParetoMixture):
        tail = 1.0 + rng.pareto(dist.lam, size)
        return np.where(rng.random(size) < dist.zero_prob, 0.0, tail)
    raise TypeError(f"no native sampler for {type(dist).__name__}")


def _batch_maxima(dist, rng, n, shape, method) -> np.ndarray:
    """Array of ``shape`` maxima of ``n`` draws each."""
    if method == "brute":
        return native_sample(dist, rng, (*shape, n)).max(axis=-1)
    # exact law of the maximum: P(M <= x) = F(x)^n
    v = 1.0 - rng.random(shape)
    return np.asarray(dist.isf(-np.expm1(np.log(v) / n)), dtype=float)


def _choose(method: str, cells: float) -> str:
    if method == "auto":
        return "brute" if cells <= BRUTE_FORCE_LIMIT else "maxlaw"
    if method not in ("brute", "maxlaw"):
        raise ValueError(f"unknown method {method!r}")
    return method


def mc_comparison_prob(
    dist1: ArmDistribution,
    dist2: ArmDistribution,
    n: int,
    b: int,
    q: float,
    reps: int,
    seed: int,
    method: str = "auto",
) -> tuple[float, float]:
    """Monte Carlo ``P(QoMax_1 <= QoMax_2)`` with its binomial standard error.

    ``method="brute"`` draws every raw sample; ``"maxlaw"`` draws each batch
    maximum from its exact law, which is what makes n = 10^4 with 10^5
    replications tractable. ``"auto"`` picks brute force when it needs at most
    ``BRUTE_FORCE_LIMIT`` draws per distribution.
    """
    method = _choose(method, float(n) * b * reps)
    rng1, rng2 = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2))
    rank = _rank(b, q)
    rows = max(1, _CHUNK_CELLS // (n * b)) if method == "brute" else max(1, _CHUNK_CELLS // b)
    failures, done = 0, 0
    while done < reps:
        m = min(rows, reps - done)
        q1 = np.sort(_batch_maxima(dist1, rng1, n, (m, b), method), axis=1)[:, rank - 1]
        q2 = np.sort(_batch_maxima(dist2, rng2, n, (m, b), method), axis=1)[:, rank - 1]
        failures += int(np.count_nonzero(q1 <= q2))
        done += m
    p = failures / reps
    return p, math.sqrt(p * (1.0 - p) / reps)


def mc_max_samples(dist: ArmDistribution, horizon: int, reps: int, seed: int, method: str = "brute") -> np.ndarray:
    """``reps`` independent maxima of ``horizon`` draws."""
    method = _choose(method, float(horizon) * reps)
    rng = np.random.default_rng(seed)
    rows = max(1, _CHUNK_CELLS // horizon) if method == "brute" else reps
    out = np.empty(reps)
    for start in range(0, reps, rows):
        m = min(rows, reps - start)
        out[start:start + m] = _batch_maxima(dist, rng, horizon, (m,), method)
    return out


def mc_expected_max(dist: ArmDistribution, horizon: int, reps: int, seed: int, method: str = "brute") -> float:
    """Monte Carlo mean of the maximum of ``horizon`` draws."""
    return float(mc_max_samples(dist, horizon, reps, seed, method).mean())
