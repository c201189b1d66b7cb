"""QoMax Explore-Then-Commit."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..errors import HorizonTooSmall
from ..qomax import qomax_of_maxima


def etc_exploration_lengths(horizon: int, n_arms: int) -> tuple[int, int]:
    """Recommended batch size ``ceil(log T)`` and batch count ``ceil(log(T)^2)``.

    Raises HorizonTooSmall when the ``K * n_T * b_T`` exploration pulls do not fit.
    """
    log_t = math.log(horizon)
    n_t = max(1, math.ceil(log_t))
    b_t = max(1, math.ceil(log_t**2))
    if n_arms * n_t * b_t > horizon:
        raise HorizonTooSmall(
            f"exploration needs {n_arms}*{n_t}*{b_t}={n_arms * n_t * b_t} pulls > horizon {horizon}"
        )
    return n_t, b_t


def fit_exploration_lengths(horizon: int, n_arms: int) -> tuple[int, int]:
    """Like :func:`etc_exploration_lengths`, shrinking ``b_T`` when the horizon is short.

    On overflow ``n_T`` is kept and ``b_T`` becomes the largest value with
    ``K * n_T * b_T <= T / 2``.
    """
    try:
        return etc_exploration_lengths(horizon, n_arms)
    except HorizonTooSmall:
        n_t = max(1, math.ceil(math.log(horizon)))
        b_t = (horizon // 2) // (n_arms * n_t)
        if b_t < 1:
            raise
        return n_t, b_t


def etc_commit(maxima_per_arm: Sequence[Sequence[float]], q: float) -> int:
    """Arm (0-based) with the largest QoMax; ties go to the lowest index."""
    best, best_value = 0, -math.inf
    for arm, maxima in enumerate(maxima_per_arm):
        value = qomax_of_maxima(maxima, q)
        if value > best_value:
            best, best_value = arm, value
    return best


class QoMaxETC:
    """Pull every arm ``n_T * b_T`` times, then commit to the largest QoMax.

    ``n_batch`` / ``n_batches`` override the horizon-based tuning; when omitted
    they come from :func:`fit_exploration_lengths`.
    """

    name = "qomax-etc"

    def __init__(self, n_arms: int, q: float = 0.5, n_batch: int | None = None, n_batches: int | None = None):
        self.n_arms = n_arms
        self.q = q
        self.n_batch = n_batch
        self.n_batches = n_batches
        self.committed: int | None = None
        self.batch_maxima: list[np.ndarray] = []

    def lengths(self, horizon: int) -> tuple[int, int]:
        if self.n_batch is None or self.n_batches is None:
            n_t, b_t = fit_exploration_lengths(horizon, self.n_arms)
        else:
            n_t, b_t = self.n_batch, self.n_batches
        n_t = self.n_batch or n_t
        b_t = self.n_batches or b_t
        if self.n_arms * n_t * b_t > horizon:
            raise HorizonTooSmall(f"exploration needs {self.n_arms * n_t * b_t} pulls > horizon {horizon}")
        return n_t, b_t

    def run(self, bandit) -> int:
        n_t, b_t = self.lengths(bandit.horizon)
        self.batch_maxima = []
        for arm in range(self.n_arms):
            x = bandit.pull(arm, n_t * b_t)
            self.batch_maxima.append(x.reshape(b_t, n_t).max(axis=1))
        self.committed = etc_commit(self.batch_maxima, self.q)
        while not bandit.exhausted:
            bandit.pull(self.committed, bandit.remaining)
        return self.n_arms * b_t
