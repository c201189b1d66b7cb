"""Quantile-of-Maxima estimator over compressed arm histories."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import EmptyHistory, EmptyInput, InvalidQuantile, SubsampleTooLarge
from .maxima_store import MaxRecord


@lru_cache(maxsize=4096)
def quantile_rank(size: int, q: float) -> int:
    """1-based rank ``ceil(size * q)`` used for the quantile of ``size`` sorted values.

    When ``q`` is a short decimal (0.5, 0.9, ...) the product is evaluated exactly
    so that e.g. ``10 * 0.9`` gives rank 9 and not 10; otherwise the float product
    is nudged down by 1e-9 before taking the ceiling.
    """
    if not 0.0 < q < 1.0:
        raise InvalidQuantile(f"quantile must lie in (0, 1), got {q}")
    exact = Fraction(q).limit_denominator(10**6)
    if abs(float(exact) - q) < 1e-15:
        rank = math.ceil(exact * size)
    else:
        rank = math.ceil(size * q - 1e-9)
    return min(max(rank, 1), size)


def qomax_of_maxima(maxima: Sequence[float], q: float) -> float:
    """Element of rank ``ceil(b q)`` (1-based, ascending) among ``b`` batch maxima."""
    if len(maxima) == 0:
        raise EmptyInput("QoMax of an empty list")
    rank = quantile_rank(len(maxima), q)
    return sorted(maxima)[rank - 1]


@dataclass
class ArmHistory:
    """Samples of one arm, organised as ``len(batches)`` batches of ``queries`` samples.

    Each query adds one sample to every existing batch; a new batch is created
    with as many samples as there have been queries, so all batches always have
    the same size.
    """

    arm_id: int = 0
    queries: int = 0
    batches: list[MaxRecord] = field(default_factory=list)

    @property
    def n_batches(self) -> int:
        return len(self.batches)

    def add_query(self, samples: Sequence[float]) -> None:
        """Append the next query: ``samples[j]`` goes to batch ``j``."""
        if len(samples) != len(self.batches):
            raise ValueError(f"expected {len(self.batches)} samples, got {len(samples)}")
        self.queries += 1
        n = self.queries
        for record, x in zip(self.batches, samples):
            record.efficient_update(n, float(x))

    def add_batch(self, samples: Sequence[float]) -> None:
        """Append a new batch filled with one sample per past query."""
        if len(samples) != self.queries:
            raise ValueError(f"a new batch needs {self.queries} samples, got {len(samples)}")
        self.batches.append(MaxRecord.from_sequence(samples))

    def batch_maxima(self) -> list[float]:
        return [record.batch_max() for record in self.batches]

    def memory_cells(self) -> int:
        return sum(len(record) for record in self.batches)


def qomax_full(history: ArmHistory, q: float) -> float:
    """QoMax over every batch of the arm."""
    if not history.batches:
        raise EmptyHistory(f"arm {history.arm_id} has no batches")
    return qomax_of_maxima(history.batch_maxima(), q)


def qomax_subsample(leader: ArmHistory, n_sub: int, b_sub: int, q: float) -> float:
    """QoMax of the leader restricted to its last ``n_sub`` queries and first ``b_sub`` batches."""
    if n_sub > leader.queries or b_sub > leader.n_batches:
        raise SubsampleTooLarge(
            f"subsample {n_sub}x{b_sub} exceeds leader history {leader.queries}x{leader.n_batches}"
        )
    if n_sub < 1 or b_sub < 1:
        raise EmptyInput("subsample must contain at least one query and one batch")
    cutoff = leader.queries - n_sub
    maxima = [record.suffix_max(cutoff) for record in leader.batches[:b_sub]]
    return qomax_of_maxima(maxima, q)
