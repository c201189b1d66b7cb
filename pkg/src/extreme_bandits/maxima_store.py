"""
Compressed history of one batch: the "rolling maxima" list.

Only samples that are strictly larger than every later sample are kept, so the
stored values are strictly decreasing while their query indices increase. That
is all that is needed to answer "max over the queries after c" for any cutoff c,
and an i.i.d. stream of length N keeps on average H_N = 1 + 1/2 + ... + 1/N
entries.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyRecord, EmptySuffix, OutOfOrderIndex


class MaxRecord:
    """Strictly decreasing maxima with their (1-based) query indices.

    Values are stored negated so that the list is ascending and ``bisect`` can
    locate the truncation point directly.
    """

    __slots__ = ("indices", "_neg")

    def __init__(self, indices: Iterable[int] = (), values: Iterable[float] = ()):
        self.indices: list[int] = []
        self._neg: list[float] = []
        for i, x in zip(indices, values, strict=True):
            self.efficient_update(i, x)

    @classmethod
    def from_sequence(cls, values: Sequence[float], start: int = 1) -> "MaxRecord":
        """Build the record of ``values`` inserted at indices ``start, start+1, ...``.

        Vectorized equivalent of calling :meth:`efficient_update` on every value in
        order: a value survives iff it is strictly larger than everything after it.
        """
        x = np.asarray(values, dtype=float)
        rec = cls()
        if x.size == 0:
            return rec
        later_max = np.empty_like(x)
        later_max[-1] = -np.inf
        later_max[:-1] = np.maximum.accumulate(x[::-1])[::-1][1:]
        keep = np.flatnonzero(x > later_max)
        rec.indices = (keep + start).tolist()
        rec._neg = (-x[keep]).tolist()
        return rec

    @property
    def values(self) -> list[float]:
        return [-v for v in self._neg]

    def efficient_update(self, index: int, value: float) -> "MaxRecord":
        """Insert a new sample, dropping every stored value that is <= ``value``."""
        if self.indices and index <= self.indices[-1]:
            raise OutOfOrderIndex(f"index {index} is not after last stored index {self.indices[-1]}")
        # number of stored values strictly greater than `value`
        keep = bisect_left(self._neg, -value)
        if keep < len(self._neg):
            del self._neg[keep:]
            del self.indices[keep:]
        self._neg.append(-value)
        self.indices.append(index)
        return self

    def suffix_max(self, cutoff: int) -> float:
        """Maximum over all samples inserted with query index > ``cutoff``."""
        pos = bisect_right(self.indices, cutoff)
        if pos == len(self.indices):
            raise EmptySuffix(f"no sample with index > {cutoff}")
        return -self._neg[pos]

    def batch_max(self) -> float:
        if not self._neg:
            raise EmptyRecord("batch_max of an empty record")
        return -self._neg[0]

    def memory_cells(self) -> int:
        return len(self._neg)

    def __len__(self) -> int:
        return len(self._neg)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MaxRecord):
            return NotImplemented
        return self.indices == other.indices and self._neg == other._neg

    def __repr__(self) -> str:
        return f"MaxRecord(indices={self.indices}, values={self.values})"


def efficient_update(record: MaxRecord, index: int, value: float) -> MaxRecord:
    return record.efficient_update(index, value)


def suffix_max(record: MaxRecord, cutoff: int) -> float:
    return record.suffix_max(cutoff)


def batch_max(record: MaxRecord) -> float:
    return record.batch_max()


def memory_cells(record: MaxRecord) -> int:
    return record.memory_cells()
