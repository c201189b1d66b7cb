"""Lazily drawn reward tables with horizon accounting."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .distributions import ArmDistribution

_CHUNK = 2048


class RewardStream:
    """Sequential i.i.d. draws from one arm, generated in vectorized chunks.

    Every draw is consumed exactly once, in order, which realises the infinite
    reward table ``X_{k,1}, X_{k,2}, ...`` of an arm on demand.
    """

    def __init__(self, dist: ArmDistribution, rng: np.random.Generator, chunk: int = _CHUNK):
        self.dist = dist
        self.rng = rng
        self.chunk = chunk
        self._buf = np.empty(0)
        self._pos = 0

    def take(self, m: int) -> np.ndarray:
        avail = self._buf.size - self._pos
        if m <= avail:
            out = self._buf[self._pos:self._pos + m]
            self._pos += m
            return out
        head = self._buf[self._pos:]
        need = m - avail
        if need >= self.chunk:
            self._buf, self._pos = np.empty(0), 0
            return np.concatenate([head, self.dist.sample(self.rng, need)])
        self._buf = self.dist.sample(self.rng, self.chunk)
        self._pos = need
        return np.concatenate([head, self._buf[:need]])

    def next(self) -> float:
        if self._pos >= self._buf.size:
            self._buf = self.dist.sample(self.rng, self.chunk)
            self._pos = 0
        x = self._buf[self._pos]
        self._pos += 1
        return float(x)


class Bandit:
    """K reward streams sharing a budget of ``horizon`` observations.

    ``pull(arm, m)`` returns at most ``m`` fresh rewards; fewer once the budget
    runs out. Pull counts and the running maximum cover every returned reward.

    Seeding: the trajectory seed spawns one child stream per arm plus one for
    the policy's own randomness, so the reward table of an arm does not depend
    on the order in which a policy visits the arms.
    """

    def __init__(self, arms: Sequence[ArmDistribution], horizon: int, seed):
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        children = seq.spawn(len(arms) + 1)
        self.arms = list(arms)
        self.horizon = horizon
        self.streams = [RewardStream(d, np.random.default_rng(c)) for d, c in zip(arms, children)]
        self.policy_rng = np.random.default_rng(children[-1])
        self.pulls = [0] * len(arms)
        self.remaining = horizon
        self.max_reward = -math.inf

    @property
    def n_arms(self) -> int:
        return len(self.arms)

    @property
    def exhausted(self) -> bool:
        return self.remaining <= 0

    def pull(self, arm: int, m: int = 1) -> np.ndarray:
        m = min(m, self.remaining)
        if m <= 0:
            return np.empty(0)
        x = self.streams[arm].take(m)
        self.remaining -= m
        self.pulls[arm] += m
        top = float(x.max())
        if top > self.max_reward:
            self.max_reward = top
        return x

    def pull_one(self, arm: int) -> float:
        """Single reward; the caller must check ``exhausted`` first."""
        if self.remaining <= 0:
            raise RuntimeError("budget exhausted")
        x = self.streams[arm].next()
        self.remaining -= 1
        self.pulls[arm] += 1
        if x > self.max_reward:
            self.max_reward = x
        return x
