"""Distribution-free baselines: ThresholdAscent, MaxMedian and round-robin."""
from __future__ import annotations

import heapq
import math
from bisect import insort
from typing import Sequence


def chernoff_index(mu: float, n: int, alpha: float) -> float:
    """Upper confidence bound ``mu + (alpha + sqrt(2 n mu alpha + alpha^2)) / n``."""
    return mu + (alpha + math.sqrt(2.0 * n * mu * alpha + alpha * alpha)) / n


def threshold_ascent_select(above: Sequence[int], pulls: Sequence[int], delta: float) -> int:
    """Arm maximizing the Chernoff index of its share of the top-s rewards.

    ``above[i]`` is the number of arm ``i`` rewards among the s largest seen so
    far, ``pulls[i]`` its pull count (all >= 1). Ties go to the lowest index.
    """
    k = len(pulls)
    alpha = math.log(2.0 * sum(pulls) * k / delta)
    best, best_value = 0, -math.inf
    for i in range(k):
        value = chernoff_index(above[i] / pulls[i], pulls[i], alpha)
        if value > best_value:
            best, best_value = i, value
    return best


class ThresholdAscent:
    """Pull the arm whose rewards most often land among the s largest overall."""

    name = "threshold-ascent"

    def __init__(self, n_arms: int, s: int = 100, delta: float = 0.1):
        if s < 1:
            raise ValueError("s must be >= 1")
        if not 0.0 < delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        self.n_arms = n_arms
        self.s = int(s)
        self.delta = delta
        self.top: list[tuple[float, int]] = []  # min-heap of (reward, arm)
        self.above = [0] * n_arms
        self.pulls = [0] * n_arms

    def select(self) -> int:
        t = sum(self.pulls)
        if t < self.n_arms:
            return t
        return threshold_ascent_select(self.above, self.pulls, self.delta)

    def observe(self, arm: int, reward: float) -> None:
        self.pulls[arm] += 1
        if len(self.top) < self.s:
            heapq.heappush(self.top, (reward, arm))
            self.above[arm] += 1
        elif reward > self.top[0][0]:
            _, dropped = heapq.heapreplace(self.top, (reward, arm))
            self.above[dropped] -= 1
            self.above[arm] += 1

    def run(self, bandit) -> int:
        while not bandit.exhausted:
            arm = self.select()
            self.observe(arm, bandit.pull_one(arm))
        return len(self.top)


def max_median_index(sorted_rewards: Sequence[Sequence[float]]) -> int:
    """Greedy MaxMedian choice from ascending per-arm reward lists (all non-empty).

    With ``m`` the smallest pull count, arm ``i`` is scored by its
    ``floor(N_i / m)``-th largest reward. Ties go to the lowest index.
    """
    m = min(len(r) for r in sorted_rewards)
    best, best_value = 0, -math.inf
    for i, rewards in enumerate(sorted_rewards):
        size = len(rewards)
        value = rewards[size - size // m]
        if value > best_value:
            best, best_value = i, value
    return best


class MaxMedian:
    """Epsilon-greedy on an order statistic matched to the least-pulled arm.

    Exploration probability is ``1 / (t + 1)`` with ``t`` the pulls so far.
    """

    name = "max-median"

    def __init__(self, n_arms: int):
        self.n_arms = n_arms
        self.rewards: list[list[float]] = [[] for _ in range(n_arms)]
        self.t = 0

    def select(self, rng) -> int:
        if self.t < self.n_arms:
            return self.t
        if rng.random() < 1.0 / (self.t + 1):
            return int(rng.integers(self.n_arms))
        return max_median_index(self.rewards)

    def observe(self, arm: int, reward: float) -> None:
        insort(self.rewards[arm], reward)
        self.t += 1

    def run(self, bandit) -> int:
        while not bandit.exhausted:
            arm = self.select(bandit.policy_rng)
            self.observe(arm, bandit.pull_one(arm))
        return self.t


def uniform_select(round_: int, n_arms: int) -> int:
    """Round-robin arm (0-based) for round ``round_`` (0-based)."""
    return round_ % n_arms


class Uniform:
    """Round-robin over the arms."""

    name = "uniform"

    def __init__(self, n_arms: int):
        self.n_arms = n_arms

    def run(self, bandit) -> int:
        # arm k gets every K-th pull starting at k; streams are per arm, so the
        # rewards match a pull-by-pull loop
        base, extra = divmod(bandit.remaining, self.n_arms)
        for arm in range(self.n_arms):
            bandit.pull(arm, base + (arm < extra))
        return 0
