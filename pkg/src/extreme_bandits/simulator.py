"""Single-trajectory execution and the across-trajectory metrics."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .distributions import ArmDistribution, expected_max_approx, per_quantile
from .environment import Bandit
from .errors import EmptyInput
from .policies import PolicySpec
from .qomax import quantile_rank

QUANTILE_LEVELS = (0.01, 0.10, 0.25, 0.50, 0.75, 0.90, 0.99)


@dataclass(frozen=True)
class TrajectoryResult:
    pulls_per_arm: tuple[int, ...]
    best_arm_fraction: float
    max_reward: float
    peak_memory_cells: int
    seed: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pulls_per_arm"] = list(self.pulls_per_arm)
        return d


def run_trajectory(
    arms: Sequence[ArmDistribution],
    policy: PolicySpec | str,
    horizon: int,
    seed: int,
    dominant: int = 0,
) -> TrajectoryResult:
    """Play ``policy`` for ``horizon`` pulls; ``dominant`` is the 0-based best arm."""
    if isinstance(policy, str):
        policy = PolicySpec.parse(policy)
    if horizon < len(arms):
        raise ValueError(f"horizon {horizon} is smaller than the number of arms {len(arms)}")
    bandit = Bandit(arms, horizon, seed)
    peak = policy.build(len(arms)).run(bandit)
    return TrajectoryResult(
        pulls_per_arm=tuple(bandit.pulls),
        best_arm_fraction=bandit.pulls[dominant] / horizon,
        max_reward=bandit.max_reward,
        peak_memory_cells=int(peak),
        seed=int(seed),
    )


def empirical_quantile(values: Sequence[float], q: float) -> float:
    """Element of rank ``ceil(N q)`` (1-based) of the ascending sample."""
    if len(values) == 0:
        raise EmptyInput("quantile of an empty sample")
    ordered = np.sort(np.asarray(values, dtype=float))
    return float(ordered[quantile_rank(len(ordered), q) - 1])


def proxy_empirical_regret(max_rewards: Sequence[float], dominant: ArmDistribution, horizon: int) -> float:
    """``(E - X) / E`` with ``E`` the dominant arm's expected maximum over ``horizon``
    pulls and ``X`` the empirical quantile, at the matching level, of the
    per-trajectory maxima."""
    expected = expected_max_approx(dominant, horizon)
    level = per_quantile(dominant, horizon)
    return (expected - empirical_quantile(max_rewards, level)) / expected


@dataclass(frozen=True)
class MetricsSummary:
    n_trajectories: int
    mean_best_arm_fraction: float
    pull_quantiles: tuple[float, ...]
    max_quantiles: tuple[float, ...]
    per: float | None
    levels: tuple[float, ...] = QUANTILE_LEVELS


def summarize(
    results: Sequence[TrajectoryResult],
    dominant_dist: ArmDistribution | None = None,
    horizon: int | None = None,
    levels: Sequence[float] = QUANTILE_LEVELS,
) -> MetricsSummary:
    """Aggregate trajectories; PER is computed only when ``dominant_dist`` and ``horizon`` are given."""
    if not results:
        raise EmptyInput("no trajectories to summarize")
    fractions = [r.best_arm_fraction for r in results]
    maxima = [r.max_reward for r in results]
    per = None
    if dominant_dist is not None and horizon is not None:
        per = proxy_empirical_regret(maxima, dominant_dist, horizon)
    return MetricsSummary(
        n_trajectories=len(results),
        mean_best_arm_fraction=math.fsum(fractions) / len(fractions),
        pull_quantiles=tuple(empirical_quantile(fractions, q) for q in levels),
        max_quantiles=tuple(empirical_quantile(maxima, q) for q in levels),
        per=per,
        levels=tuple(levels),
    )
