"""
QoMax-SDA: subsampling duels between the most-queried arm and the challengers.

Each round has three steps. The leader is the arm with the most queries. Every
challenger then duels it: the challenger's QoMax over its whole history against
the leader's QoMax over the leader's last ``n_k`` queries and first ``b_k``
batches. Challengers that win, or whose query count is below the forced
exploration level ``f(r) = log(r)^(1/gamma)``, are queried; if none is, the
leader is. Querying an arm adds one sample to each of its batches, then
challengers grow to ``ceil(n^gamma)`` batches while the leader only grows to
match the largest challenger batch count.
"""
from __future__ import annotations

import math

from ..qomax import ArmHistory, qomax_full, qomax_subsample


def forced_exploration(round_: int, gamma: float) -> float:
    """Sampling obligation ``log(r)^(1/gamma)``; 0 at r = 1."""
    return math.log(round_) ** (1.0 / gamma) if round_ > 1 else 0.0


def batch_target(queries: int, gamma: float) -> int:
    """``ceil(n^gamma)``, robust to float noise on perfect powers (27^(2/3) = 9)."""
    if queries <= 0:
        return 0
    return math.ceil(queries**gamma - 1e-9)


class QoMaxSDA:
    """Anytime QoMax-SDA policy.

    Arms are 0-based. ``round`` counts completed or in-progress rounds, the
    first round pulls every arm once.
    """

    name = "qomax-sda"

    def __init__(self, n_arms: int, q: float = 0.5, gamma: float = 2.0 / 3.0):
        if not 0.0 < gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
        self.n_arms = n_arms
        self.q = q
        self.gamma = gamma
        self.round = 0
        self.last_leader: int | None = None
        self.histories = [ArmHistory(arm_id=k) for k in range(n_arms)]
        self.peak_cells = 0
        self._cells = [0] * n_arms
        self._full_cache: list[float | None] = [None] * n_arms

    # -- statistics ---------------------------------------------------------

    def full_qomax(self, arm: int) -> float:
        value = self._full_cache[arm]
        if value is None:
            value = qomax_full(self.histories[arm], self.q)
            self._full_cache[arm] = value
        return value

    def leader(self) -> int:
        """Most-queried arm; ties go to the larger QoMax, then the lowest index."""
        queries = [h.queries for h in self.histories]
        top = max(queries)
        tied = [k for k, n in enumerate(queries) if n == top]
        if len(tied) == 1:
            return tied[0]
        best, best_value = tied[0], -math.inf
        for k in tied:
            value = self.full_qomax(k) if self.histories[k].batches else -math.inf
            if value > best_value:
                best, best_value = k, value
        return best

    def duel(self, challenger: int, leader: int) -> int:
        """Winner of the challenger/leader comparison; the leader keeps ties."""
        ch = self.histories[challenger]
        challenger_value = self.full_qomax(challenger)
        leader_value = qomax_subsample(self.histories[leader], ch.queries, ch.n_batches, self.q)
        return challenger if challenger_value > leader_value else leader

    def round_arms(self, leader: int) -> list[int]:
        """Arms to query at the end of the current round."""
        if self.round <= 1:
            return list(range(self.n_arms))
        level = forced_exploration(self.round, self.gamma)
        chosen = [
            k for k in range(self.n_arms)
            if k != leader and (self.histories[k].queries < level or self.duel(k, leader) == k)
        ]
        return chosen or [leader]

    # -- data collection ----------------------------------------------------

    def collect_data(self, bandit, arm: int, queried: bool, is_leader: bool) -> int:
        """Query ``arm`` (if ``queried``) and grow its batches; returns the samples drawn.

        Stops as soon as the bandit budget is exhausted. A batch or query cut
        short by the horizon is not added to the history, but its rewards were
        still observed and count towards the pulls and the maximum.
        """
        h = self.histories[arm]
        drawn = 0
        self._full_cache[arm] = None
        if queried:
            b = h.n_batches
            x = bandit.pull(arm, b) if b else ()
            drawn += len(x)
            if len(x) < b:
                return drawn
            h.add_query(x)
        if is_leader:
            others = [self.histories[k].n_batches for k in range(self.n_arms) if k != arm]
            target = max(max(others, default=0), 1)
        else:
            target = batch_target(h.queries, self.gamma)
        while h.n_batches < target:
            x = bandit.pull(arm, h.queries)
            drawn += len(x)
            if len(x) < h.queries:
                break
            h.add_batch(x)
        self._cells[arm] = h.memory_cells()
        self.peak_cells = max(self.peak_cells, sum(self._cells))
        return drawn

    def step(self, bandit) -> list[int]:
        """Play one round; returns the arms that were queried."""
        self.round += 1
        if self.round == 1:
            leader = 0
        else:
            leader = self.leader()
            # a leader that just took over may have fewer batches than some challenger
            if any(h.n_batches > self.histories[leader].n_batches for h in self.histories):
                self.collect_data(bandit, leader, queried=False, is_leader=True)
                if bandit.exhausted:
                    return []
        self.last_leader = leader
        arms = self.round_arms(leader)
        for k in arms:
            if k != leader:
                self.collect_data(bandit, k, queried=True, is_leader=False)
                if bandit.exhausted:
                    return arms
        self.collect_data(bandit, leader, queried=leader in arms, is_leader=True)
        return arms

    def run(self, bandit) -> int:
        while not bandit.exhausted:
            self.step(bandit)
        return self.peak_cells
