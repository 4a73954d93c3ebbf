from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from fpa_learning.auction import expected_utility
from fpa_learning.consts import EXACT_HORIZON
from fpa_learning.exceptions import DomainError
from fpa_learning.types import BidProfile, ValueProfile

INT64_MAX = int(np.iinfo(np.int64).max)


@dataclass(frozen=True, eq=False)
class BidderView:
    """
    What a learner sees before round t + 1: the cumulative counterfactual rewards of each of
    its bids over the first `t` rounds, multiplied by `scale`.
    """

    t: int
    sums: np.ndarray
    scale: int = 1

    @property
    def size(self) -> int:
        return len(self.sums)

    @property
    def alpha(self) -> np.ndarray:
        """Average reward per bid, zero before the first round"""
        if self.t == 0:
            return np.zeros(self.size)
        return np.asarray(self.sums / (self.scale * self.t), dtype=float)

    @property
    def cumulative(self) -> np.ndarray:
        return np.asarray(self.sums / self.scale, dtype=float)

    def alpha_exact(self):
        if self.t == 0:
            return [Fraction(0)] * self.size
        return [Fraction(int(total), self.scale * self.t) for total in self.sums]

    def leaders(self) -> np.ndarray:
        """Bids attaining the highest average reward, ascending"""
        return np.flatnonzero(self.sums == self.sums.max())


def counter_dtype(values: ValueProfile, horizon) -> type:
    """
    int64 when the scaled reward sums of `horizon` rounds fit in 64 bits, Python ints
    (object arrays) otherwise. lcm(1..N) passes 2**63 around N = 43.
    """

    if values.scale * values.cap * max(horizon, 1) <= INT64_MAX:
        return np.int64
    return object


class HistoryStats:
    """
    Per-bidder statistics of the history of a repeated auction.

    Every quantity is kept as an integer count. Counterfactual rewards are multiples of
    1/scale with scale = lcm(1..N), so `reward_sums` and `tie_mass` store them multiplied by
    scale and stay exact. For bidder i after t rounds:

    * alpha(b) = reward_sums[i][b] / (scale * t)
    * P(k) = max_counts[i][k] / t, where k is the highest opponent bid
    * Q(k) = tie_mass[i][k] / (scale * t), the tie-weighted winning mass of bidding k
    * f(b) = bid_counts[i][b] / t

    The scaled sums are int64 when `horizon` rounds cannot overflow them and Python ints
    otherwise. A HistoryStats is owned by a single run and is updated in place.
    """

    def __init__(self, values: ValueProfile, horizon: Optional[int] = None):
        self.values = values
        self.scale = values.scale
        self.horizon = EXACT_HORIZON if horizon is None else int(horizon)
        self.dtype = counter_dtype(values, self.horizon)
        self.t = 0

        levels = values.cap
        self._payoffs = [
            np.array([(value - bid) * self.scale for bid in range(value)], dtype=self.dtype)
            for value in values.values
        ]
        self.reward_sums = [np.zeros(value, dtype=self.dtype) for value in values.values]
        self.max_counts = [np.zeros(levels, dtype=np.int64) for _ in values.values]
        self.tie_mass = [np.zeros(levels, dtype=self.dtype) for _ in values.values]
        self.bid_counts = [np.zeros(value, dtype=np.int64) for value in values.values]

        self._read_only = []
        for sums in self.reward_sums:
            view = sums.view()
            view.flags.writeable = False
            self._read_only.append(view)

    def update(self, bids: Sequence[int]):
        """Fold one round into the statistics. `bids` must already be valid for the values."""

        if self.t >= self.horizon:
            raise DomainError(f"The statistics were sized for {self.horizon} rounds.")

        if not isinstance(bids, list):
            bids = list(bids)

        top = max(bids)
        top_count = bids.count(top)
        lower = [bid for bid in bids if bid != top]
        second = max(lower) if lower else -1
        second_count = lower.count(second)

        for i, bid in enumerate(bids):
            if bid != top:
                level, at_level = top, top_count
            elif top_count > 1:
                level, at_level = top, top_count - 1
            else:
                level, at_level = second, second_count

            self.max_counts[i][level] += 1
            self.tie_mass[i][level] += self.scale // (at_level + 1)
            self.bid_counts[i][bid] += 1

            sums = self.reward_sums[i]
            payoffs = self._payoffs[i]
            if level + 1 < sums.size:
                sums[level + 1:] += payoffs[level + 1:]
            if level < sums.size:
                sums[level] += payoffs[level] // (at_level + 1)

        self.t += 1
        return self

    def view(self, i) -> BidderView:
        return BidderView(self.t, self._read_only[i], self.scale)

    def alpha(self, i) -> np.ndarray:
        return self.view(i).alpha

    def alpha_exact(self, i):
        return self.view(i).alpha_exact()

    def _ratio(self, counts, denominator):
        if self.t == 0:
            return np.zeros(counts.size)
        return np.asarray(counts / (denominator * self.t), dtype=float)

    def _ratio_exact(self, counts, denominator):
        if self.t == 0:
            return [Fraction(0)] * counts.size
        return [Fraction(int(count), denominator * self.t) for count in counts]

    def opponent_max_frequencies(self, i, exact=False):
        """P_t^i(k) for k = 0..V-1"""
        if exact:
            return self._ratio_exact(self.max_counts[i], 1)
        return self._ratio(self.max_counts[i], 1)

    def tie_weighted_wins(self, i, exact=False):
        """Q_t^i(k) for k = 0..V-1"""
        if exact:
            return self._ratio_exact(self.tie_mass[i], self.scale)
        return self._ratio(self.tie_mass[i], self.scale)

    def frequencies(self, i, exact=False):
        """f_t^i(b) for b in the bid set of bidder i"""
        if exact:
            return self._ratio_exact(self.bid_counts[i], 1)
        return self._ratio(self.bid_counts[i], 1)

    def exact_snapshot(self):
        return {
            "t": self.t,
            "alpha": [self.alpha_exact(i) for i in range(self.values.n)],
            "P": [self.opponent_max_frequencies(i, exact=True) for i in range(self.values.n)],
            "Q": [self.tie_weighted_wins(i, exact=True) for i in range(self.values.n)],
            "f": [self.frequencies(i, exact=True) for i in range(self.values.n)],
        }

    def summary(self):
        return {
            "t": self.t,
            "alpha": [self.alpha(i).tolist() for i in range(self.values.n)],
            "P": [self.opponent_max_frequencies(i).tolist() for i in range(self.values.n)],
            "Q": [self.tie_weighted_wins(i).tolist() for i in range(self.values.n)],
            "f": [self.frequencies(i).tolist() for i in range(self.values.n)],
        }

    @classmethod
    def from_trace(cls, values: ValueProfile, trace) -> "HistoryStats":
        stats = cls(values)
        for bids in trace:
            stats.update([int(bid) for bid in bids])
        return stats


def update_stats(stats: HistoryStats, profile, values: ValueProfile) -> HistoryStats:
    """Validate `profile` against `values` and fold it into `stats` (in place, returned for chaining)"""

    if stats.values != values:
        raise DomainError("The statistics were built for a different value profile.")

    profile = BidProfile.for_values(profile, values)
    return stats.update(list(profile.bids))


def recompute_statistics(values: ValueProfile, trace):
    """
    Recompute alpha, P, Q and f directly from their definitions over the whole trace, in exact
    arithmetic. Used as the reference for the incremental `HistoryStats`.
    """

    n = values.n
    t = len(trace)
    alpha = [[Fraction(0)] * value for value in values.values]
    P = [[Fraction(0)] * values.cap for _ in range(n)]
    Q = [[Fraction(0)] * values.cap for _ in range(n)]
    f = [[Fraction(0)] * value for value in values.values]

    for bids in trace:
        bids = tuple(int(bid) for bid in bids)
        for i in range(n):
            others = bids[:i] + bids[i + 1:]
            level = max(others)
            ties = sum(1 for bid in others if bid == level)

            for b in values.bid_set(i):
                alpha[i][b] += expected_utility(i, b, others, values)
            P[i][level] += 1
            Q[i][level] += Fraction(1, ties + 1)
            f[i][bids[i]] += 1

    if t:
        for table in (alpha, P, Q, f):
            for row in table:
                for k in range(len(row)):
                    row[k] = row[k] / t

    return {"t": t, "alpha": alpha, "P": P, "Q": Q, "f": f}
