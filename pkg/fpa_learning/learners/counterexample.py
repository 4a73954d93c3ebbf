import logging
import warnings
from dataclasses import dataclass, replace
from functools import cached_property, lru_cache

import numpy as np

from fpa_learning.consts import LEARNER_COUNTEREXAMPLE
from fpa_learning.exceptions import ConfigurationError, TheoryBoundWarning
from fpa_learning.learners.core import MeanBasedLearner, TieBreak, cached_point_mass, resolve_tie
from fpa_learning.learners.schedules import CounterexampleGamma, epoch_lengths_satisfy_theory, integer_ceil_root
from fpa_learning.signals import epoch_boundary
from fpa_learning.stats import BidderView
from fpa_learning.types import MixedStrategy

logger = logging.getLogger(__name__)

EPOCH_GROWTH = 32
COUNTEREXAMPLE_VALUE = 3


@dataclass(frozen=True)
class CounterexampleState:
    """
    Epoch bookkeeping of the counterexample learner. Epoch k covers the rounds
    32^k * T0 + 1 .. 32^(k + 1) * T0; before that come T0 - ceil(T0^(2/3)) rounds of bid 1
    and ceil(T0^(2/3)) rounds of bid 0.
    """

    t0: int
    epoch: int = 0

    def __post_init__(self):
        if self.t0 < 4:
            raise ConfigurationError(f"The counterexample learner needs T0 >= 4, got {self.t0}.")

    def boundary(self, k) -> int:
        """T_k = 32^k * T0"""
        return EPOCH_GROWTH ** k * self.t0

    @cached_property
    def warmup(self) -> int:
        return self.t0 - integer_ceil_root(self.t0, 2, 3)

    def advance(self, t) -> "CounterexampleState":
        epoch = self.epoch
        while t > self.boundary(epoch + 1):
            epoch += 1
        if epoch == self.epoch:
            return self
        return replace(self, epoch=epoch)

    def boundaries(self, t_max):
        """Every epoch start 32^k * T0 + 1 that is at most t_max"""
        result = []
        k = 0
        while self.boundary(k) + 1 <= t_max:
            result.append(self.boundary(k) + 1)
            k += 1
        return result


@lru_cache(maxsize=None)
def _epoch_strategy(leader, next_boundary) -> MixedStrategy:
    rho = next_boundary ** (-1 / 3)
    probs = np.zeros(COUNTEREXAMPLE_VALUE)
    probs[leader] += 1.0 - rho
    probs[0] += rho
    return MixedStrategy(probs)


def counterexample_policy(state: CounterexampleState, t, view: BidderView, gamma_t, cap, tiebreak=TieBreak.LOWEST):
    """
    The mean-based bidder whose last iterate keeps leaving bid 1. Returns the strategy for
    round t and the state to use next.
    """

    if view.size != COUNTEREXAMPLE_VALUE:
        raise ConfigurationError(f"The counterexample learner needs the value 3, got a bid set of size {view.size}.")

    if t <= state.warmup:
        return cached_point_mass(1, COUNTEREXAMPLE_VALUE), state
    if t <= state.t0:
        return cached_point_mass(0, COUNTEREXAMPLE_VALUE), state

    state = state.advance(t)
    start = state.boundary(state.epoch)
    leader = resolve_tie(view.leaders(), t, tiebreak)

    if t == start + 1 and leader == 1:
        # alpha(1) - alpha(2) < V * gamma_t, compared on the scaled integer sums
        gap = int(view.sums[1] - view.sums[2])
        if gap < cap * gamma_t * view.scale * view.t:
            epoch_boundary.send(sender=CounterexampleState, t=t, epoch=state.epoch)
            return cached_point_mass(2, COUNTEREXAMPLE_VALUE), state

    return _epoch_strategy(leader, state.boundary(state.epoch + 1)), state


class Counterexample(MeanBasedLearner):
    class Meta:
        kind = LEARNER_COUNTEREXAMPLE

    def __init__(self, spec, bidder, values):
        super().__init__(spec, bidder, values)
        self.state = CounterexampleState(spec.t0)
        self.gamma = CounterexampleGamma(spec.t0)

    def validate(self):
        super().validate()

        if self.size != COUNTEREXAMPLE_VALUE:
            raise ConfigurationError(
                f"The counterexample learner needs the value 3, bidder {self.bidder} has value {self.size}."
            )

        if self.spec.t0 < 4:
            raise ConfigurationError(f"The counterexample learner needs T0 >= 4, got {self.spec.t0}.")

        if not epoch_lengths_satisfy_theory(self.spec.t0):
            warnings.warn(
                f"T0 = {self.spec.t0} is below the bound under which the learner provably fails to converge "
                f"in the last iterate; the phase logic still applies.",
                TheoryBoundWarning,
            )

    def strategy(self, view, t):
        strategy, self.state = counterexample_policy(
            self.state, t, view, self.gamma(t), self.cap, self.spec.tiebreak
        )
        return strategy

    def default_gamma(self):
        return self.gamma
