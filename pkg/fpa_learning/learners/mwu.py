import numpy as np

from fpa_learning.consts import (
    DEFAULT_MWU_AUDIT_SCALE,
    LEARNER_MWU,
    LEARNER_MWU_STANDARD,
    MWU_AUDIT_SCALE_SETTINGS_KEY,
)
from fpa_learning.exceptions import DomainError
from fpa_learning.learners.core import MeanBasedLearner
from fpa_learning.learners.schedules import EpsilonGamma
from fpa_learning.stats import BidderView
from fpa_learning.types import MixedStrategy
from fpa_learning.util import get_setting


def softmax(scores) -> MixedStrategy:
    scores = np.asarray(scores, dtype=float)
    weights = np.exp(scores - scores.max())
    return MixedStrategy.trusted(weights / weights.sum())


def mwu_policy(view: BidderView, t, epsilon) -> MixedStrategy:
    """
    Multiplicative weights recomputed from the cumulative rewards S of rounds 1..t-1:
    probs(b) proportional to exp(epsilon * S(b)), so every past round weighs the same.
    The caller passes epsilon = eps_{t-1}. Uniform before the first round.
    """

    if t <= 1 or view.t == 0:
        return MixedStrategy.uniform(view.size)

    return softmax(epsilon * view.cumulative)


class MultiplicativeWeights(MeanBasedLearner):
    class Meta:
        kind = LEARNER_MWU

    def strategy(self, view, t):
        return mwu_policy(view, t, self.spec.schedule(max(t - 1, 1)))

    def default_gamma(self):
        scale = get_setting(MWU_AUDIT_SCALE_SETTINGS_KEY, DEFAULT_MWU_AUDIT_SCALE)
        return EpsilonGamma(self.spec.schedule, factor=scale)


class StandardMultiplicativeWeights(MeanBasedLearner):
    """
    The usual decreasing-rate variant: probs(b) proportional to exp(sum_s eps_s * u_s(b)), so
    early rounds weigh more than late ones. It has to see every round in order.
    """

    class Meta:
        kind = LEARNER_MWU_STANDARD

    def __init__(self, spec, bidder, values):
        super().__init__(spec, bidder, values)
        self._previous = np.zeros(self.size, dtype=np.int64)
        self._weighted = np.zeros(self.size)
        self._seen = 0

    def strategy(self, view, t):
        if view.t != self._seen and view.t != self._seen + 1:
            raise DomainError(
                f"The standard MWU learner saw {self._seen} rounds and cannot jump to a view after {view.t}."
            )

        if view.t == self._seen + 1:
            reward = np.asarray((view.sums - self._previous) / view.scale, dtype=float)
            self._weighted += self.spec.schedule(view.t) * reward
            self._previous = view.sums.copy()
            self._seen = view.t

        if self._seen == 0:
            return MixedStrategy.uniform(self.size)
        return softmax(self._weighted)

    def default_gamma(self):
        scale = get_setting(MWU_AUDIT_SCALE_SETTINGS_KEY, DEFAULT_MWU_AUDIT_SCALE)
        return EpsilonGamma(self.spec.schedule, factor=scale)
