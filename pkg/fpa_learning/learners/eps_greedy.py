import numpy as np

from fpa_learning.consts import LEARNER_EPS_GREEDY
from fpa_learning.learners.core import MeanBasedLearner, TieBreak, resolve_tie
from fpa_learning.learners.schedules import EpsilonGamma
from fpa_learning.stats import BidderView
from fpa_learning.types import MixedStrategy


def eps_greedy_policy(view: BidderView, t, epsilon, tiebreak=TieBreak.LOWEST, script=()) -> MixedStrategy:
    """
    Explore uniformly with probability `epsilon`, otherwise follow the leader: the leader gets
    1 - epsilon + epsilon / n and every other bid epsilon / n.
    """

    size = view.size
    bid = resolve_tie(view.leaders(), t, tiebreak, script)

    probs = np.full(size, epsilon / size)
    probs[bid] += 1.0 - epsilon
    return MixedStrategy.trusted(probs)


class EpsilonGreedy(MeanBasedLearner):
    class Meta:
        kind = LEARNER_EPS_GREEDY

    def strategy(self, view, t):
        return eps_greedy_policy(view, t, self.spec.schedule(t), self.spec.tiebreak, self.spec.script)

    def default_gamma(self):
        return EpsilonGamma(self.spec.schedule)
