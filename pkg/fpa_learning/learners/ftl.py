from fpa_learning.consts import LEARNER_FTL
from fpa_learning.learners.core import MeanBasedLearner, TieBreak, cached_point_mass, resolve_tie
from fpa_learning.learners.schedules import ZeroGamma
from fpa_learning.stats import BidderView
from fpa_learning.types import MixedStrategy


def ftl_policy(view: BidderView, t, tiebreak=TieBreak.LOWEST, script=()) -> MixedStrategy:
    """Point mass on a bid with the highest average reward so far"""

    bid = resolve_tie(view.leaders(), t, tiebreak, script)
    return cached_point_mass(bid, view.size)


class FollowTheLeader(MeanBasedLearner):
    class Meta:
        kind = LEARNER_FTL
        randomized = False

    def strategy(self, view, t):
        return ftl_policy(view, t, self.spec.tiebreak, self.spec.script)

    def default_gamma(self):
        return ZeroGamma()
