from fpa_learning.consts import LEARNER_SCRIPTED
from fpa_learning.exceptions import ConfigurationError
from fpa_learning.learners.core import MeanBasedLearner, cached_point_mass
from fpa_learning.types import ValueProfile


class Scripted(MeanBasedLearner):
    """Plays its script s cyclically, s[(t - 1) mod |s|], ignoring the history"""

    class Meta:
        kind = LEARNER_SCRIPTED
        randomized = False

    def validate(self):
        if not self.spec.script:
            raise ConfigurationError(f"The scripted learner of bidder {self.bidder} needs a non-empty script.")

        for bid in self.spec.script:
            if not 0 <= bid < self.size:
                raise ConfigurationError(
                    f"Scripted bid {bid} of bidder {self.bidder} lies outside its bid set of size {self.size}."
                )

    def strategy(self, view, t):
        script = self.spec.script
        return cached_point_mass(script[(t - 1) % len(script)], self.size)


def example1_scripts(values: ValueProfile):
    """
    Tie-break scripts reproducing the cycle of the three-bidder example (10, 7, 7): the
    highest bidder keeps bidding v2, and the j-th bidder of the second group bids v2 - 1 at
    position j of a cycle of length |M2| + 1 and 1 elsewhere.

    Bidders outside both groups get a constant script of 0.
    """

    if len(values.top_group) != 1 or values.second_value is None or values.second_value < 2:
        raise ConfigurationError(
            f"The example1 tie-break needs a unique highest bidder and a second value of at least 2, "
            f"got values {list(values.values)}."
        )

    second = values.second_value
    group = values.second_group
    scripts = [(0,)] * values.n
    scripts[values.top_group[0]] = (second,)

    for position, bidder in enumerate(group):
        script = [1] * (len(group) + 1)
        script[position] = second - 1
        scripts[bidder] = tuple(script)

    return scripts


def with_example1_tiebreak(values: ValueProfile, specs):
    """Give every bidder's learner the scripted tie-break of `example1_scripts`"""
    return tuple(spec.with_script(script) for spec, script in zip(specs, example1_scripts(values)))
