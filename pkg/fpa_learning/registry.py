from fpa_learning.exceptions import ConfigurationError


class LearnerRegistry:
    """
    LearnerRegistry maps learner kinds (e.g. "ftl", "eps-greedy") to learner classes. Learner
    classes register themselves when they are declared, see `MeanBasedLearner`.
    """

    def __init__(self):
        self._registry = {}

    def register(self, kind, learner_class):
        assert isinstance(kind, str), f"Learner kind must be a string, got {kind!r}"

        self._registry[kind] = learner_class

    def unregister(self, kind):
        del self._registry[kind]

    def get_learner_class(self, kind):
        try:
            return self._registry[kind]
        except KeyError:
            known = ", ".join(sorted(self._registry))
            raise ConfigurationError(f"Unknown learner kind {kind!r}. Known kinds: {known}.") from None

    def kinds(self):
        return tuple(sorted(self._registry))


learner_registry = None


def get_learner_registry():
    global learner_registry
    if not learner_registry:
        learner_registry = LearnerRegistry()
    return learner_registry
