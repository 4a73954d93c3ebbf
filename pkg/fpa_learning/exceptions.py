class FpaLearningError(Exception):
    """Base class for errors raised by fpa_learning"""


class DomainError(FpaLearningError, ValueError):
    """An argument lies outside the domain of an operation, e.g. a bid outside the bid set"""


class CapacityError(FpaLearningError):
    """The bid-profile space is larger than the configured enumeration guard"""


class ConfigurationError(FpaLearningError, ValueError):
    """A learner, run or batch configuration is invalid"""


class AuditError(FpaLearningError):
    """A mean-based audit was requested on a record that cannot support it"""


class TheoryBoundWarning(UserWarning):
    """The counterexample learner runs with a T0 below the bound its guarantee needs"""
