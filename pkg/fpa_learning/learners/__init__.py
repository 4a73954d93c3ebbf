from .core import LearnerSpec, MeanBasedLearner, TieBreak, build_learner, resolve_tie  # noqa: F401
from .schedules import (  # noqa: F401
    CounterexampleGamma,
    EpsilonGamma,
    EpsilonSchedule,
    GammaSchedule,
    TabulatedGamma,
    ZeroGamma,
)
from .ftl import FollowTheLeader, ftl_policy  # noqa: F401
from .eps_greedy import EpsilonGreedy, eps_greedy_policy  # noqa: F401
from .mwu import MultiplicativeWeights, StandardMultiplicativeWeights, mwu_policy  # noqa: F401
from .counterexample import Counterexample, CounterexampleState, counterexample_policy  # noqa: F401
from .scripted import Scripted, example1_scripts, with_example1_tiebreak  # noqa: F401
from .audit import AuditEntry, Violation, check_round, mean_based_audit  # noqa: F401
