import enum
import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Tuple

from graphene.types.base import BaseOptions
from graphene.utils.str_converters import to_snake_case
from graphene.utils.subclass_with_meta import SubclassWithMeta

from fpa_learning.consts import LEARNER_FTL
from fpa_learning.exceptions import ConfigurationError
from fpa_learning.learners.schedules import EpsilonSchedule
from fpa_learning.registry import get_learner_registry
from fpa_learning.stats import BidderView
from fpa_learning.types import MixedStrategy, ValueProfile
from fpa_learning.util import parse_int_list

logger = logging.getLogger(__name__)


class TieBreak(enum.Enum):
    LOWEST = "lowest"
    HIGHEST = "highest"
    ROUND_ROBIN = "round-robin"
    SCRIPTED = "scripted"

    @classmethod
    def parse(cls, value):
        if isinstance(value, TieBreak):
            return value

        name = str(value).strip().lower().replace("_", "-")
        if name.endswith("-bid"):
            name = name[: -len("-bid")]
        try:
            return cls(name)
        except ValueError:
            known = ", ".join(member.value for member in cls)
            raise ConfigurationError(f"Unknown tie-break rule {value!r}. Known rules: {known}.") from None


def resolve_tie(leaders, t, tiebreak: TieBreak, script: Tuple[int, ...] = ()) -> int:
    """Pick one bid among the ascending `leaders` at round t"""

    if len(leaders) == 1 or tiebreak is TieBreak.LOWEST:
        return int(leaders[0])

    if tiebreak is TieBreak.HIGHEST:
        return int(leaders[-1])

    if tiebreak is TieBreak.ROUND_ROBIN:
        return int(leaders[(t - 1) % len(leaders)])

    wanted = script[(t - 1) % len(script)]
    if wanted in leaders:
        return int(wanted)
    return int(leaders[0])


@lru_cache(maxsize=None)
def cached_point_mass(bid, size) -> MixedStrategy:
    return MixedStrategy.point_mass(bid, size)


@dataclass(frozen=True)
class LearnerSpec:
    """
    How one bidder learns: the learner kind, its epsilon schedule, the tie-break rule among
    leading bids and, for the counterexample learner, the first phase length T0.

    `script` is the bid sequence of the scripted tie-break or of the scripted learner.
    """

    kind: str = LEARNER_FTL
    schedule: EpsilonSchedule = field(default_factory=EpsilonSchedule)
    tiebreak: TieBreak = TieBreak.LOWEST
    script: Tuple[int, ...] = ()
    t0: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "tiebreak", TieBreak.parse(self.tiebreak))
        object.__setattr__(self, "script", parse_int_list(self.script))

        get_learner_registry().get_learner_class(self.kind)

        if self.tiebreak is TieBreak.SCRIPTED and not self.script:
            raise ConfigurationError("The scripted tie-break needs a non-empty script.")

    def with_script(self, script) -> "LearnerSpec":
        return replace(self, tiebreak=TieBreak.SCRIPTED, script=tuple(script))

    def to_dict(self):
        return {
            "kind": self.kind,
            "tiebreak": self.tiebreak.value,
            "script": list(self.script),
            "eps_exponent": self.schedule.exponent,
            "eps_scale": self.schedule.scale,
            "t0": self.t0,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            kind=data.get("kind", LEARNER_FTL),
            schedule=EpsilonSchedule(float(data.get("eps_exponent", 0.5)), float(data.get("eps_scale", 1.0))),
            tiebreak=data.get("tiebreak", TieBreak.LOWEST.value),
            script=tuple(data.get("script") or ()),
            t0=int(data.get("t0", 1000)),
        )


class LearnerOptions(BaseOptions):
    kind = None
    randomized = None


class MeanBasedLearner(SubclassWithMeta):
    """
    Base class of the learning policies. A subclass declares its kind in `Meta` and is
    registered under it, e.g.

        class FollowTheLeader(MeanBasedLearner):
            class Meta:
                kind = "ftl"
                randomized = False

    An instance belongs to one bidder of one run and produces the bidder's mixed strategy
    at round t from the statistics of rounds 1..t-1.
    """

    class Meta:
        abstract = True

    @classmethod
    def __init_subclass_with_meta__(cls, kind=None, randomized=True, _meta=None, **options):
        if not kind:
            kind = to_snake_case(cls.__name__).replace("_", "-")

        if _meta is None:
            _meta = LearnerOptions(cls)

        _meta.name = cls.__name__
        _meta.kind = kind
        _meta.randomized = randomized
        _meta.freeze()
        cls._meta = _meta

        get_learner_registry().register(kind, cls)

        super().__init_subclass_with_meta__(**options)

    def __init__(self, spec: LearnerSpec, bidder, values: ValueProfile):
        self.spec = spec
        self.bidder = bidder
        self.values = values
        self.size = values.values[bidder]
        self.cap = values.cap

        self.validate()

    def validate(self):
        if self.spec.tiebreak is TieBreak.SCRIPTED:
            for bid in self.spec.script:
                if not 0 <= bid < self.size:
                    raise ConfigurationError(
                        f"Scripted bid {bid} of bidder {self.bidder} lies outside its bid set of size {self.size}."
                    )

    def strategy(self, view: BidderView, t) -> MixedStrategy:
        raise NotImplementedError

    def default_gamma(self):
        """The schedule this learner is audited with, None if it is not audited"""
        return None

    def __repr__(self):
        return f"{self.__class__.__name__}(bidder={self.bidder}, spec={self.spec!r})"


def build_learner(spec: LearnerSpec, bidder, values: ValueProfile, registry=None) -> MeanBasedLearner:
    registry = registry or get_learner_registry()
    learner_class = registry.get_learner_class(spec.kind)
    return learner_class(spec, bidder, values)


