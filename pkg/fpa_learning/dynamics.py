import enum
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from fpa_learning.auction import realized_winner
from fpa_learning.consts import (
    CLASSIFICATION_THRESHOLD_SETTINGS_KEY,
    DEFAULT_CLASSIFICATION_THRESHOLD,
    DENSE_CHECKPOINT_HORIZON,
    SPARSE_CHECKPOINT_STRIDE,
    UINT64_MASK,
)
from fpa_learning.exceptions import AuditError, ConfigurationError, DomainError
from fpa_learning.learners import AuditEntry, LearnerSpec, build_learner, check_round, mean_based_audit
from fpa_learning.signals import post_run
from fpa_learning.stats import HistoryStats
from fpa_learning.types import BidProfile, EquilibriumSet, MixedStrategy, ValueProfile
from fpa_learning.util import get_setting

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    """
    One repeated auction: the values, one learner per bidder, the number of rounds T and the
    seed of the run's random stream.

    Mixed strategies are checkpointed every `checkpoint_stride` rounds, at round T and at the
    `extra_checkpoints` rounds. Without a stride, every round is checkpointed up to 5000
    rounds and every 10th round beyond.
    """

    values: ValueProfile
    learners: Tuple[LearnerSpec, ...]
    rounds: int
    seed: int = 0
    checkpoint_stride: Optional[int] = None
    extra_checkpoints: Tuple[int, ...] = ()
    snapshots: bool = True
    audit: bool = True
    realize_winners: bool = True

    def __post_init__(self):
        values = ValueProfile.parse(self.values)
        object.__setattr__(self, "values", values)

        learners = self.learners
        if isinstance(learners, LearnerSpec):
            learners = (learners,) * values.n
        learners = tuple(learners)
        object.__setattr__(self, "learners", learners)

        if len(learners) != values.n:
            raise ConfigurationError(f"Expected one learner per bidder ({values.n}), got {len(learners)}.")

        if int(self.rounds) < 1:
            raise ConfigurationError(f"A run needs at least one round, got {self.rounds}.")

        if not 0 <= int(self.seed) <= UINT64_MASK:
            raise ConfigurationError(f"The seed must be an unsigned 64-bit integer, got {self.seed}.")

        if self.checkpoint_stride is not None and int(self.checkpoint_stride) < 1:
            raise ConfigurationError(f"The checkpoint stride must be positive, got {self.checkpoint_stride}.")

        object.__setattr__(self, "rounds", int(self.rounds))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "extra_checkpoints", tuple(sorted({int(t) for t in self.extra_checkpoints})))

    @property
    def stride(self) -> int:
        if self.checkpoint_stride:
            return int(self.checkpoint_stride)
        return 1 if self.rounds <= DENSE_CHECKPOINT_HORIZON else SPARSE_CHECKPOINT_STRIDE

    def checkpoint_rounds(self) -> Tuple[int, ...]:
        rounds = set(range(self.stride, self.rounds + 1, self.stride))
        rounds.add(self.rounds)
        rounds.update(t for t in self.extra_checkpoints if 1 <= t <= self.rounds)
        return tuple(sorted(rounds))

    def with_seed(self, seed) -> "RunConfig":
        return replace(self, seed=seed)

    def to_dict(self):
        return {
            "values": list(self.values.values),
            "cap": self.values.cap,
            "learners": [spec.to_dict() for spec in self.learners],
            "rounds": self.rounds,
            "seed": self.seed,
            "checkpoint_stride": self.checkpoint_stride,
            "extra_checkpoints": list(self.extra_checkpoints),
            "snapshots": self.snapshots,
            "audit": self.audit,
            "realize_winners": self.realize_winners,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            values=ValueProfile(tuple(data["values"]), data.get("cap")),
            learners=tuple(LearnerSpec.from_dict(spec) for spec in data["learners"]),
            rounds=data["rounds"],
            seed=data.get("seed", 0),
            checkpoint_stride=data.get("checkpoint_stride"),
            extra_checkpoints=tuple(data.get("extra_checkpoints") or ()),
            snapshots=data.get("snapshots", True),
            audit=data.get("audit", True),
            realize_winners=data.get("realize_winners", True),
        )


@dataclass(frozen=True, eq=False)
class Checkpoint:
    """Mixed strategies played at round t (None without snapshots) and the frequencies f_t"""

    t: int
    x: Optional[Tuple[MixedStrategy, ...]]
    f: Tuple[np.ndarray, ...]


@dataclass(frozen=True, eq=False)
class RunRecord:
    config: RunConfig
    trace: np.ndarray
    checkpoints: Tuple[Checkpoint, ...]
    stats: HistoryStats
    violations: Optional[Tuple[Tuple, ...]] = None
    wins: Tuple[int, ...] = field(default_factory=tuple)

    @property
    def values(self) -> ValueProfile:
        return self.config.values

    @property
    def rounds(self) -> int:
        return len(self.trace)

    @property
    def has_snapshots(self) -> bool:
        return bool(self.checkpoints) and all(checkpoint.x is not None for checkpoint in self.checkpoints)

    @property
    def terminal_frequencies(self):
        return [self.stats.frequencies(i) for i in range(self.values.n)]

    def checkpoint_rounds(self):
        return [checkpoint.t for checkpoint in self.checkpoints]

    def checkpoint_at(self, t) -> Checkpoint:
        for checkpoint in self.checkpoints:
            if checkpoint.t == t:
                return checkpoint
        raise DomainError(f"Round {t} is not a checkpoint of this record.")

    def profile(self, t) -> BidProfile:
        return BidProfile(tuple(int(bid) for bid in self.trace[t - 1]))

    def violation_count(self) -> int:
        if self.violations is None:
            return 0
        return sum(len(found) for found in self.violations)


def _prefix_profiles(prefix, values: ValueProfile):
    if prefix is None:
        return []
    return [BidProfile.for_values(bids, values).bids for bids in prefix]


def run(config: RunConfig, prefix: Optional[Sequence[Sequence[int]]] = None) -> RunRecord:
    """
    Play `config.rounds` rounds. At round t every learner commits a mixed strategy from the
    statistics of rounds 1..t-1, then one uniform draw per bidder picks the bids, then the
    realized winner is drawn among tied highest bidders and the statistics are updated.

    A `prefix` replaces the sampled bids of the first rounds by given profiles; the learners
    still see those rounds in order.
    """

    values = config.values
    n = values.n
    rounds = config.rounds
    prefix = _prefix_profiles(prefix, values)

    if len(prefix) > rounds:
        raise ConfigurationError(f"The prefix has {len(prefix)} rounds, more than the {rounds} of the run.")

    rng = np.random.default_rng(config.seed)
    learners = [build_learner(spec, i, values) for i, spec in enumerate(config.learners)]
    gammas = [learner.default_gamma() if config.audit else None for learner in learners]
    stats = HistoryStats(values, horizon=max(rounds, 1))

    trace = np.empty((rounds, n), dtype=np.int64)
    checkpoint_rounds = set(config.checkpoint_rounds())
    checkpoints = []
    violations = [[] for _ in range(n)]
    wins = [0] * n

    logger.debug("Running %d rounds for values %s with seed %d", rounds, values.values, config.seed)

    for t in range(1, rounds + 1):
        views = [stats.view(i) for i in range(n)]
        strategies = [learner.strategy(view, t) for learner, view in zip(learners, views)]

        draws = rng.random(n)
        if t <= len(prefix):
            bids = list(prefix[t - 1])
        else:
            bids = [strategy.sample(draw) for strategy, draw in zip(strategies, draws)]

        for i, gamma in enumerate(gammas):
            if gamma is not None:
                found = check_round(t, views[i].alpha, strategies[i], gamma(t), values.cap)
                if found:
                    violations[i].extend(found)

        if config.realize_winners:
            wins[realized_winner(bids, rng)] += 1

        stats.update(bids)
        trace[t - 1] = bids

        if t in checkpoint_rounds:
            checkpoints.append(
                Checkpoint(
                    t,
                    tuple(strategies) if config.snapshots else None,
                    tuple(stats.frequencies(i) for i in range(n)),
                )
            )

    record = RunRecord(
        config=config,
        trace=trace,
        checkpoints=tuple(checkpoints),
        stats=stats,
        violations=tuple(tuple(found) for found in violations) if config.audit else None,
        wins=tuple(wins),
    )

    if record.violation_count():
        logger.warning("Run with seed %d found %d mean-based violations", config.seed, record.violation_count())

    post_run.send(sender=RunConfig, record=record)
    return record


def ne_indicator(record: RunRecord, ne: EquilibriumSet) -> np.ndarray:
    """Boolean per round: is the round's profile a pure Nash equilibrium"""

    shape = record.values.bid_set_sizes()
    codes = np.ravel_multi_index(record.trace.T, shape)
    if not len(ne):
        return np.zeros(len(codes), dtype=bool)

    ne_codes = np.ravel_multi_index(np.array(ne.profiles, dtype=np.int64).T, shape)
    return np.isin(codes, ne_codes)


def time_average_ne_fraction(record: RunRecord, ne: EquilibriumSet, exact=False):
    """Fraction of rounds 1..t played at a pure Nash equilibrium, for each checkpoint t"""

    hits = np.cumsum(ne_indicator(record, ne))
    rounds = record.checkpoint_rounds()

    if exact:
        return [Fraction(int(hits[t - 1]), t) for t in rounds]
    return np.array([hits[t - 1] / t for t in rounds])


def last_iterate_distance(x: MixedStrategy, b) -> float:
    """Total variation distance from x to the point mass on b"""

    if not 0 <= b < x.size:
        raise DomainError(f"Bid {b} lies outside the bid set of size {x.size}.")
    return 1.0 - x.prob(b)


class Outcome(enum.Enum):
    V_MINUS_1 = "v_minus_1"
    V_MINUS_2 = "v_minus_2"
    NOT_CONVERGED = "not_converged"


@dataclass(frozen=True)
class ConvergenceVerdict:
    outcome: Outcome
    bidder: int
    minus_one: float
    minus_two: float

    def to_dict(self):
        return {
            "outcome": self.outcome.value,
            "bidder": self.bidder,
            "f_v_minus_1": self.minus_one,
            "f_v_minus_2": self.minus_two,
        }


def classify_convergence(record: RunRecord, bidder=None, threshold=None) -> ConvergenceVerdict:
    """
    ToHighMinusTwo if the terminal frequency of v1 - 2 exceeds the threshold, ToHighMinusOne if
    that of v1 - 1 does, NotConverged otherwise. The bidder must share the highest value and
    defaults to the first such bidder.
    """

    values = record.values
    if bidder is None:
        bidder = values.top_group[0]
    if threshold is None:
        threshold = get_setting(CLASSIFICATION_THRESHOLD_SETTINGS_KEY, DEFAULT_CLASSIFICATION_THRESHOLD)

    if bidder not in values.top_group:
        raise DomainError(f"Bidder {bidder} does not hold the highest value {values.highest}.")
    if not 0.5 < threshold <= 1:
        raise DomainError(f"The classification threshold must lie in (0.5, 1], got {threshold}.")

    frequencies = record.stats.frequencies(bidder)
    top = values.highest
    minus_one = float(frequencies[top - 1])
    minus_two = float(frequencies[top - 2]) if top >= 2 else 0.0

    if minus_two > threshold:
        outcome = Outcome.V_MINUS_2
    elif minus_one > threshold:
        outcome = Outcome.V_MINUS_1
    else:
        outcome = Outcome.NOT_CONVERGED

    return ConvergenceVerdict(outcome, bidder, minus_one, minus_two)


def oscillation_indicator(record: RunRecord, bidder, window) -> int:
    """How often the argmax of the bidder's checkpointed mixed strategy changes inside `window`"""

    start, end = window
    if start > end or start < 1 or end > record.rounds:
        raise DomainError(f"The window {window} is empty or outside rounds 1..{record.rounds}.")
    if not record.has_snapshots:
        raise DomainError("The record holds no mixed-strategy snapshots.")

    leaders = [
        checkpoint.x[bidder].argmax() for checkpoint in record.checkpoints if start <= checkpoint.t <= end
    ]
    if not leaders:
        raise DomainError(f"No checkpoint falls in the window {window}.")

    return sum(1 for previous, current in zip(leaders, leaders[1:]) if previous != current)


def empirical_distributions(record: RunRecord, exact=True):
    """Every bidder's terminal bid frequencies f_T"""
    return [record.stats.frequencies(i, exact=exact) for i in range(record.values.n)]


def audit_record(record: RunRecord, gammas=None):
    """
    Re-audit a record from its snapshots: alpha_{t-1} is recomputed from the trace for every
    checkpointed round. `gammas` defaults to each learner's own schedule; bidders whose
    schedule is None are skipped.
    """

    if not record.has_snapshots:
        raise AuditError("The record holds no mixed-strategy snapshots to audit.")

    values = record.values
    if gammas is None:
        gammas = [
            build_learner(spec, i, values).default_gamma() for i, spec in enumerate(record.config.learners)
        ]
    elif not isinstance(gammas, (list, tuple)):
        gammas = [gammas] * values.n

    entries = [[] for _ in range(values.n)]
    snapshots = {checkpoint.t: checkpoint.x for checkpoint in record.checkpoints}
    stats = HistoryStats(values, horizon=max(record.rounds, 1))

    for t, bids in enumerate(record.trace, start=1):
        if t in snapshots:
            for i in range(values.n):
                entries[i].append(AuditEntry(t, stats.alpha(i).tolist(), snapshots[t][i]))
        stats.update([int(bid) for bid in bids])

    return tuple(
        tuple(mean_based_audit(entries[i], gamma, values.cap)) if gamma is not None else ()
        for i, gamma in enumerate(gammas)
    )
