import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from fpa_learning.consts import PROBABILITY_TOLERANCE
from fpa_learning.exceptions import DomainError
from fpa_learning.util import parse_int_list


@dataclass(frozen=True)
class ValueProfile:
    """
    The fixed integer values of the bidders, one per bidder, and the value cap V.

    Values do not have to be sorted. Bidder `i` bids from the set {0, ..., values[i] - 1}.
    When no cap is given, the cap is the highest value.
    """

    values: Tuple[int, ...]
    cap: Optional[int] = None

    def __post_init__(self):
        values = tuple(int(value) for value in self.values)
        object.__setattr__(self, "values", values)

        if len(values) < 2:
            raise DomainError(f"An auction needs at least two bidders, got {len(values)}.")

        cap = max(values) if self.cap is None else int(self.cap)
        object.__setattr__(self, "cap", cap)

        if cap < 1:
            raise DomainError(f"The value cap must be a positive integer, got {cap}.")

        for i, value in enumerate(values):
            if not 1 <= value <= cap:
                raise DomainError(f"Value of bidder {i} must lie in [1, {cap}], got {value}.")

    @classmethod
    def parse(cls, values, cap=None):
        if isinstance(values, ValueProfile):
            return values
        return cls(parse_int_list(values), cap)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def highest(self) -> int:
        return max(self.values)

    @cached_property
    def top_group(self) -> Tuple[int, ...]:
        """M1, the bidders sharing the highest value"""
        return tuple(i for i, value in enumerate(self.values) if value == self.highest)

    @cached_property
    def second_value(self) -> Optional[int]:
        """The highest value strictly below the top value, None if every bidder shares the top value"""
        lower = [value for value in self.values if value < self.highest]
        return max(lower) if lower else None

    @cached_property
    def second_group(self) -> Tuple[int, ...]:
        """M2, the bidders sharing the second-highest value"""
        if self.second_value is None:
            return ()
        return tuple(i for i, value in enumerate(self.values) if value == self.second_value)

    @cached_property
    def scale(self) -> int:
        """lcm(1..N): every counterfactual reward is an integer multiple of 1/scale"""
        return math.lcm(*range(1, self.n + 1))

    def bid_set(self, i) -> range:
        return range(self.values[i])

    def bid_set_sizes(self) -> Tuple[int, ...]:
        return self.values

    def profile_count(self) -> int:
        return math.prod(self.values)

    def check_bid(self, i, bid):
        if not 0 <= i < self.n:
            raise DomainError(f"Bidder index {i} out of range for {self.n} bidders.")
        if not 0 <= bid < self.values[i]:
            raise DomainError(f"Bid {bid} of bidder {i} lies outside the bid set {{0, ..., {self.values[i] - 1}}}.")

    def to_dict(self):
        return {"values": list(self.values), "cap": self.cap}

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(data["values"]), data.get("cap"))


@dataclass(frozen=True)
class BidProfile:
    """One bid per bidder"""

    bids: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bids", tuple(int(bid) for bid in self.bids))
        if any(bid < 0 for bid in self.bids):
            raise DomainError(f"Bids must be non-negative, got {self.bids}.")

    @classmethod
    def for_values(cls, bids, values: ValueProfile) -> "BidProfile":
        """Build a profile and check every bid against its bidder's bid set"""

        profile = bids if isinstance(bids, BidProfile) else cls(tuple(bids))
        profile.validate(values)
        return profile

    def validate(self, values: ValueProfile):
        if len(self.bids) != values.n:
            raise DomainError(f"Expected {values.n} bids, got {len(self.bids)}.")
        for i, bid in enumerate(self.bids):
            values.check_bid(i, bid)

    def others(self, i) -> Tuple[int, ...]:
        return self.bids[:i] + self.bids[i + 1:]

    def __iter__(self):
        return iter(self.bids)

    def __len__(self):
        return len(self.bids)

    def __getitem__(self, i):
        return self.bids[i]


class MixedStrategy:
    """
    A probability vector over a bidder's bid set {0, ..., len(probs) - 1}.

    The underlying array is read-only; entries are non-negative and sum to 1 within 1e-12.
    """

    __slots__ = ("probs", "_cumulative", "_last")

    def __init__(self, probs, validate=True):
        probs = np.array(probs, dtype=float)

        if validate:
            if probs.ndim != 1 or probs.size == 0:
                raise DomainError("A mixed strategy must be a non-empty probability vector.")
            if np.any(probs < 0):
                raise DomainError(f"Mixed strategy has negative entries: {probs}.")
            if abs(probs.sum() - 1.0) > PROBABILITY_TOLERANCE:
                raise DomainError(f"Mixed strategy sums to {probs.sum()!r}, not 1.")

        probs.setflags(write=False)
        self.probs = probs
        self._cumulative = None
        self._last = None

    @classmethod
    def trusted(cls, probs) -> "MixedStrategy":
        """Wrap a float array a policy just built; skips the copy and the checks"""
        strategy = cls.__new__(cls)
        probs.setflags(write=False)
        strategy.probs = probs
        strategy._cumulative = None
        strategy._last = None
        return strategy

    @classmethod
    def point_mass(cls, bid, size) -> "MixedStrategy":
        if not 0 <= bid < size:
            raise DomainError(f"Bid {bid} lies outside the bid set of size {size}.")
        probs = np.zeros(size)
        probs[bid] = 1.0
        return cls.trusted(probs)

    @classmethod
    def uniform(cls, size) -> "MixedStrategy":
        return cls.trusted(np.full(size, 1.0 / size))

    @property
    def size(self) -> int:
        return self.probs.size

    def prob(self, bid) -> float:
        return float(self.probs[bid])

    def argmax(self) -> int:
        return int(np.argmax(self.probs))

    def support(self) -> Tuple[int, ...]:
        return tuple(int(bid) for bid in np.flatnonzero(self.probs > 0))

    def is_point_mass(self, bid=None) -> bool:
        top = self.argmax()
        return self.probs[top] == 1.0 and (bid is None or bid == top)

    def sample(self, uniform_draw) -> int:
        """Inverse-CDF sample from a single uniform draw in [0, 1)"""

        if self._cumulative is None:
            self._cumulative = np.cumsum(self.probs)
            self._last = int(np.flatnonzero(self.probs > 0)[-1])
        bid = int(np.searchsorted(self._cumulative, uniform_draw, side="right"))
        # the float cumsum can end below 1; never land on a trailing zero-mass bid
        return min(bid, self._last)

    def tolist(self):
        return self.probs.tolist()

    def __eq__(self, other):
        if not isinstance(other, MixedStrategy):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash(self.probs.tobytes())

    def __repr__(self):
        return f"MixedStrategy({self.probs.tolist()})"


@dataclass(frozen=True)
class EquilibriumSet:
    """A deduplicated, lexicographically sorted set of pure-strategy bid profiles"""

    profiles: Tuple[Tuple[int, ...], ...] = field(default_factory=tuple)

    def __post_init__(self):
        profiles = sorted({tuple(int(bid) for bid in profile) for profile in self.profiles})
        object.__setattr__(self, "profiles", tuple(profiles))

    @classmethod
    def from_profiles(cls, profiles: Iterable[Sequence[int]]) -> "EquilibriumSet":
        return cls(tuple(tuple(profile) for profile in profiles))

    @cached_property
    def _members(self):
        return frozenset(self.profiles)

    def __contains__(self, profile):
        if isinstance(profile, BidProfile):
            profile = profile.bids
        return tuple(profile) in self._members

    def __iter__(self):
        return iter(self.profiles)

    def __len__(self):
        return len(self.profiles)

    def to_json(self) -> str:
        return json.dumps([list(profile) for profile in self.profiles], separators=(",", ":"))

    @classmethod
    def from_json(cls, data: str) -> "EquilibriumSet":
        return cls.from_profiles(json.loads(data))
