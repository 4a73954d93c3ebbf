import itertools
import logging

import numpy as np

from fpa_learning.auction import expected_utility
from fpa_learning.consts import DEFAULT_MAX_PROFILES, MAX_PROFILES_SETTINGS_KEY
from fpa_learning.exceptions import CapacityError, ConfigurationError
from fpa_learning.types import BidProfile, EquilibriumSet, ValueProfile
from fpa_learning.util import get_setting

logger = logging.getLogger(__name__)

# Rows of the profile grid materialized at a time by the brute-force search.
_CHUNK_ROWS = 1 << 18


def check_capacity(values: ValueProfile, max_profiles=None):
    if max_profiles is None:
        max_profiles = get_setting(MAX_PROFILES_SETTINGS_KEY, DEFAULT_MAX_PROFILES)

    count = values.profile_count()
    if count > max_profiles:
        raise CapacityError(
            f"The auction with values {list(values.values)} has {count} bid profiles, "
            f"more than the enumeration guard of {max_profiles}."
        )
    return count


def is_nash(profile, values: ValueProfile) -> bool:
    """True iff no bidder has a strictly improving unilateral deviation"""

    profile = BidProfile.for_values(profile, values)

    for i in range(values.n):
        others = profile.others(i)
        current = expected_utility(i, profile[i], others, values)
        for deviation in values.bid_set(i):
            if expected_utility(i, deviation, others, values) > current:
                return False

    return True


def _allowed_bids(values: ValueProfile, fixed):
    """Per-bidder candidate bids: the fixed bid where given, the whole bid set otherwise"""
    return [[fixed[i]] if i in fixed else list(values.bid_set(i)) for i in range(values.n)]


def enumerate_pure_nash(values: ValueProfile, max_profiles=None) -> EquilibriumSet:
    """
    The pure-strategy Nash equilibria in closed form, by case analysis on the number of
    bidders sharing the highest value.

    * Three or more top bidders: all of them bid v1 - 1, everyone else bids anything.
    * Two top bidders: both bid v1 - 1, or both bid v1 - 2 unless a third bidder has value
      v1 - 1 (then only v1 - 1 remains).
    * One top bidder: it bids v2 while at least one second-highest bidder bids v2 - 1; and
      when v1 = v2 + 1 with a single second-highest bidder, also both of them bidding v2 - 1.

    Bids of the remaining bidders are unconstrained beyond their bid sets.
    """

    check_capacity(values, max_profiles)

    top = values.highest
    top_group = values.top_group
    profiles = []

    if len(top_group) >= 3:
        profiles.extend(itertools.product(*_allowed_bids(values, {i: top - 1 for i in top_group})))

    elif len(top_group) == 2:
        third = values.second_value
        levels = [top - 1]
        if third is None or third < top - 1:
            levels.append(top - 2)

        for level in levels:
            if level < 0:
                continue
            profiles.extend(itertools.product(*_allowed_bids(values, {i: level for i in top_group})))

    else:
        leader = top_group[0]
        second = values.second_value
        second_group = values.second_group

        for profile in itertools.product(*_allowed_bids(values, {leader: second})):
            if max(profile[j] for j in second_group) == second - 1:
                profiles.append(profile)

        if top == second + 1 and len(second_group) == 1:
            fixed = {leader: second - 1, second_group[0]: second - 1}
            profiles.extend(itertools.product(*_allowed_bids(values, fixed)))

    result = EquilibriumSet.from_profiles(profiles)
    logger.debug("Closed form found %d equilibria for values %s", len(result), values.values)
    return result


def _deviation_utilities(grid, i, value, scale):
    """Scaled utility of every bid of bidder i against the opponents' bids in each grid row"""

    others = np.delete(grid, i, axis=1)
    level = others.max(axis=1)
    ties = (others == level[:, None]).sum(axis=1)

    bids = np.arange(value)[None, :]
    payoff = (value - bids) * scale
    return np.where(
        bids > level[:, None],
        payoff,
        np.where(bids == level[:, None], payoff // (ties[:, None] + 1), 0),
    )


def brute_force_nash(values: ValueProfile, max_profiles=None) -> EquilibriumSet:
    """
    Enumerate every bid profile and keep those where no bidder gains strictly by deviating.

    Utilities are compared as integers scaled by lcm(1..N), so the comparison is exact.
    """

    total = check_capacity(values, max_profiles)
    shape = values.bid_set_sizes()
    scale = values.scale
    rows = np.arange(values.n)
    profiles = []

    for start in range(0, total, _CHUNK_ROWS):
        flat = np.arange(start, min(start + _CHUNK_ROWS, total))
        grid = np.stack(np.unravel_index(flat, shape), axis=1).astype(np.int64)
        stable = np.ones(len(grid), dtype=bool)

        for i in rows:
            table = _deviation_utilities(grid, i, values.values[i], scale)
            current = table[np.arange(len(grid)), grid[:, i]]
            stable &= current >= table.max(axis=1)

        profiles.extend(tuple(int(bid) for bid in row) for row in grid[stable])

    return EquilibriumSet.from_profiles(profiles)


EQUILIBRIUM_METHODS = ("closed", "brute", "both")


def find_equilibria(values: ValueProfile, method="closed", max_profiles=None):
    """Returns (equilibria, agreement); agreement is None unless both methods ran"""

    if method not in EQUILIBRIUM_METHODS:
        raise ConfigurationError(f"Unknown method {method!r}, expected one of {', '.join(EQUILIBRIUM_METHODS)}.")

    if method == "brute":
        return brute_force_nash(values, max_profiles), None

    closed = enumerate_pure_nash(values, max_profiles)
    if method == "both":
        return closed, closed == brute_force_nash(values, max_profiles)
    return closed, None
