import itertools
from collections.abc import Mapping
from fractions import Fraction
from typing import Sequence

from fpa_learning.consts import PROBABILITY_TOLERANCE
from fpa_learning.exceptions import DomainError
from fpa_learning.types import BidProfile, ValueProfile


def _check_others(i, others, values: ValueProfile):
    if len(others) != values.n - 1:
        raise DomainError(f"Expected {values.n - 1} opponent bids, got {len(others)}.")

    for j, bid in zip(_opponents(i, values.n), others):
        values.check_bid(j, bid)


def _opponents(i, n):
    return [j for j in range(n) if j != i]


def expected_utility(i, b, others: Sequence[int], values: ValueProfile) -> Fraction:
    """
    Utility of bidder `i` bidding `b` against the bids `others` of all j != i, in bidder order.

    The highest bid wins and pays its bid; ties are broken uniformly at random, so a tied
    winner receives (v - b) / (number of highest bidders).
    """

    values.check_bid(i, b)
    _check_others(i, others, values)

    top = max(others)
    if b < top:
        return Fraction(0)

    tied = 1 + sum(1 for bid in others if bid == b)
    return Fraction(values.values[i] - b, tied)


def profile_utility(i, profile, values: ValueProfile) -> Fraction:
    profile = BidProfile.for_values(profile, values)
    return expected_utility(i, profile[i], profile.others(i), values)


def realized_winner(profile, rng) -> int:
    """Draw the winner uniformly among the highest bidders"""

    bids = profile.bids if isinstance(profile, BidProfile) else tuple(profile)
    top = max(bids)
    winners = [i for i, bid in enumerate(bids) if bid == top]

    if len(winners) == 1:
        return winners[0]

    pick = int(rng.random() * len(winners))
    return winners[min(pick, len(winners) - 1)]


def _as_distribution(j, distribution, values: ValueProfile):
    if isinstance(distribution, Mapping):
        items = [(int(bid), prob) for bid, prob in distribution.items()]
    else:
        items = list(enumerate(distribution))

    total = sum(prob for _, prob in items)
    if abs(total - 1) > PROBABILITY_TOLERANCE:
        raise DomainError(f"Distribution of bidder {j} sums to {total}, not 1.")

    support = []
    for bid, prob in items:
        if prob < 0:
            raise DomainError(f"Distribution of bidder {j} has a negative probability at bid {bid}.")
        if prob:
            values.check_bid(j, bid)
            support.append((bid, prob))
    return support


def empirical_product_utility(i, b, empirical: Sequence, values: ValueProfile):
    """
    Expected utility of bidder `i` bidding `b` when every opponent bids independently from its
    distribution in `empirical` (given for all j != i, in bidder order).

    Distributions are sequences indexed by bid or mappings bid -> probability. With
    `fractions.Fraction` probabilities the result is exact.
    """

    values.check_bid(i, b)
    opponents = _opponents(i, values.n)

    if len(empirical) != len(opponents):
        raise DomainError(f"Expected {len(opponents)} opponent distributions, got {len(empirical)}.")

    supports = [_as_distribution(j, distribution, values) for j, distribution in zip(opponents, empirical)]

    total = Fraction(0)
    for outcome in itertools.product(*supports):
        others = tuple(bid for bid, _ in outcome)
        weight = 1
        for _, prob in outcome:
            weight = weight * prob
        total = total + weight * expected_utility(i, b, others, values)

    return total


def empirical_best_response(i, empirical: Sequence, values: ValueProfile):
    """The lowest bid maximizing `empirical_product_utility`, with its utility"""

    best_bid, best_utility = None, None
    for b in values.bid_set(i):
        utility = empirical_product_utility(i, b, empirical, values)
        if best_utility is None or utility > best_utility:
            best_bid, best_utility = b, utility

    return best_bid, best_utility


def is_empirical_nash(values: ValueProfile, distributions: Sequence, tolerance=0):
    """
    Whether the product of the per-bidder distributions is a (mixed) Nash equilibrium.

    Returns (is_nash, gains) where gains[i] is what bidder i earns by switching from its
    distribution to its best pure response.
    """

    if len(distributions) != values.n:
        raise DomainError(f"Expected {values.n} distributions, got {len(distributions)}.")

    gains = []
    for i in range(values.n):
        others = [distributions[j] for j in _opponents(i, values.n)]
        own = _as_distribution(i, distributions[i], values)
        current = sum(prob * empirical_product_utility(i, bid, others, values) for bid, prob in own)
        _, best = empirical_best_response(i, others, values)
        gains.append(best - current)

    return all(gain <= tolerance for gain in gains), gains
