from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from fpa_learning.auction import (
    empirical_best_response,
    empirical_product_utility,
    expected_utility,
    is_empirical_nash,
    profile_utility,
    realized_winner,
)
from fpa_learning.exceptions import DomainError
from fpa_learning.types import BidProfile, EquilibriumSet, MixedStrategy, ValueProfile


class TestValueProfile(SimpleTestCase):
    def test__unsorted_values__derives_groups_independent_of_order(self):
        values = ValueProfile((7, 10, 7))

        self.assertEqual(10, values.cap)
        self.assertEqual((1,), values.top_group)
        self.assertEqual(7, values.second_value)
        self.assertEqual((0, 2), values.second_group)
        self.assertEqual(6, values.scale)

    def test__single_bidder__raises_domain_error(self):
        with self.assertRaises(DomainError):
            ValueProfile((4,))

    def test__value_above_cap__raises_domain_error(self):
        with self.assertRaises(DomainError):
            ValueProfile((4, 5), cap=4)

    def test__parse__accepts_comma_separated_string(self):
        self.assertEqual((4, 4, 4), ValueProfile.parse("4,4,4").values)

    def test__bid_profile_with_bid_at_value__raises_domain_error(self):
        with self.assertRaises(DomainError):
            BidProfile.for_values((4, 0), ValueProfile((4, 4)))


class TestMixedStrategy(SimpleTestCase):
    def test__negative_entry__raises_domain_error(self):
        with self.assertRaises(DomainError):
            MixedStrategy([1.5, -0.5])

    def test__not_normalized__raises_domain_error(self):
        with self.assertRaises(DomainError):
            MixedStrategy([0.5, 0.4])

    def test__sample__inverts_the_cdf(self):
        x = MixedStrategy([0.25, 0.5, 0.25])

        self.assertEqual(0, x.sample(0.0))
        self.assertEqual(1, x.sample(0.25))
        self.assertEqual(1, x.sample(0.7499))
        self.assertEqual(2, x.sample(0.9999999))

    def test__sample__never_returns_a_trailing_zero_mass_bid(self):
        # ten times 0.1 sums to just below 1.0
        x = MixedStrategy([0.1] * 10 + [0.0])

        self.assertEqual(9, x.sample(np.nextafter(1.0, 0.0)))

    def test__trusted__wraps_the_array_read_only(self):
        probs = np.array([0.5, 0.5])

        x = MixedStrategy.trusted(probs)

        self.assertIs(probs, x.probs)
        with self.assertRaises(ValueError):
            x.probs[0] = 1.0

    def test__point_mass__is_point_mass(self):
        x = MixedStrategy.point_mass(2, 3)

        self.assertTrue(x.is_point_mass(2))
        self.assertFalse(x.is_point_mass(1))
        self.assertEqual((2,), x.support())


class TestExpectedUtility(SimpleTestCase):
    def test__sole_winner__gets_value_minus_bid(self):
        values = ValueProfile((10, 7, 7))

        self.assertEqual(Fraction(3), expected_utility(0, 7, (6, 1), values))

    def test__three_way_tie__splits_the_surplus(self):
        values = ValueProfile((3, 3, 3))

        self.assertEqual(Fraction(1, 3), expected_utility(0, 2, (2, 2), values))

    def test__two_way_tie__splits_the_surplus(self):
        values = ValueProfile((3, 3))

        self.assertEqual(Fraction(1, 2), expected_utility(1, 2, (2,), values))

    def test__bid_below_max__gets_nothing(self):
        values = ValueProfile((4, 4))

        self.assertEqual(Fraction(0), expected_utility(0, 1, (2,), values))

    def test__bid_outside_bid_set__raises_domain_error(self):
        values = ValueProfile((4, 4))

        with self.assertRaises(DomainError):
            expected_utility(0, 4, (2,), values)
        with self.assertRaises(DomainError):
            expected_utility(0, 1, (5,), values)

    def test__profile_utility__matches_expected_utility(self):
        values = ValueProfile((10, 7, 7))

        self.assertEqual(Fraction(3), profile_utility(0, (7, 6, 1), values))
        self.assertEqual(Fraction(0), profile_utility(1, (7, 6, 1), values))


class TestRealizedWinner(SimpleTestCase):
    def test__unique_max__wins_without_a_draw(self):
        rng = np.random.default_rng(0)

        self.assertEqual(0, realized_winner((3, 1, 0), rng))

    def test__two_way_tie__is_uniform(self):
        rng = np.random.default_rng(11)
        wins = np.bincount([realized_winner((2, 2), rng) for _ in range(100_000)], minlength=2)

        np.testing.assert_allclose(wins / 100_000, [0.5, 0.5], atol=0.01)

    def test__three_way_tie__is_uniform(self):
        rng = np.random.default_rng(12)
        wins = np.bincount([realized_winner((0, 0, 0), rng) for _ in range(100_000)], minlength=3)

        np.testing.assert_allclose(wins / 100_000, [1 / 3] * 3, atol=0.01)

    def test__same_seed__same_winner(self):
        first = realized_winner((2, 2, 2), np.random.default_rng(5))
        second = realized_winner((2, 2, 2), np.random.default_rng(5))

        self.assertEqual(first, second)


class TestEmpiricalProductUtility(SimpleTestCase):
    def setUp(self):
        self.values = ValueProfile((10, 7, 7))
        self.cycle = {6: Fraction(1, 3), 1: Fraction(2, 3)}

    def test__deviation_to_two__beats_the_cycle_bid(self):
        utility = empirical_product_utility(0, 2, [self.cycle, self.cycle], self.values)

        self.assertEqual(Fraction(32, 9), utility)
        self.assertGreater(utility, 3)

    def test__bid_seven__earns_three(self):
        self.assertEqual(Fraction(3), empirical_product_utility(0, 7, [self.cycle, self.cycle], self.values))

    def test__point_mass_opponents__sole_winner(self):
        values = ValueProfile((4, 4, 4))
        zero = [1, 0, 0, 0]

        self.assertEqual(3, empirical_product_utility(0, 1, [zero, zero], values))

    def test__unnormalized_distribution__raises_domain_error(self):
        with self.assertRaises(DomainError):
            empirical_product_utility(0, 2, [{6: Fraction(1, 2)}, self.cycle], self.values)

    def test__best_response__finds_a_bid_better_than_seven(self):
        bid, utility = empirical_best_response(0, [self.cycle, self.cycle], self.values)

        self.assertGreater(utility, 3)
        self.assertNotEqual(7, bid)

    def test__limit_distributions__are_not_an_equilibrium(self):
        distributions = [{7: Fraction(1)}, self.cycle, self.cycle]

        is_nash, gains = is_empirical_nash(self.values, distributions)

        self.assertFalse(is_nash)
        self.assertGreaterEqual(gains[0], Fraction(32, 9) - 3)


class TestEquilibriumSet(SimpleTestCase):
    def test__profiles__are_sorted_and_deduplicated(self):
        ne = EquilibriumSet.from_profiles([(3, 3), (2, 2), (3, 3)])

        self.assertEqual(((2, 2), (3, 3)), ne.profiles)
        self.assertIn((2, 2), ne)
        self.assertIn(BidProfile((3, 3)), ne)

    def test__to_json__is_a_compact_array(self):
        self.assertEqual("[[3,3,3]]", EquilibriumSet.from_profiles([(3, 3, 3)]).to_json())

    def test__from_json__reads_what_to_json_wrote(self):
        ne = EquilibriumSet.from_profiles([(4, 4, 0), (4, 4, 3), (4, 4, 1)])

        self.assertEqual(ne, EquilibriumSet.from_json(ne.to_json()))
