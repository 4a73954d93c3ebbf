from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from fpa_learning.dynamics import (
    Outcome,
    RunConfig,
    RunRecord,
    classify_convergence,
    empirical_distributions,
    last_iterate_distance,
    ne_indicator,
    oscillation_indicator,
    run,
    time_average_ne_fraction,
)
from fpa_learning.equilibria import enumerate_pure_nash
from fpa_learning.exceptions import ConfigurationError, DomainError
from fpa_learning.learners import LearnerSpec, with_example1_tiebreak
from fpa_learning.signals import post_run
from fpa_learning.stats import HistoryStats
from fpa_learning.tests.factories import RunConfigFactory
from fpa_learning.types import MixedStrategy, ValueProfile


def record_from_trace(values, trace):
    values = ValueProfile.parse(values)
    return RunRecord(
        config=RunConfig(values, LearnerSpec(), rounds=len(trace)),
        trace=np.array(trace, dtype=np.int64),
        checkpoints=(),
        stats=HistoryStats.from_trace(values, trace),
    )


def example1_config(rounds=9):
    values = ValueProfile((10, 7, 7))
    learners = with_example1_tiebreak(values, (LearnerSpec(),) * values.n)
    return RunConfig(values, learners, rounds=rounds)


class TestRunConfig(SimpleTestCase):
    def test__single_spec__is_used_for_every_bidder(self):
        config = RunConfig((4, 4, 4), LearnerSpec(kind="mwu"), rounds=10)

        self.assertEqual(3, len(config.learners))
        self.assertTrue(all(spec.kind == "mwu" for spec in config.learners))

    def test__invalid_configs__raise_configuration_error(self):
        with self.assertRaises(ConfigurationError):
            RunConfig((4, 4), LearnerSpec(), rounds=0)

        with self.assertRaises(ConfigurationError):
            RunConfig((4, 4), LearnerSpec(), rounds=10, seed=-1)

        with self.assertRaises(ConfigurationError):
            RunConfig((4, 4), (LearnerSpec(),) * 3, rounds=10)

        with self.assertRaises(ConfigurationError):
            RunConfig((4, 4), LearnerSpec(), rounds=10, checkpoint_stride=0)

    def test__checkpoint_rounds(self):
        self.assertEqual((1, 2, 3), RunConfig((4, 4), LearnerSpec(), rounds=3).checkpoint_rounds())
        self.assertEqual(10, RunConfig((4, 4), LearnerSpec(), rounds=6000).stride)

        config = RunConfig((4, 4), LearnerSpec(), rounds=25, checkpoint_stride=10, extra_checkpoints=(3, 99))
        self.assertEqual((3, 10, 20, 25), config.checkpoint_rounds())

    def test__dict_round_trip(self):
        config = example1_config()

        self.assertEqual(config, RunConfig.from_dict(config.to_dict()))


class TestRun(SimpleTestCase):
    def test__example1__cycles_with_period_three(self):
        record = run(example1_config())

        expected = [[7, 6, 1], [7, 1, 6], [7, 1, 1]] * 3
        self.assertEqual(expected, record.trace.tolist())
        self.assertEqual((9, 0, 0), record.wins)

    def test__example1__is_at_equilibrium_two_thirds_of_the_time(self):
        record = run(example1_config())
        ne = enumerate_pure_nash(record.values)

        self.assertEqual([True, True, False] * 3, ne_indicator(record, ne).tolist())
        self.assertEqual(Fraction(2, 3), time_average_ne_fraction(record, ne, exact=True)[-1])

    def test__example1__empirical_distributions(self):
        record = run(example1_config())

        f = empirical_distributions(record)

        self.assertEqual(Fraction(1), f[0][7])
        self.assertEqual(Fraction(1, 3), f[1][6])
        self.assertEqual(Fraction(2, 3), f[2][1])

    def test__follow_the_leader_on_two_fours__settles_on_two(self):
        record = run(RunConfigFactory(values=(4, 4), rounds=100))

        self.assertEqual([[0, 0], [1, 1], [1, 1], [1, 1], [2, 2]], record.trace[:5].tolist())
        self.assertTrue((record.trace[4:] == 2).all())

    def test__same_seed__same_trace(self):
        config = RunConfigFactory(values=(4, 4, 4), learners=LearnerSpec(kind="eps-greedy"), rounds=300)

        first = run(config)
        second = run(config)

        np.testing.assert_array_equal(first.trace, second.trace)
        self.assertEqual(first.wins, second.wins)

    def test__different_seeds__different_traces(self):
        config = RunConfigFactory(values=(4, 4, 4), learners=LearnerSpec(kind="eps-greedy"), rounds=300)

        first = run(config.with_seed(1))
        second = run(config.with_seed(2))

        self.assertFalse(np.array_equal(first.trace, second.trace))

    def test__frequencies_at_checkpoints__match_the_trace(self):
        record = run(RunConfigFactory(values=(5, 3), learners=LearnerSpec(kind="mwu"), rounds=60))

        checkpoint = record.checkpoint_at(30)
        counts = np.bincount(record.trace[:30, 0], minlength=5)
        np.testing.assert_allclose(checkpoint.f[0], counts / 30)
        self.assertEqual(5, checkpoint.x[0].size)
        self.assertEqual(3, checkpoint.x[1].size)

    def test__without_snapshots__checkpoints_hold_frequencies_only(self):
        record = run(RunConfig((4, 4), LearnerSpec(), rounds=5, snapshots=False))

        self.assertFalse(record.has_snapshots)
        self.assertIsNone(record.checkpoint_at(5).x)

    def test__prefix__replaces_the_first_rounds(self):
        prefix = [(3, 3), (3, 3), (0, 3)]
        record = run(RunConfigFactory(values=(4, 4), rounds=10), prefix=prefix)

        self.assertEqual([list(bids) for bids in prefix], record.trace[:3].tolist())

    def test__prefix_longer_than_the_run__raises_configuration_error(self):
        with self.assertRaises(ConfigurationError):
            run(RunConfigFactory(values=(4, 4), rounds=2), prefix=[(3, 3)] * 3)

    def test__invalid_prefix__raises_domain_error(self):
        with self.assertRaises(DomainError):
            run(RunConfigFactory(values=(4, 4), rounds=2), prefix=[(4, 3)])

    def test__post_run__is_sent(self):
        received = []

        def receiver(sender, record, **kwargs):
            received.append(record.rounds)

        post_run.connect(receiver, weak=False)
        try:
            run(RunConfigFactory(rounds=7))
        finally:
            post_run.disconnect(receiver)

        self.assertEqual([7], received)


class TestLastIterateDistance(SimpleTestCase):
    def test__distance_to_point_mass(self):
        self.assertAlmostEqual(0.75, last_iterate_distance(MixedStrategy.uniform(4), 3))
        self.assertAlmostEqual(0.05, last_iterate_distance(MixedStrategy([0.02, 0.03, 0.95]), 2))
        self.assertEqual(0.0, last_iterate_distance(MixedStrategy.point_mass(1, 2), 1))

    def test__bid_outside_the_bid_set__raises_domain_error(self):
        with self.assertRaises(DomainError):
            last_iterate_distance(MixedStrategy.uniform(4), 4)


class TestClassifyConvergence(SimpleTestCase):
    def test__mostly_v_minus_one(self):
        record = record_from_trace((4, 4), [(3, 3)] * 95 + [(2, 2)] * 5)

        verdict = classify_convergence(record)

        self.assertEqual(Outcome.V_MINUS_1, verdict.outcome)
        self.assertAlmostEqual(0.95, verdict.minus_one)

    def test__mostly_v_minus_two(self):
        record = run(RunConfigFactory(values=(4, 4), rounds=100))

        verdict = classify_convergence(record)

        self.assertEqual(Outcome.V_MINUS_2, verdict.outcome)
        self.assertAlmostEqual(0.96, verdict.minus_two)

    def test__split__not_converged(self):
        record = record_from_trace((4, 4), [(3, 3)] * 50 + [(2, 2)] * 50)

        self.assertEqual(Outcome.NOT_CONVERGED, classify_convergence(record).outcome)

    def test__threshold__is_strict(self):
        record = record_from_trace((4, 4), [(3, 3)] * 9 + [(2, 2)])

        self.assertEqual(Outcome.NOT_CONVERGED, classify_convergence(record, threshold=0.9).outcome)
        self.assertEqual(Outcome.V_MINUS_1, classify_convergence(record, threshold=0.85).outcome)

    def test__bidder_below_the_top__raises_domain_error(self):
        record = record_from_trace((8, 6), [(6, 5)])

        with self.assertRaises(DomainError):
            classify_convergence(record, bidder=1)

    def test__threshold_out_of_range__raises_domain_error(self):
        record = record_from_trace((4, 4), [(3, 3)])

        with self.assertRaises(DomainError):
            classify_convergence(record, threshold=0.5)


class TestOscillationIndicator(SimpleTestCase):
    def setUp(self):
        self.record = run(RunConfigFactory(values=(4, 4), rounds=100))

    def test__counts_leader_switches(self):
        self.assertEqual(2, oscillation_indicator(self.record, 0, (1, 100)))
        self.assertEqual(0, oscillation_indicator(self.record, 0, (10, 100)))

    def test__bad_window__raises_domain_error(self):
        with self.assertRaises(DomainError):
            oscillation_indicator(self.record, 0, (50, 10))

        with self.assertRaises(DomainError):
            oscillation_indicator(self.record, 0, (1, 101))
