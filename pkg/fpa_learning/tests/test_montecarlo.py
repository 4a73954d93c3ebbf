from unittest import mock

import numpy as np
from django.test import SimpleTestCase, override_settings

from fpa_learning.dynamics import Outcome, RunConfig
from fpa_learning.exceptions import ConfigurationError, DomainError
from fpa_learning.learners import LearnerSpec
from fpa_learning.montecarlo import BatchConfig, derive_run_seed, quantile_bands, run_batch, splitmix64
from fpa_learning.signals import post_batch, post_batch_run
from fpa_learning.tests.factories import BatchConfigFactory, RunConfigFactory


class TestSeeds(SimpleTestCase):
    def test__first_run_of_master_zero(self):
        self.assertEqual(0xE220A8397B1DCDAF, derive_run_seed(0, 0))

    def test__splitmix64__stays_in_64_bits(self):
        self.assertEqual(0, splitmix64(0))
        self.assertLess(splitmix64(2**64 - 1), 2**64)

    def test__seeds__are_distinct_per_index_and_master(self):
        seeds = {derive_run_seed(master, index) for master in (0, 1, 2) for index in range(100)}

        self.assertEqual(300, len(seeds))

    def test__run_config__uses_the_derived_seed(self):
        config = BatchConfigFactory(master_seed=42)

        self.assertEqual(derive_run_seed(42, 3), config.run_config(3).seed)


class TestQuantileBands(SimpleTestCase):
    def test__linear_interpolation(self):
        band = quantile_bands([[value] for value in range(1, 11)])

        np.testing.assert_allclose(band.lower, [1.9])
        np.testing.assert_allclose(band.median, [5.5])
        np.testing.assert_allclose(band.upper, [9.1])

    def test__pointwise_over_checkpoints(self):
        band = quantile_bands([[0.0, 1.0], [1.0, 1.0]], 0.0, 1.0)

        np.testing.assert_allclose(band.lower, [0.0, 1.0])
        np.testing.assert_allclose(band.upper, [1.0, 1.0])

    def test__invalid_input__raises_domain_error(self):
        with self.assertRaises(DomainError):
            quantile_bands([])

        with self.assertRaises(DomainError):
            quantile_bands([[1.0], [1.0, 2.0]])

        with self.assertRaises(DomainError):
            quantile_bands([[1.0]], 0.9, 0.1)


class TestBatchConfig(SimpleTestCase):
    def test__tracks_v_minus_one_and_v_minus_two_of_a_top_bidder(self):
        config = BatchConfigFactory(base=RunConfigFactory(values=(3, 6, 6)))

        self.assertEqual(1, config.tracked_bidder)
        self.assertEqual((5, 4), config.tracked_bids)

    def test__invalid_batches__raise(self):
        with self.assertRaises(ConfigurationError):
            BatchConfigFactory(runs=0)

        with self.assertRaises(DomainError):
            BatchConfigFactory(tracked_bids=(4,))

    @override_settings(FPA_LEARNING_CLASSIFICATION_THRESHOLD=0.8)
    def test__threshold__defaults_to_the_setting(self):
        self.assertEqual(0.8, BatchConfigFactory().threshold)


class TestRunBatch(SimpleTestCase):
    def test__follow_the_leader__every_run_settles_on_v_minus_two(self):
        summary = run_batch(BatchConfigFactory())

        self.assertEqual(4, summary.counts[Outcome.V_MINUS_2.value])
        self.assertEqual(1.0, summary.fraction(Outcome.V_MINUS_2))
        self.assertEqual(100, len(summary.checkpoints))
        np.testing.assert_allclose(summary.bands[2].median[-1], 0.96)
        np.testing.assert_allclose(summary.ne_band.median[-1], 0.96)
        self.assertEqual([Outcome.V_MINUS_2.value], list(summary.bands_by_verdict))

    def test__counts__cover_every_run(self):
        base = RunConfigFactory(values=(4, 4), learners=LearnerSpec(kind="eps-greedy"), rounds=200)
        summary = run_batch(BatchConfigFactory(base=base, runs=6))

        self.assertEqual(6, sum(summary.counts.values()))
        self.assertEqual(list(range(6)), [outcome.index for outcome in summary.runs])
        for band in summary.bands.values():
            self.assertTrue((band.lower <= band.median).all())
            self.assertTrue((band.median <= band.upper).all())

    def test__same_master_seed__same_summary(self):
        base = RunConfigFactory(values=(4, 4, 4), learners=LearnerSpec(kind="mwu"), rounds=100)
        config = BatchConfigFactory(base=base)

        first = run_batch(config)
        second = run_batch(config)

        self.assertEqual(first.to_dict(), second.to_dict())
        np.testing.assert_array_equal(first.bands[3].median, second.bands[3].median)

    def test__worker_count__does_not_change_the_summary(self):
        base = RunConfigFactory(values=(4, 4), learners=LearnerSpec(kind="eps-greedy"), rounds=80)

        inline = run_batch(BatchConfigFactory(base=base, workers=1))
        pooled = run_batch(BatchConfigFactory(base=base, workers=2))

        self.assertEqual(inline.to_dict(), pooled.to_dict())
        np.testing.assert_array_equal(inline.bands[2].upper, pooled.bands[2].upper)

    @override_settings(FPA_LEARNING_WORKERS=None)
    def test__unset_worker_count__uses_every_cpu(self):
        with mock.patch("fpa_learning.montecarlo.os.cpu_count", return_value=2):
            with self.assertLogs("fpa_learning.montecarlo", "INFO") as logs:
                summary = run_batch(BatchConfigFactory(runs=3))

        self.assertIn("with 2 worker(s)", "\n".join(logs.output))
        self.assertEqual(3, len(summary.runs))

    def test__worker_count__never_exceeds_the_runs(self):
        with self.assertLogs("fpa_learning.montecarlo", "INFO") as logs:
            run_batch(BatchConfigFactory(runs=1, workers=8))

        self.assertIn("with 1 worker(s)", "\n".join(logs.output))

    def test__oscillation_window__is_reported_per_run(self):
        base = RunConfig((8, 6), LearnerSpec(kind="eps-greedy"), rounds=200)
        summary = run_batch(BatchConfig(base, runs=2, oscillation_window=(100, 200)))

        self.assertEqual(1, summary.config.oscillation_bidder)
        self.assertTrue(all(outcome.oscillations >= 0 for outcome in summary.runs))
        self.assertIn("oscillations", summary.to_dict()["runs"][0])

    def test__signals__report_progress(self):
        progress = []
        finished = []

        def on_run(sender, outcome, index, total, **kwargs):
            progress.append((index, total))

        def on_batch(sender, summary, **kwargs):
            finished.append(len(summary.runs))

        post_batch_run.connect(on_run, weak=False)
        post_batch.connect(on_batch, weak=False)
        try:
            run_batch(BatchConfigFactory(runs=3))
        finally:
            post_batch_run.disconnect(on_run)
            post_batch.disconnect(on_batch)

        self.assertEqual([(0, 3), (1, 3), (2, 3)], progress)
        self.assertEqual([3], finished)
