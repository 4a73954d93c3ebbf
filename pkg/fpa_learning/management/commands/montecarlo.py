import logging

from fpa_learning.export import write_summary
from fpa_learning.management.base import RUN_DEFAULTS, FpaCommand
from fpa_learning.montecarlo import BatchConfig, run_batch
from fpa_learning.signals import post_batch_run
from fpa_learning.util import parse_int_list

logger = logging.getLogger(__name__)


def log_progress(sender, outcome, index, total, **kwargs):
    step = max(1, total // 10)
    if (index + 1) % step == 0 or index + 1 == total:
        logger.info("Finished run %d of %d", index + 1, total)


class Command(FpaCommand):
    help = "Run a batch of seeded runs and write summary.json and quantile band CSVs"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_run_arguments(parser)
        parser.add_argument("--runs", type=int)
        parser.add_argument("--master-seed", dest="master_seed", type=int)
        parser.add_argument("--threshold", type=float)
        parser.add_argument("--workers", type=int)
        parser.add_argument("--tracked-bids", dest="tracked_bids")
        parser.add_argument("--oscillation-window", dest="oscillation_window", help="start,end")
        parser.add_argument("--format", help="Comma separated subset of json, csv, svg")

    def handle(self, *args, **options):
        options = self.merge_options(options, {**RUN_DEFAULTS, "runs": 1, "master_seed": 0})
        base = self.run_config(options)
        window = parse_int_list(options.get("oscillation_window")) or None

        config = BatchConfig(
            base=base,
            runs=int(options["runs"]),
            master_seed=int(options["master_seed"]),
            threshold=options.get("threshold"),
            tracked_bids=parse_int_list(options.get("tracked_bids")),
            oscillation_window=window,
            workers=options.get("workers"),
        )

        post_batch_run.connect(log_progress, dispatch_uid="fpa_montecarlo_progress")
        try:
            summary = run_batch(config)
        finally:
            post_batch_run.disconnect(dispatch_uid="fpa_montecarlo_progress")

        write_summary(summary, self.output_dir(options), svg="svg" in self.formats(options))
        self.stdout.write(
            " ".join(f"{verdict}={count}" for verdict, count in summary.counts.items())
        )
