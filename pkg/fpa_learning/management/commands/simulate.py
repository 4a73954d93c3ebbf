import json

from fpa_learning.dynamics import classify_convergence, run, time_average_ne_fraction
from fpa_learning.equilibria import enumerate_pure_nash
from fpa_learning.exceptions import CapacityError
from fpa_learning.export import render_run_chart, write_run
from fpa_learning.management.base import RUN_DEFAULTS, FpaCommand


class Command(FpaCommand):
    help = "Run one repeated first-price auction and write run.json and trace.csv"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_run_arguments(parser)
        parser.add_argument("--format", help="Comma separated subset of json, csv, svg")

    def handle(self, *args, **options):
        options = self.merge_options(options, RUN_DEFAULTS)
        config = self.run_config(options)
        record = run(config)

        try:
            ne = enumerate_pure_nash(config.values)
        except CapacityError:
            ne = None

        directory = self.output_dir(options)
        write_run(record, directory, ne)
        if "svg" in self.formats(options):
            render_run_chart(record, directory / "run.svg", bidders=tuple(range(min(2, config.values.n))))

        verdict = classify_convergence(record)
        self.stdout.write(f"verdict: {verdict.outcome.value}")
        self.stdout.write(
            "terminal frequencies: " + json.dumps([f.tolist() for f in record.terminal_frequencies])
        )
        if ne is not None:
            self.stdout.write(f"NE fraction: {time_average_ne_fraction(record, ne, exact=True)[-1]}")
        if record.violation_count():
            self.stdout.write(f"mean-based violations: {record.violation_count()}")
