from fpa_learning.experiments import EXPERIMENTS, reproduce
from fpa_learning.management.base import FpaCommand

OVERRIDES = ("runs", "rounds", "master_seed", "workers", "t0", "seed", "checkpoint_stride")


class Command(FpaCommand):
    help = "Reproduce one of the named experiments"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("experiment_id", help=", ".join(sorted(EXPERIMENTS)))
        parser.add_argument("--runs", type=int)
        parser.add_argument("--rounds", type=int)
        parser.add_argument("--master-seed", dest="master_seed", type=int)
        parser.add_argument("--seed", type=int)
        parser.add_argument("--workers", type=int)
        parser.add_argument("--t0", type=int)
        parser.add_argument("--checkpoint-stride", dest="checkpoint_stride", type=int)
        parser.add_argument("--no-svg", dest="no_svg", action="store_true", default=None)

    def handle(self, *args, **options):
        options = self.merge_options(options)
        overrides = {key: options[key] for key in OVERRIDES if options.get(key) is not None}

        result = reproduce(
            options["experiment_id"], self.output_dir(options), overrides, svg=not options.get("no_svg")
        )

        if result.summary is not None:
            self.stdout.write(" ".join(f"{verdict}={count}" for verdict, count in result.summary.counts.items()))
        for key, value in result.notes.items():
            self.stdout.write(f"{key}: {value}")
        for path in result.paths:
            self.stdout.write(str(path))
