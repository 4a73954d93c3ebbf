import json
from dataclasses import replace

from django.core.management.base import CommandError

from fpa_learning.consts import EXIT_AUDIT_VIOLATIONS
from fpa_learning.dynamics import audit_record, run
from fpa_learning.export import write_json, read_run
from fpa_learning.management.base import GAMMA_CHOICES, RUN_DEFAULTS, FpaCommand, gamma_for


class Command(FpaCommand):
    help = "Check a run against the mean-based property, from run flags or a stored record"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_run_arguments(parser)
        parser.add_argument("--record", help="Directory holding run.json and trace.csv")
        parser.add_argument("--gamma", choices=GAMMA_CHOICES)
        parser.add_argument("--gamma-factor", dest="gamma_factor", type=float)
        parser.add_argument("--strict", action="store_true", default=None)

    def handle(self, *args, **options):
        options = self.merge_options(options, {**RUN_DEFAULTS, "gamma": "default"})

        if options.get("record"):
            record = read_run(options["record"])
        else:
            config = replace(self.run_config(options), checkpoint_stride=1, snapshots=True, audit=False)
            record = run(config)

        values = record.values
        gammas = [
            gamma_for(options["gamma"], spec, i, values, options.get("gamma_factor"))
            for i, spec in enumerate(record.config.learners)
        ]
        violations = audit_record(record, gammas)

        report = [[violation.to_dict() for violation in found] for found in violations]
        write_json(self.output_dir(options) / "audit.json", {"violations": report})

        total = sum(len(found) for found in violations)
        self.stdout.write(json.dumps({"violations": total}))

        if total and options.get("strict"):
            raise CommandError(f"Found {total} mean-based violations.", returncode=EXIT_AUDIT_VIOLATIONS)
