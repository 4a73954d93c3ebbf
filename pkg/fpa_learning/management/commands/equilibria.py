import json

from django.core.management.base import CommandError

from fpa_learning.consts import EXIT_CONFIG_ERROR
from fpa_learning.export import equilibria_to_dict, write_equilibria
from fpa_learning.management.base import FpaCommand
from fpa_learning.equilibria import EQUILIBRIUM_METHODS, find_equilibria
from fpa_learning.types import ValueProfile
from fpa_learning.util import parse_int_list


class Command(FpaCommand):
    help = "Enumerate the pure-strategy Nash equilibria of a first-price auction"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--values", help="Comma separated bidder values, e.g. 4,4,4")
        parser.add_argument("--cap", type=int)
        parser.add_argument("--method", choices=EQUILIBRIUM_METHODS)
        parser.add_argument("--format", choices=("json",))

    def handle(self, *args, **options):
        options = self.merge_options(options, {"method": "closed"})
        if not options.get("values"):
            raise CommandError("--values is required.", returncode=EXIT_CONFIG_ERROR)

        values = ValueProfile(parse_int_list(options["values"]), options.get("cap"))
        ne, agreement = find_equilibria(values, options["method"])

        write_equilibria(ne, self.output_dir(options), options["method"], agreement)

        self.stdout.write(ne.to_json())
        if agreement is not None:
            self.stdout.write(json.dumps(equilibria_to_dict(ne, options["method"], agreement)))
