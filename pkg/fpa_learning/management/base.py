import logging
import tomllib
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from fpa_learning.consts import (
    DEFAULT_MWU_AUDIT_SCALE,
    EXIT_CAPACITY_ERROR,
    EXIT_CONFIG_ERROR,
    LEARNER_FTL,
    MWU_AUDIT_SCALE_SETTINGS_KEY,
    OUTPUT_DIR_SETTINGS_KEY,
    TIEBREAK_EXAMPLE1,
)
from fpa_learning.dynamics import RunConfig
from fpa_learning.exceptions import CapacityError, FpaLearningError
from fpa_learning.learners import (
    CounterexampleGamma,
    EpsilonGamma,
    EpsilonSchedule,
    LearnerSpec,
    ZeroGamma,
    build_learner,
    with_example1_tiebreak,
)
from fpa_learning.types import ValueProfile
from fpa_learning.util import get_setting, parse_int_list, parse_int_lists

logger = logging.getLogger(__name__)

RUN_DEFAULTS = {
    "algo": LEARNER_FTL,
    "tiebreak": "lowest",
    "eps_exponent": 0.5,
    "eps_scale": 1.0,
    "t0": 1000,
    "seed": 0,
    "format": "json,csv",
}

GAMMA_CHOICES = ("default", "zero", "eps", "mwu", "counterexample")


def load_toml(path):
    try:
        with Path(path).open("rb") as f:
            return tomllib.load(f)
    except FileNotFoundError:
        raise CommandError(f"Config file {path} does not exist.", returncode=EXIT_CONFIG_ERROR)
    except tomllib.TOMLDecodeError as e:
        raise CommandError(f"Config file {path} is not valid TOML: {e}", returncode=EXIT_CONFIG_ERROR)


def gamma_for(name, spec: LearnerSpec, bidder, values: ValueProfile, factor=None):
    """The audit schedule called `name` for one bidder; "default" is the learner's own"""

    if name in (None, "default"):
        return build_learner(spec, bidder, values).default_gamma()
    if name == "zero":
        return ZeroGamma()
    if name == "eps":
        return EpsilonGamma(spec.schedule, factor if factor is not None else 1.0)
    if name == "mwu":
        scale = factor if factor is not None else get_setting(MWU_AUDIT_SCALE_SETTINGS_KEY, DEFAULT_MWU_AUDIT_SCALE)
        return EpsilonGamma(spec.schedule, scale)
    if name == "counterexample":
        return CounterexampleGamma(spec.t0)
    raise CommandError(f"Unknown gamma schedule {name!r}.", returncode=EXIT_CONFIG_ERROR)


class FpaCommand(BaseCommand):
    """
    Base class of the fpa commands. Options come from an optional TOML file given with
    --config, then from the command line; command-line flags win.
    """

    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument("--config", help="TOML file with default options")
        parser.add_argument("--output-dir", dest="output_dir", help="Directory for emitted files")

    def add_run_arguments(self, parser):
        parser.add_argument("--values", help="Comma separated bidder values, e.g. 4,4")
        parser.add_argument("--cap", type=int, help="The value cap V, defaults to the highest value")
        parser.add_argument("--algo", help="Learner kind for every bidder")
        parser.add_argument("--tiebreak", help="lowest, highest, round-robin, scripted or example1")
        parser.add_argument("--script", help="Scripted bids, per bidder separated by ';'")
        parser.add_argument("--eps-exponent", dest="eps_exponent", type=float)
        parser.add_argument("--eps-scale", dest="eps_scale", type=float)
        parser.add_argument("--t0", type=int, help="First phase length of the counterexample learner")
        parser.add_argument("--rounds", type=int)
        parser.add_argument("--seed", type=int)
        parser.add_argument("--checkpoint-stride", dest="checkpoint_stride", type=int)
        parser.add_argument("--no-snapshots", dest="no_snapshots", action="store_true", default=None)

    def merge_options(self, options, defaults=None):
        merged = dict(defaults or {})
        if options.get("config"):
            merged.update({key.replace("-", "_"): value for key, value in load_toml(options["config"]).items()})
        merged.update({key: value for key, value in options.items() if value is not None})
        return merged

    def output_dir(self, options):
        return Path(options.get("output_dir") or get_setting(OUTPUT_DIR_SETTINGS_KEY, "."))

    def formats(self, options):
        value = options.get("format") or ""
        if isinstance(value, str):
            value = value.split(",")
        return {item.strip() for item in value if item.strip()}

    def learner_specs(self, options, values: ValueProfile):
        tiebreak = options.get("tiebreak", "lowest")
        example1 = tiebreak == TIEBREAK_EXAMPLE1

        if options.get("learners"):
            specs = tuple(LearnerSpec.from_dict(data) for data in options["learners"])
        else:
            script = options.get("script") or ""
            if isinstance(script, (list, tuple)) and all(isinstance(bid, int) for bid in script):
                script = [script]
            scripts = parse_int_lists(script) or ((),)
            if len(scripts) == 1:
                scripts = scripts * values.n
            if len(scripts) != values.n:
                raise CommandError(
                    f"Got {len(scripts)} scripts for {values.n} bidders.", returncode=EXIT_CONFIG_ERROR
                )

            schedule = EpsilonSchedule(float(options["eps_exponent"]), float(options["eps_scale"]))
            specs = tuple(
                LearnerSpec(
                    kind=options["algo"],
                    schedule=schedule,
                    tiebreak="lowest" if example1 else tiebreak,
                    script=script,
                    t0=int(options["t0"]),
                )
                for script in scripts
            )

        if example1:
            specs = with_example1_tiebreak(values, specs)
        return specs

    def run_config(self, options) -> RunConfig:
        if not options.get("values"):
            raise CommandError("--values is required.", returncode=EXIT_CONFIG_ERROR)
        if options.get("rounds") is None:
            raise CommandError("--rounds is required.", returncode=EXIT_CONFIG_ERROR)

        values = ValueProfile(parse_int_list(options["values"]), options.get("cap"))
        return RunConfig(
            values=values,
            learners=self.learner_specs(options, values),
            rounds=int(options["rounds"]),
            seed=int(options.get("seed", 0)),
            checkpoint_stride=options.get("checkpoint_stride"),
            snapshots=not options.get("no_snapshots", False),
        )

    def execute(self, *args, **options):
        try:
            return super().execute(*args, **options)
        except CapacityError as e:
            raise CommandError(str(e), returncode=EXIT_CAPACITY_ERROR)
        except FpaLearningError as e:
            raise CommandError(str(e), returncode=EXIT_CONFIG_ERROR)
