import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fpa_learning.consts import (
    LEARNER_COUNTEREXAMPLE,
    LEARNER_EPS_GREEDY,
    LEARNER_FTL,
    LEARNER_MWU,
    OUTPUT_DIR_SETTINGS_KEY,
)
from fpa_learning.dynamics import RunConfig, RunRecord, run, time_average_ne_fraction
from fpa_learning.equilibria import enumerate_pure_nash
from fpa_learning.exceptions import ConfigurationError
from fpa_learning.export import render_run_chart, write_run, write_summary
from fpa_learning.learners import CounterexampleState, LearnerSpec, with_example1_tiebreak
from fpa_learning.montecarlo import BatchConfig, BatchSummary, run_batch
from fpa_learning.types import ValueProfile
from fpa_learning.util import get_setting

logger = logging.getLogger(__name__)

DEFAULT_MASTER_SEED = 20240501


@dataclass
class ExperimentResult:
    experiment_id: str
    summary: Optional[BatchSummary] = None
    record: Optional[RunRecord] = None
    paths: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)


def _batch(values, kind, rounds, runs, overrides, **options):
    base = RunConfig(
        values=ValueProfile.parse(values),
        learners=LearnerSpec(kind=kind),
        rounds=overrides.get("rounds", rounds),
        checkpoint_stride=overrides.get("checkpoint_stride", 10),
    )
    return BatchConfig(
        base=base,
        runs=overrides.get("runs", runs),
        master_seed=overrides.get("master_seed", DEFAULT_MASTER_SEED),
        workers=overrides.get("workers"),
        **options,
    )


def _run_batch_experiment(experiment_id, config: BatchConfig, directory, svg):
    summary = run_batch(config)
    paths = write_summary(summary, directory, svg=svg)
    logger.info("%s: %s", experiment_id, summary.counts)
    return ExperimentResult(experiment_id, summary=summary, paths=paths)


def two_top_bidders(kind):
    """Two bidders with value 4: does the learner settle on bid 3 or on bid 2?"""

    def experiment(experiment_id, directory, overrides, svg):
        config = _batch((4, 4), kind, 2000, 1000, overrides)
        return _run_batch_experiment(experiment_id, config, directory, svg)

    return experiment


def one_top_bidder(kind):
    """Values (8, 6): the second bidder keeps switching its leading bid"""

    def experiment(experiment_id, directory, overrides, svg):
        rounds = overrides.get("rounds", 20000)
        config = _batch(
            (8, 6),
            kind,
            rounds,
            100,
            overrides,
            tracked_bids=(6, 5),
            oscillation_bidder=1,
            oscillation_window=(rounds // 2, rounds),
        )
        return _run_batch_experiment(experiment_id, config, directory, svg)

    return experiment


def three_top_bidders(kind):
    """Three bidders with value 4: time-average and last-iterate convergence to bid 3"""

    def experiment(experiment_id, directory, overrides, svg):
        config = _batch((4, 4, 4), kind, 5000, 200, overrides)
        return _run_batch_experiment(experiment_id, config, directory, svg)

    return experiment


def _run_single(experiment_id, config: RunConfig, directory, svg):
    ne = enumerate_pure_nash(config.values)
    record = run(config)
    paths = list(write_run(record, directory, ne))
    if svg:
        paths.append(render_run_chart(record, Path(directory) / "run.svg"))

    notes = {"ne_fraction": time_average_ne_fraction(record, ne, exact=True)[-1]}
    return ExperimentResult(experiment_id, record=record, paths=paths, notes=notes)


def example1(experiment_id, directory, overrides, svg):
    """Follow the leader with scripted tie-breaks on (10, 7, 7): a cycle of period three"""

    values = ValueProfile((10, 7, 7))
    learners = with_example1_tiebreak(values, (LearnerSpec(kind=LEARNER_FTL),) * values.n)
    config = RunConfig(values, learners, rounds=overrides.get("rounds", 300), seed=overrides.get("seed", 0))
    return _run_single(experiment_id, config, directory, svg)


def counterexample(experiment_id, directory, overrides, svg):
    """Two counterexample learners on (3, 3), run through the second epoch"""

    t0 = overrides.get("t0", 1000)
    rounds = overrides.get("rounds", 32 ** 2 * t0)
    state = CounterexampleState(t0)
    config = RunConfig(
        values=ValueProfile((3, 3)),
        learners=LearnerSpec(kind=LEARNER_COUNTEREXAMPLE, t0=t0),
        rounds=rounds,
        seed=overrides.get("seed", 0),
        checkpoint_stride=overrides.get("checkpoint_stride", t0),
        extra_checkpoints=tuple(state.boundaries(rounds)),
    )
    result = _run_single(experiment_id, config, directory, svg)
    result.notes["boundaries"] = [
        t
        for t in state.boundaries(rounds)
        if all(x.is_point_mass(2) for x in result.record.checkpoint_at(t).x)
    ]
    return result


EXPERIMENTS = {
    "m2-epsgreedy": two_top_bidders(LEARNER_EPS_GREEDY),
    "m2-mwu": two_top_bidders(LEARNER_MWU),
    "m1-epsgreedy": one_top_bidder(LEARNER_EPS_GREEDY),
    "m1-mwu": one_top_bidder(LEARNER_MWU),
    "m3-epsgreedy": three_top_bidders(LEARNER_EPS_GREEDY),
    "m3-mwu": three_top_bidders(LEARNER_MWU),
    "example1": example1,
    "counterexample": counterexample,
}


def reproduce(experiment_id, output_dir=None, overrides=None, svg=True) -> ExperimentResult:
    """Run a named experiment and write its files under output_dir/experiment_id"""

    try:
        experiment = EXPERIMENTS[experiment_id]
    except KeyError:
        known = ", ".join(sorted(EXPERIMENTS))
        raise ConfigurationError(f"Unknown experiment {experiment_id!r}. Known experiments: {known}.") from None

    if output_dir is None:
        output_dir = get_setting(OUTPUT_DIR_SETTINGS_KEY, ".")

    directory = Path(output_dir) / experiment_id
    logger.info("Reproducing %s into %s", experiment_id, directory)
    return experiment(experiment_id, directory, dict(overrides or {}), svg)
