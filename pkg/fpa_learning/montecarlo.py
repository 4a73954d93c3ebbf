import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import repeat
from typing import Dict, Optional, Tuple

import numpy as np

from fpa_learning.consts import (
    CLASSIFICATION_THRESHOLD_SETTINGS_KEY,
    DEFAULT_CLASSIFICATION_THRESHOLD,
    GOLDEN_GAMMA,
    UINT64_MASK,
    WORKERS_SETTINGS_KEY,
)
from fpa_learning.dynamics import (
    ConvergenceVerdict,
    Outcome,
    RunConfig,
    classify_convergence,
    oscillation_indicator,
    run,
    time_average_ne_fraction,
)
from fpa_learning.equilibria import enumerate_pure_nash
from fpa_learning.exceptions import CapacityError, ConfigurationError, DomainError
from fpa_learning.signals import post_batch, post_batch_run
from fpa_learning.util import get_setting

logger = logging.getLogger(__name__)


def splitmix64(value) -> int:
    z = value & UINT64_MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & UINT64_MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & UINT64_MASK
    return z ^ (z >> 31)


def derive_run_seed(master, index) -> int:
    """The seed of run `index`: the SplitMix64 finalizer of master ^ ((index + 1) * golden gamma)"""
    return splitmix64(int(master) ^ (((int(index) + 1) * GOLDEN_GAMMA) & UINT64_MASK))


@dataclass(frozen=True)
class BatchConfig:
    """
    R independent runs of `base`, each seeded with `derive_run_seed(master_seed, index)`.

    The frequencies of `tracked_bids` for `tracked_bidder` are banded over the runs; both
    default to v1 - 1 and v1 - 2 for the first highest-value bidder.
    """

    base: RunConfig
    runs: int
    master_seed: int = 0
    threshold: Optional[float] = None
    checkpoint_stride: Optional[int] = None
    tracked_bidder: Optional[int] = None
    tracked_bids: Tuple[int, ...] = ()
    oscillation_bidder: Optional[int] = None
    oscillation_window: Optional[Tuple[int, int]] = None
    workers: Optional[int] = None
    quantiles: Tuple[float, float] = (0.1, 0.9)

    def __post_init__(self):
        if int(self.runs) < 1:
            raise ConfigurationError(f"A batch needs at least one run, got {self.runs}.")

        values = self.base.values
        if self.tracked_bidder is None:
            object.__setattr__(self, "tracked_bidder", values.top_group[0])
        if not 0 <= self.tracked_bidder < values.n:
            raise ConfigurationError(f"Tracked bidder {self.tracked_bidder} out of range.")

        if not self.tracked_bids:
            top = values.highest
            object.__setattr__(self, "tracked_bids", tuple(bid for bid in (top - 1, top - 2) if bid >= 0))
        for bid in self.tracked_bids:
            values.check_bid(self.tracked_bidder, bid)

        if self.threshold is None:
            object.__setattr__(
                self,
                "threshold",
                get_setting(CLASSIFICATION_THRESHOLD_SETTINGS_KEY, DEFAULT_CLASSIFICATION_THRESHOLD),
            )

        if self.oscillation_window is not None:
            object.__setattr__(self, "oscillation_window", tuple(self.oscillation_window))
            if self.oscillation_bidder is None:
                object.__setattr__(self, "oscillation_bidder", values.second_group[0] if values.second_group else 1)

    def run_config(self, index) -> RunConfig:
        config = self.base.with_seed(derive_run_seed(self.master_seed, index))
        if self.checkpoint_stride is not None:
            config = replace(config, checkpoint_stride=self.checkpoint_stride)
        return config


@dataclass(frozen=True, eq=False)
class RunOutcome:
    """What a batch keeps of one run"""

    index: int
    seed: int
    verdict: ConvergenceVerdict
    checkpoints: Tuple[int, ...]
    series: Dict[int, np.ndarray]
    terminal_frequencies: Tuple[Tuple[float, ...], ...]
    terminal_strategies: Optional[Tuple[Tuple[float, ...], ...]] = None
    ne_series: Optional[np.ndarray] = None
    oscillations: Optional[int] = None
    violations: int = 0

    @property
    def ne_fraction(self) -> Optional[float]:
        if self.ne_series is None:
            return None
        return float(self.ne_series[-1])

    def to_dict(self):
        data = {"index": self.index, "seed": self.seed, "verdict": self.verdict.outcome.value}
        if self.ne_series is not None:
            data["ne_fraction"] = self.ne_fraction
        if self.oscillations is not None:
            data["oscillations"] = self.oscillations
        data["violations"] = self.violations
        return data


def simulate_run(batch: BatchConfig, index, ne=None) -> RunOutcome:
    config = batch.run_config(index)
    record = run(config)

    bidder = batch.tracked_bidder
    series = {
        bid: np.array([checkpoint.f[bidder][bid] for checkpoint in record.checkpoints]) for bid in batch.tracked_bids
    }

    oscillations = None
    if batch.oscillation_window is not None:
        oscillations = oscillation_indicator(record, batch.oscillation_bidder, batch.oscillation_window)

    terminal_strategies = None
    if record.has_snapshots:
        terminal_strategies = tuple(tuple(x.tolist()) for x in record.checkpoints[-1].x)

    return RunOutcome(
        index=index,
        seed=config.seed,
        verdict=classify_convergence(record, bidder if bidder in config.values.top_group else None, batch.threshold),
        checkpoints=tuple(record.checkpoint_rounds()),
        series=series,
        terminal_frequencies=tuple(tuple(f.tolist()) for f in record.terminal_frequencies),
        terminal_strategies=terminal_strategies,
        ne_series=time_average_ne_fraction(record, ne) if ne is not None else None,
        oscillations=oscillations,
        violations=record.violation_count(),
    )


@dataclass(frozen=True)
class QuantileBand:
    lower: np.ndarray
    median: np.ndarray
    upper: np.ndarray


def quantile_bands(series, q_lo=0.1, q_hi=0.9) -> QuantileBand:
    """
    Pointwise quantiles over runs, interpolating linearly between order statistics at
    position q * (n - 1).
    """

    series = list(series)
    if not series:
        raise DomainError("Quantile bands need at least one series.")
    if len({len(row) for row in series}) != 1:
        raise DomainError("All series must have the same length.")
    if not 0 <= q_lo < q_hi <= 1:
        raise DomainError(f"Quantiles must satisfy 0 <= q_lo < q_hi <= 1, got ({q_lo}, {q_hi}).")

    table = np.asarray(series, dtype=float)
    lower, median, upper = np.quantile(table, [q_lo, 0.5, q_hi], axis=0, method="linear")
    return QuantileBand(lower, median, upper)


@dataclass(frozen=True, eq=False)
class BatchSummary:
    config: BatchConfig
    counts: Dict[str, int]
    checkpoints: Tuple[int, ...]
    bands: Dict[int, QuantileBand]
    bands_by_verdict: Dict[str, Dict[int, QuantileBand]]
    runs: Tuple[RunOutcome, ...]
    ne_band: Optional[QuantileBand] = None
    extra: Dict[str, object] = field(default_factory=dict)

    def fraction(self, outcome: Outcome) -> float:
        return self.counts[outcome.value] / len(self.runs)

    def to_dict(self):
        data = {
            "counts": dict(self.counts),
            "runs": [outcome.to_dict() for outcome in self.runs],
        }
        data.update(self.extra)
        return data


def _bands(outcomes, bids, quantiles):
    return {bid: quantile_bands([outcome.series[bid] for outcome in outcomes], *quantiles) for bid in bids}


def summarize(config: BatchConfig, outcomes) -> BatchSummary:
    """Fold index-sorted run outcomes into a summary"""

    outcomes = tuple(sorted(outcomes, key=lambda outcome: outcome.index))
    counts = {outcome.value: 0 for outcome in Outcome}
    for outcome in outcomes:
        counts[outcome.verdict.outcome.value] += 1

    by_verdict = {}
    for verdict in Outcome:
        members = [outcome for outcome in outcomes if outcome.verdict.outcome is verdict]
        if members:
            by_verdict[verdict.value] = _bands(members, config.tracked_bids, config.quantiles)

    ne_band = None
    if outcomes[0].ne_series is not None:
        ne_band = quantile_bands([outcome.ne_series for outcome in outcomes], *config.quantiles)

    return BatchSummary(
        config=config,
        counts=counts,
        checkpoints=outcomes[0].checkpoints,
        bands=_bands(outcomes, config.tracked_bids, config.quantiles),
        bands_by_verdict=by_verdict,
        runs=outcomes,
        ne_band=ne_band,
    )


def run_batch(config: BatchConfig) -> BatchSummary:
    """
    Run the batch inline or on a process pool. Outcomes are folded in run-index order, so
    the summary does not depend on the number of workers.
    """

    workers = config.workers or get_setting(WORKERS_SETTINGS_KEY, None) or os.cpu_count() or 1
    workers = min(workers, config.runs)

    try:
        ne = enumerate_pure_nash(config.base.values)
    except CapacityError:
        logger.warning("Too many bid profiles to enumerate equilibria; NE fractions are skipped")
        ne = None

    logger.info("Running %d runs with %d worker(s), master seed %d", config.runs, workers, config.master_seed)

    indices = range(config.runs)
    if workers == 1:
        results = (simulate_run(config, index, ne) for index in indices)
        outcomes = _collect(config, results)
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            chunksize = max(1, config.runs // (4 * workers))
            results = executor.map(simulate_run, repeat(config), indices, repeat(ne), chunksize=chunksize)
            outcomes = _collect(config, results)

    summary = summarize(config, outcomes)
    post_batch.send(sender=BatchConfig, summary=summary)
    return summary


def _collect(config, results):
    outcomes = []
    for outcome in results:
        outcomes.append(outcome)
        post_batch_run.send(sender=BatchConfig, outcome=outcome, index=outcome.index, total=config.runs)
    return outcomes
