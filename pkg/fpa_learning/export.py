import csv
import json
import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from fpa_learning.dynamics import Checkpoint, RunConfig, RunRecord, classify_convergence, ne_indicator  # noqa: E402
from fpa_learning.exceptions import ConfigurationError, DomainError  # noqa: E402
from fpa_learning.stats import HistoryStats  # noqa: E402
from fpa_learning.types import EquilibriumSet, MixedStrategy  # noqa: E402

logger = logging.getLogger(__name__)

RUN_FILE = "run.json"
TRACE_FILE = "trace.csv"
SUMMARY_FILE = "summary.json"
EQUILIBRIA_FILE = "equilibria.json"

SVG_PARAMS = {"svg.hashsalt": "fpa-learning", "svg.fonttype": "none"}


def write_json(path, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2) + "\n")
    return path


def ensure_directory(directory):
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigurationError(f"Cannot create the output directory {directory}: {e}") from e
    return directory


def run_to_dict(record: RunRecord, include_violations=True):
    data = {
        "config": record.config.to_dict(),
        "verdict": classify_convergence(record).outcome.value,
        "terminal_frequencies": [f.tolist() for f in record.terminal_frequencies],
        "checkpoints": [
            {
                "t": checkpoint.t,
                "x": [x.tolist() for x in checkpoint.x] if checkpoint.x is not None else None,
                "f": [f.tolist() for f in checkpoint.f],
            }
            for checkpoint in record.checkpoints
        ],
        "wins": list(record.wins),
        "statistics": record.stats.summary(),
    }

    if include_violations and record.violations is not None:
        data["violations"] = [[violation.to_dict() for violation in found] for found in record.violations]

    return data


def write_trace_csv(record: RunRecord, path, ne: EquilibriumSet = None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    in_ne = ne_indicator(record, ne) if ne is not None else np.zeros(record.rounds, dtype=bool)
    header = ["t"] + [f"bid_{i + 1}" for i in range(record.values.n)] + ["in_ne"]

    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for t, (bids, hit) in enumerate(zip(record.trace.tolist(), in_ne.tolist()), start=1):
            writer.writerow([t, *bids, int(hit)])

    return path


def write_run(record: RunRecord, directory, ne: EquilibriumSet = None):
    directory = ensure_directory(directory)
    run_path = write_json(directory / RUN_FILE, run_to_dict(record))
    trace_path = write_trace_csv(record, directory / TRACE_FILE, ne)
    return run_path, trace_path


def read_trace_csv(path, n):
    with Path(path).open(newline="") as f:
        rows = list(csv.DictReader(f))
    return np.array([[int(row[f"bid_{i + 1}"]) for i in range(n)] for row in rows], dtype=np.int64)


def read_run(directory) -> RunRecord:
    """Load a record written by `write_run`; audit violations are not restored"""

    directory = Path(directory)
    try:
        data = json.loads((directory / RUN_FILE).read_text())
    except FileNotFoundError as e:
        raise ConfigurationError(f"No {RUN_FILE} in {directory}.") from e

    config = RunConfig.from_dict(data["config"])
    trace = read_trace_csv(directory / TRACE_FILE, config.values.n)
    if len(trace) != config.rounds:
        raise DomainError(f"The trace has {len(trace)} rounds, the config says {config.rounds}.")

    checkpoints = tuple(
        Checkpoint(
            item["t"],
            tuple(MixedStrategy(x) for x in item["x"]) if item["x"] is not None else None,
            tuple(np.array(f) for f in item["f"]),
        )
        for item in data["checkpoints"]
    )

    return RunRecord(
        config=config,
        trace=trace,
        checkpoints=checkpoints,
        stats=HistoryStats.from_trace(config.values, trace),
        wins=tuple(data.get("wins") or ()),
    )


def write_band_csv(checkpoints, band, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["t", "freq_q10", "freq_median", "freq_q90"])
        for row in zip(checkpoints, band.lower.tolist(), band.median.tolist(), band.upper.tolist()):
            writer.writerow([row[0], repr(row[1]), repr(row[2]), repr(row[3])])

    return path


def write_summary(summary, directory, svg=False):
    directory = ensure_directory(directory)
    paths = [write_json(directory / SUMMARY_FILE, summary.to_dict())]

    for bid, band in summary.bands.items():
        paths.append(write_band_csv(summary.checkpoints, band, directory / f"band_bid_{bid}.csv"))

    for verdict, bands in summary.bands_by_verdict.items():
        for bid, band in bands.items():
            paths.append(write_band_csv(summary.checkpoints, band, directory / f"band_bid_{bid}_{verdict}.csv"))

    if summary.ne_band is not None:
        paths.append(write_band_csv(summary.checkpoints, summary.ne_band, directory / "band_ne_fraction.csv"))

    if svg:
        paths.append(render_band_chart(summary, directory / "bands.svg"))

    return paths


def equilibria_to_dict(ne: EquilibriumSet, method, agreement=None):
    data = {"method": method, "profiles": [list(profile) for profile in ne]}
    if agreement is not None:
        data["agreement"] = agreement
    return data


def write_equilibria(ne: EquilibriumSet, directory, method, agreement=None):
    directory = ensure_directory(directory)
    path = directory / EQUILIBRIA_FILE
    path.write_text(ne.to_json() + "\n")
    paths = [path]
    if agreement is not None:
        paths.append(write_json(directory / "agreement.json", equilibria_to_dict(ne, method, agreement)))
    return paths


def read_equilibria(directory) -> EquilibriumSet:
    path = Path(directory) / EQUILIBRIA_FILE
    try:
        return EquilibriumSet.from_json(path.read_text())
    except FileNotFoundError as e:
        raise ConfigurationError(f"No {EQUILIBRIA_FILE} in {directory}.") from e


def _save_svg(figure, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    figure.savefig(path, format="svg", metadata={"Date": None})
    plt.close(figure)
    return path


def render_band_chart(summary, path):
    """Median frequency of each tracked bid with its quantile band, over the checkpoints"""

    lo, hi = summary.config.quantiles
    with plt.rc_context(SVG_PARAMS):
        figure, axis = plt.subplots(figsize=(6, 4))
        for bid, band in summary.bands.items():
            axis.plot(summary.checkpoints, band.median, label=f"bid {bid}")
            axis.fill_between(summary.checkpoints, band.lower, band.upper, alpha=0.25)
        axis.set_xlabel("round")
        axis.set_ylabel(f"frequency of bidder {summary.config.tracked_bidder + 1}")
        axis.set_title(f"median and [{lo:.0%}, {hi:.0%}] band over {len(summary.runs)} runs")
        axis.set_ylim(0, 1)
        axis.legend()
        return _save_svg(figure, path)


def render_run_chart(record: RunRecord, path, bidders=(0, 1)):
    """Bid frequencies (top row) and mixed strategies (bottom row) of two bidders of one run"""

    rounds = record.checkpoint_rounds()
    rows = 2 if record.has_snapshots else 1

    with plt.rc_context(SVG_PARAMS):
        figure, axes = plt.subplots(rows, len(bidders), figsize=(5 * len(bidders), 3.5 * rows), squeeze=False)

        for column, bidder in enumerate(bidders):
            frequencies = np.array([checkpoint.f[bidder] for checkpoint in record.checkpoints])
            axis = axes[0][column]
            for bid in range(frequencies.shape[1]):
                axis.plot(rounds, frequencies[:, bid], label=f"bid {bid}")
            axis.set_title(f"bidder {bidder + 1}: bid frequencies")
            axis.set_ylim(0, 1)
            axis.legend(fontsize="small")

            if record.has_snapshots:
                strategies = np.array([checkpoint.x[bidder].probs for checkpoint in record.checkpoints])
                axis = axes[1][column]
                for bid in range(strategies.shape[1]):
                    axis.plot(rounds, strategies[:, bid], label=f"bid {bid}")
                axis.set_title(f"bidder {bidder + 1}: mixed strategy")
                axis.set_xlabel("round")
                axis.set_ylim(0, 1)

        figure.tight_layout()
        return _save_svg(figure, path)
