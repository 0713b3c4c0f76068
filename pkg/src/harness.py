"""
Experiment Harness

Runs replicates of the per-replicate graph in a worker pool, isolates failed
replicates, aggregates metrics into means and standard deviations, and sweeps
the simulation scenario grid.
"""

import logging
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.stats import spearmanr

from .config import KERNEL_MODELS, ExperimentConfig
from .data.dataio import load_csv
from .data.dataset import Dataset
from .data.simgen import SCENARIO_SIZES, SCENARIO_WIDTHS, scenario_grid
from .errors import DataError, TreeKtaError
from .graph import create_replicate_graph
from .report import AGGREGATE_COLUMNS, ExperimentReport
from .state import METRICS, ReplicateOutcome, ReplicateRecord, initial_state

logger = logging.getLogger(__name__)


def _banner(title: str) -> None:
    logger.info("=" * 60)
    logger.info(title)
    logger.info("=" * 60)


def run_replicate(
    config: ExperimentConfig, replicate_index: int, source: Optional[Dataset] = None
) -> ReplicateOutcome:
    """
    Run one replicate through the replicate graph.

    The outcome depends only on (config, replicate_index); scheduling never
    enters the seeds.

    Args:
        config: Experiment configuration
        replicate_index: 0-based replicate number
        source: Preloaded dataset for CSV experiments

    Returns:
        ReplicateOutcome with records and spectrum rows

    Raises:
        TreeKtaError: any failure inside the pipeline
    """
    if config.csv is not None and source is None:
        source = load_source(config)
    graph = create_replicate_graph()
    final = graph.invoke(initial_state(config, replicate_index, source))
    return ReplicateOutcome(
        replicate=replicate_index,
        records=final["records"],
        spectrum_rows=final["spectrum_rows"],
        error=None,
        exit_code=None,
    )


def _run_isolated(
    config: ExperimentConfig, replicate_index: int, source: Optional[Dataset]
) -> ReplicateOutcome:
    """Worker entry point: a failing replicate becomes an outcome, not an exception"""
    try:
        return run_replicate(config, replicate_index, source)
    except TreeKtaError as e:
        return ReplicateOutcome(
            replicate=replicate_index,
            records=[],
            spectrum_rows=[],
            error=f"{type(e).__name__}: {e}",
            exit_code=e.exit_code,
        )


def load_source(config: ExperimentConfig) -> Dataset:
    data = load_csv(config.csv.path, config.csv.csv_schema)
    logger.info(f"Loaded {config.csv.name}: n={data.n}, p={data.p}")
    return data


def aggregate(records: Sequence[ReplicateRecord]) -> ExperimentReport:
    """
    Mean, sample standard deviation (n - 1), min, max and count per
    (model, n_landmarks, metric).

    A metric observed once reports sd 0. Missing alignment summaries are
    left out of their metric's count.

    Raises:
        DataError: no records
    """
    if not records:
        raise DataError("no records to aggregate")

    frame = pd.DataFrame(list(records))
    long = frame.melt(
        id_vars=["model", "n_landmarks"],
        value_vars=list(METRICS),
        var_name="metric",
        value_name="score",
    )
    long["score"] = pd.to_numeric(long["score"], errors="coerce")
    long = long.dropna(subset=["score"])

    grouped = long.groupby(["model", "n_landmarks", "metric"], sort=True)["score"]
    table = grouped.agg(["mean", "std", "min", "max", "count"]).reset_index()
    table = table.rename(columns={"std": "sd"})
    table["sd"] = table["sd"].fillna(0.0)
    # Keep the mean inside [min, max] despite rounding in the sum.
    table["mean"] = np.clip(table["mean"], table["min"], table["max"])
    table["count"] = table["count"].astype(int)

    return ExperimentReport(records=list(records), aggregates=table[AGGREGATE_COLUMNS])


def _executor(config: ExperimentConfig) -> Optional[Executor]:
    if config.workers <= 1:
        return None
    if config.executor == "thread":
        return ThreadPoolExecutor(max_workers=config.workers)
    return ProcessPoolExecutor(max_workers=config.workers)


def _collect(config: ExperimentConfig, source: Optional[Dataset]) -> List[ReplicateOutcome]:
    indices = range(config.replicates)
    pool = _executor(config)
    if pool is None:
        outcomes = []
        for index in indices:
            outcomes.append(_run_isolated(config, index, source))
            _log_outcome(outcomes[-1])
        return outcomes

    with pool:
        futures = {pool.submit(_run_isolated, config, index, source): index for index in indices}
        outcomes = []
        for future in as_completed(futures):
            outcome = future.result()
            _log_outcome(outcome)
            outcomes.append(outcome)
    return sorted(outcomes, key=lambda o: o["replicate"])


def _log_outcome(outcome: ReplicateOutcome) -> None:
    if outcome["error"]:
        logger.error(f"❌ Replicate {outcome['replicate']} failed: {outcome['error']}")
    else:
        logger.debug(f"✅ Replicate {outcome['replicate']} complete")


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """
    Run every replicate and aggregate the results.

    Replicates run sequentially with one worker, otherwise in a thread or
    process pool; results are ordered by replicate index either way. Failed
    replicates are listed in the report and left out of the aggregates.

    Raises:
        TreeKtaError: every replicate failed (carries the first failure's exit code)
    """
    _banner(f"🧪 EXPERIMENT: {config.name} ({config.source_label})")
    logger.info(
        f"Models: {', '.join(config.models)} | replicates: {config.replicates} | "
        f"workers: {config.workers} ({config.executor})"
    )

    source = load_source(config) if config.csv is not None else None
    outcomes = _collect(config, source)

    failed = [o for o in outcomes if o["error"]]
    succeeded = [o for o in outcomes if not o["error"]]
    if not succeeded:
        first = failed[0]
        error = TreeKtaError(f"all {len(failed)} replicates failed; first: {first['error']}")
        error.exit_code = first["exit_code"]
        raise error
    if failed:
        logger.warning(f"⚠️  {len(failed)} of {len(outcomes)} replicates failed; partial results")

    records = [r for o in succeeded for r in o["records"]]
    report = aggregate(records)
    report.spectra = [row for o in succeeded for row in o["spectrum_rows"]]
    report.name = config.name
    report.source = config.source_label
    report.config = config.result_fields()
    report.n_components = config.n_components
    report.failed_replicates = [o["replicate"] for o in failed]

    _banner(f"✅ EXPERIMENT COMPLETE: {len(succeeded)}/{len(outcomes)} replicates")
    for model in config.models:
        try:
            cc = report.metric_mean(model, "test_cc")
            mse = report.metric_mean(model, "test_mse")
        except DataError:
            continue
        logger.info(f"   {model:<11} test cc {cc:.3f} | test MSE {mse:.4g}")
    return report


@dataclass
class SweepResult:
    reports: Dict[str, ExperimentReport]
    table: pd.DataFrame
    association: float


def alignment_performance_association(
    reports: Dict[str, ExperimentReport],
) -> Tuple[float, pd.DataFrame]:
    """
    Spearman rank correlation between mean align_top5 and mean test cc over
    every (scenario, kernel model) pair.

    Returns:
        (correlation, table of the pairs)

    Raises:
        DataError: fewer than 3 pairs
    """
    rows = []
    for label, report in reports.items():
        for model in KERNEL_MODELS:
            try:
                rows.append(
                    {
                        "scenario": label,
                        "model": model,
                        "align_top5": report.metric_mean(model, "align_top5"),
                        "test_cc": report.metric_mean(model, "test_cc"),
                    }
                )
            except DataError:
                continue

    table = pd.DataFrame(rows, columns=["scenario", "model", "align_top5", "test_cc"])
    if len(table) < 3:
        raise DataError(f"association needs at least 3 (scenario, model) pairs, got {len(table)}")
    correlation, _ = spearmanr(table["align_top5"], table["test_cc"])
    return float(correlation), table


def run_sweep(
    config: ExperimentConfig,
    sizes: Tuple[int, ...] = SCENARIO_SIZES,
    widths: Tuple[int, ...] = SCENARIO_WIDTHS,
) -> SweepResult:
    """
    Run the experiment for every simulation scenario of the grid.

    The base config supplies everything except the scenario; each scenario's
    outputs go to a subdirectory of config.output_dir.
    """
    scenarios = scenario_grid(sizes, widths)
    _banner(f"🗺️  SWEEP: {len(scenarios)} scenarios")
    reports: Dict[str, ExperimentReport] = {}
    for spec in scenarios:
        output_dir = str(Path(config.output_dir) / spec.label)
        scenario_config = config.model_copy(
            update={"scenario": spec, "csv": None, "output_dir": output_dir}
        )
        reports[spec.label] = run_experiment(scenario_config)

    association, table = alignment_performance_association(reports)
    logger.info(f"📈 Alignment/performance Spearman correlation: {association:.3f}")
    return SweepResult(reports=reports, table=table, association=association)
