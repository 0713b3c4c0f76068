"""
Experiment Reports

Holds the per-replicate records, spectra and aggregates of an experiment and
writes them as report.csv, spectra.csv, summary.json and SVG charts.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd

from .config import KERNEL_MODELS
from .errors import DataError
from .kernels.alignment import AlignmentSpectrum, mean_spectrum, spectrum_frame
from .plotting import LineChart, ScatterChart
from .state import FULL_KERNEL, ReplicateRecord, SpectrumRow
from .utils import upload_outputs_to_s3

logger = logging.getLogger(__name__)

RECORD_COLUMNS = [
    "replicate",
    "model",
    "n_landmarks",
    "test_cc",
    "test_mse",
    "align_first",
    "align_best",
    "align_top5",
    "best_index",
    "ridge",
]
SPECTRUM_COLUMNS = ["replicate", "model", "n_landmarks", "component", "value", "alignment"]
AGGREGATE_COLUMNS = ["model", "n_landmarks", "metric", "mean", "sd", "min", "max", "count"]

ALIGNMENT_SUMMARIES = ("align_first", "align_best", "align_top5")


@dataclass
class ExperimentReport:
    """
    Everything an experiment produced.

    ``aggregates`` is a long table with one row per (model, n_landmarks,
    metric); n_landmarks 0 stands for the full kernel or the raw ensemble.
    """

    records: List[ReplicateRecord]
    aggregates: pd.DataFrame
    spectra: List[SpectrumRow] = field(default_factory=list)
    name: str = "experiment"
    source: str = ""
    config: Dict = field(default_factory=dict)
    n_components: Optional[int] = None
    failed_replicates: List[int] = field(default_factory=list)

    @property
    def partial_results(self) -> bool:
        return len(self.failed_replicates) > 0

    def records_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.records, columns=RECORD_COLUMNS)

    def spectra_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.spectra, columns=SPECTRUM_COLUMNS)

    def mean_spectra(self) -> pd.DataFrame:
        """Per-component mean eigen/singular value and alignment over replicates"""
        frame = self.spectra_frame()
        if frame.empty:
            return pd.DataFrame(columns=["model", "n_landmarks", "component", "value", "alignment"])
        means = []
        for (model, n_landmarks), group in frame.groupby(["model", "n_landmarks"], sort=True):
            per_replicate = [
                AlignmentSpectrum(
                    component_index=rows["component"].to_numpy(),
                    values=rows["value"].to_numpy(dtype=np.float64),
                    alignment=rows["alignment"].to_numpy(dtype=np.float64),
                )
                for _, rows in group.sort_values("component").groupby("replicate", sort=True)
            ]
            mean = spectrum_frame(mean_spectrum(per_replicate), n_landmarks=int(n_landmarks))
            mean.insert(0, "model", model)
            means.append(mean)
        return pd.concat(means, ignore_index=True)

    def metric_mean(self, model: str, metric: str, n_landmarks: int = FULL_KERNEL) -> float:
        rows = self.aggregates[
            (self.aggregates["model"] == model)
            & (self.aggregates["n_landmarks"] == n_landmarks)
            & (self.aggregates["metric"] == metric)
        ]
        if rows.empty:
            raise DataError(f"no aggregate for {model} / n_L={n_landmarks} / {metric}")
        return float(rows["mean"].iloc[0])

    def summary(self) -> Dict:
        """JSON-ready summary; contains no timestamps or runtime settings"""
        mean_spectra: Dict[str, Dict[str, List[float]]] = {}
        for (model, n_landmarks), group in self.mean_spectra().groupby(["model", "n_landmarks"]):
            key = "full" if n_landmarks == FULL_KERNEL else f"n_L={n_landmarks}"
            mean_spectra.setdefault(model, {})[key] = [float(a) for a in group["alignment"]]

        return {
            "name": self.name,
            "source": self.source,
            "config": self.config,
            "n_components": self.n_components,
            "replicates_completed": len({r["replicate"] for r in self.records}),
            "failed_replicates": list(self.failed_replicates),
            "partial_results": self.partial_results,
            "aggregates": _plain_rows(self.aggregates),
            "mean_spectra": mean_spectra,
        }


def _plain_rows(frame: pd.DataFrame) -> List[Dict]:
    """DataFrame rows as dicts of builtin Python scalars"""
    rows = []
    for row in frame.to_dict(orient="records"):
        rows.append({k: v.item() if isinstance(v, np.generic) else v for k, v in row.items()})
    return rows


def _mkdir(output_dir: Path) -> Path:
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise DataError(f"cannot create output directory {output_dir}: {e}") from e
    return output_dir


def spectrum_chart(report: ExperimentReport, model: str) -> LineChart:
    """Mean alignment spectrum of one kernel model: full kernel plus one line per n_L"""
    means = report.mean_spectra()
    means = means[means["model"] == model]
    n_components = report.n_components or int(means["component"].max())
    chart = LineChart(
        title=f"{report.source} - {model} alignment spectrum",
        x_label="component",
        y_label="mean alignment",
        x_ticks=list(range(1, n_components + 1)),
    )
    for n_landmarks, group in means.groupby("n_landmarks", sort=True):
        label = "full kernel" if n_landmarks == FULL_KERNEL else f"n_L={n_landmarks}"
        chart.add_series(label, group["component"].to_numpy(), group["alignment"].to_numpy())
    return chart


def alignment_scatter(report: ExperimentReport, summary_metric: str) -> ScatterChart:
    """Per-replicate alignment summary against test correlation, one series per kernel model"""
    frame = report.records_frame()
    frame = frame[(frame["n_landmarks"] == FULL_KERNEL) & frame["model"].isin(KERNEL_MODELS)]
    chart = ScatterChart(
        title=f"{report.source} - {summary_metric} vs test cc",
        x_label=summary_metric,
        y_label="test cc",
    )
    for model, group in frame.groupby("model", sort=True):
        chart.add_series(
            model,
            group[summary_metric].astype(float).to_numpy(),
            group["test_cc"].astype(float).to_numpy(),
        )
    return chart


def write_charts(report: ExperimentReport, output_dir: Union[str, Path]) -> List[Path]:
    output_dir = _mkdir(Path(output_dir))
    paths = []
    spectrum_models = sorted({row["model"] for row in report.spectra})
    for model in spectrum_models:
        paths.append(spectrum_chart(report, model).save(output_dir / f"spectrum_{model}.svg"))
    if spectrum_models:
        for metric in ALIGNMENT_SUMMARIES:
            chart = alignment_scatter(report, metric)
            paths.append(chart.save(output_dir / f"{metric}_vs_cc.svg"))
    return paths


def emit_outputs(report: ExperimentReport, output_dir: Union[str, Path]) -> List[Path]:
    """
    Write report.csv, spectra.csv, summary.json and the SVG charts.

    Args:
        report: Finished experiment report
        output_dir: Created if missing

    Returns:
        Paths of every written file

    Raises:
        DataError: the directory or a file cannot be written
    """
    output_dir = _mkdir(Path(output_dir))
    report_csv = output_dir / "report.csv"
    spectra_csv = output_dir / "spectra.csv"
    summary_json = output_dir / "summary.json"

    try:
        report.records_frame().to_csv(report_csv, index=False, float_format="%.17g")
        report.spectra_frame().to_csv(spectra_csv, index=False, float_format="%.17g")
        summary_json.write_text(json.dumps(report.summary(), indent=2, sort_keys=True) + "\n")
    except OSError as e:
        raise DataError(f"cannot write outputs to {output_dir}: {e}") from e

    paths = [report_csv, spectra_csv, summary_json] + write_charts(report, output_dir)
    logger.info(f"✅ Wrote {len(paths)} files to {output_dir}")
    return paths


def _none_if_nan(value):
    if isinstance(value, float) and np.isnan(value):
        return None
    return value.item() if isinstance(value, np.generic) else value


def load_report(output_dir: Union[str, Path]) -> ExperimentReport:
    """
    Rebuild an ExperimentReport from the files written by emit_outputs.

    Raises:
        DataError: a required file is missing or malformed
    """
    output_dir = Path(output_dir)
    try:
        summary = json.loads((output_dir / "summary.json").read_text())
        records = pd.read_csv(output_dir / "report.csv")
        spectra = pd.read_csv(output_dir / "spectra.csv")
    except FileNotFoundError as e:
        raise DataError(f"incomplete report in {output_dir}: {e}") from e
    except (json.JSONDecodeError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataError(f"malformed report in {output_dir}: {e}") from e

    record_rows = [
        {k: _none_if_nan(v) for k, v in row.items()}
        for row in records.to_dict(orient="records")
    ]
    for row in record_rows:
        if row["best_index"] is not None:
            row["best_index"] = int(row["best_index"])
    spectrum_rows = [
        {k: _none_if_nan(v) for k, v in row.items()} for row in spectra.to_dict(orient="records")
    ]

    return ExperimentReport(
        records=record_rows,
        aggregates=pd.DataFrame(summary["aggregates"], columns=AGGREGATE_COLUMNS),
        spectra=spectrum_rows,
        name=summary.get("name", "experiment"),
        source=summary.get("source", ""),
        config=summary.get("config", {}),
        n_components=summary.get("n_components"),
        failed_replicates=summary.get("failed_replicates", []),
    )


def publish_outputs(paths: List[Path], run_id: str) -> Dict[str, object]:
    """
    Upload emitted files to the REPORTS_BUCKET S3 bucket.

    Returns:
        's3_uris' and a presigned 'presigned_url' for summary.json, or an empty
        dict when no bucket is configured
    """
    result = upload_outputs_to_s3(paths, run_id)
    if result:
        logger.info(f"✅ Published {len(result.get('s3_uris', []))} files")
        if result.get("presigned_url"):
            logger.info(f"🔗 Summary link (1 hour): {result['presigned_url']}")
    return result
