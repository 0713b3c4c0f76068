"""
treekta command line

Subcommands: simulate, kernel, align, landmark, experiment, sweep, plot.
Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from .config import (
    PRESETS,
    DatasetSchema,
    Family,
    GbtParams,
    ScenarioSpec,
    TreeConfig,
    apply_preset,
    env_log_level,
    load_environment,
    load_experiment_config,
    validate_experiment_config,
)
from .data.dataio import export_csv, load_csv, load_schema
from .data.simgen import generate, scenario_grid
from .ensembles import fit_gbt, fit_rf
from .errors import ConfigError, DataError, TreeKtaError, UsageError
from .harness import run_experiment, run_sweep
from .kernels import (
    alignment_spectrum,
    kernel_matrix,
    landmark_alignment,
    landmark_design,
    select_landmarks,
    summarize_alignment,
    sym_eig,
)
from .kernels.alignment import export_spectrum_csv, spectrum_frame
from .kernels.kernel import export_kernel_csv, load_kernel_csv
from .report import emit_outputs, load_report, publish_outputs, write_charts
from .utils import derive_seed, make_rng

logger = logging.getLogger(__name__)


class _ArgumentParser(argparse.ArgumentParser):
    """argparse reports usage problems with exit code 1"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(UsageError.exit_code, f"{self.prog}: error: {message}\n")


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        datefmt="%H:%M:%S",
        force=True,
    )


def _int_list(value: str) -> List[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}") from e


def _read_vector(path: str) -> np.ndarray:
    try:
        frame = pd.read_csv(path, header=None)
    except FileNotFoundError as e:
        raise DataError(f"target file not found: {path}") from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataError(f"cannot parse target file {path}: {e}") from e
    values = pd.to_numeric(frame.iloc[:, 0], errors="coerce").to_numpy(dtype=np.float64)
    if frame.shape[1] != 1 or np.isnan(values).any():
        raise DataError(f"target file {path} must hold one numeric value per line")
    return values


def _schema_from_args(args: argparse.Namespace) -> DatasetSchema:
    if args.schema:
        return load_schema(args.schema)
    if args.target is None:
        raise UsageError("either --schema or --target is required")
    target = int(args.target) if args.target.lstrip("-").isdigit() else args.target
    return DatasetSchema(target_column=target, delimiter=args.delimiter)


def cmd_simulate(args: argparse.Namespace) -> int:
    spec = ScenarioSpec(
        family=args.family, n=args.n, p=args.p, noise_sd=args.noise_sd, seed=args.seed
    )
    data = generate(spec)
    export_csv(data, args.out)
    logger.info(f"✅ Wrote {spec.label} (seed {spec.seed}) to {args.out}")
    return 0


def cmd_kernel(args: argparse.Namespace) -> int:
    data = load_csv(args.data, _schema_from_args(args))
    if args.model == "rf":
        ensemble = fit_rf(
            data,
            m_trees=args.trees,
            config=TreeConfig(min_node_size=args.min_node_size),
            master_seed=args.seed,
            workers=args.workers,
        )
    else:
        ensemble = fit_gbt(data, params=GbtParams(m_rounds=args.trees), master_seed=args.seed)

    K = kernel_matrix(ensemble, data, workers=args.workers)
    export_kernel_csv(K.values, args.out)
    if args.target_out:
        pd.Series(data.y).to_csv(args.target_out, index=False, header=False, float_format="%.17g")
    logger.info(f"✅ Wrote {K.n}x{K.n} {args.model} kernel (M={K.m_trees}) to {args.out}")
    return 0


def cmd_align(args: argparse.Namespace) -> int:
    K = load_kernel_csv(args.kernel)
    y = _read_vector(args.target)
    eig = sym_eig(K, method=args.method)
    spectrum = alignment_spectrum(eig.eigenvectors, eig.eigenvalues, y, args.components)

    if args.out:
        export_spectrum_csv(spectrum, args.out)
    if len(spectrum) >= 10:
        summary = summarize_alignment(spectrum)
        print(
            f"first {summary.first:.4f}  best {summary.best:.4f} "
            f"(component {summary.best_index})  top5of10 {summary.top5_of_10:.4f}"
        )
    else:
        print(spectrum_frame(spectrum).to_string(index=False))
    return 0


def cmd_landmark(args: argparse.Namespace) -> int:
    K = load_kernel_csv(args.kernel)
    y = _read_vector(args.target)

    frames = []
    for n_landmarks in args.nproto:
        rng = make_rng(derive_seed(args.seed, n_landmarks))
        indices = select_landmarks(K.shape[0], n_landmarks, rng)
        design = landmark_design(K, indices)
        spectrum = landmark_alignment(design, y, min(args.components, n_landmarks))
        frames.append(spectrum_frame(spectrum, n_landmarks=n_landmarks))
        if len(spectrum) >= 10:
            summary = summarize_alignment(spectrum)
            print(
                f"n_L={n_landmarks:<5} first {summary.first:.4f}  best {summary.best:.4f} "
                f"(component {summary.best_index})  top5of10 {summary.top5_of_10:.4f}"
            )

    if args.out and frames:
        export_spectrum_csv(pd.concat(frames, ignore_index=True), args.out)
    return 0


def _experiment_config(args: argparse.Namespace, data: Optional[dict] = None):
    config = load_experiment_config(args.config) if data is None else validate_experiment_config(data)
    if args.preset:
        config = apply_preset(config, args.preset)

    overrides = {}
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.output_dir is not None:
        overrides["output_dir"] = args.output_dir
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if overrides:
        config = validate_experiment_config({**config.model_dump(), **overrides})
    return config


def cmd_experiment(args: argparse.Namespace) -> int:
    config = _experiment_config(args)
    report = run_experiment(config)
    paths = emit_outputs(report, config.output_dir)
    if args.publish:
        publish_outputs(paths, run_id=config.name)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except FileNotFoundError as e:
            raise ConfigError(f"config file not found: {args.config}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file {args.config} is not valid JSON: {e}") from e
    # The grid supplies the scenarios; any placeholder scenario is replaced.
    data.pop("csv", None)
    data["scenario"] = scenario_grid()[0].model_dump(mode="json")
    config = _experiment_config(args, data)

    result = run_sweep(config)
    root = Path(config.output_dir)
    for label, report in result.reports.items():
        emit_outputs(report, root / label)
    result.table.to_csv(root / "sweep.csv", index=False, float_format="%.17g")
    (root / "sweep.json").write_text(
        json.dumps({"spearman": result.association, "pairs": len(result.table)}, indent=2, sort_keys=True)
        + "\n"
    )
    print(f"alignment/performance Spearman correlation: {result.association:.4f}")
    return 0


def cmd_plot(args: argparse.Namespace) -> int:
    report = load_report(args.report)
    paths = write_charts(report, args.out or args.report)
    logger.info(f"✅ Wrote {len(paths)} charts")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="treekta",
        description="Tree-ensemble kernels, alignment spectra and landmark learning",
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING (env TREEKTA_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("simulate", help="Draw a simulated dataset and write it as CSV")
    p.add_argument("--family", required=True, choices=[f.value for f in Family])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-sd", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("kernel", help="Fit an ensemble on a CSV dataset and export its kernel")
    p.add_argument("--data", required=True)
    p.add_argument("--schema", help="JSON schema sidecar")
    p.add_argument("--target", help="Target column name or index (without --schema)")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--model", choices=["rf", "gbt"], default="rf")
    p.add_argument("--trees", type=int, default=500, help="Trees (rf) or boosting rounds (gbt)")
    p.add_argument("--min-node-size", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--target-out", help="Also write the target vector here")
    p.set_defaults(handler=cmd_kernel)

    p = sub.add_parser("align", help="Alignment spectrum of a precomputed kernel")
    p.add_argument("--kernel", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--components", type=int, default=30)
    p.add_argument("--method", choices=["lapack", "jacobi"], default="lapack")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_align)

    p = sub.add_parser("landmark", help="Landmark alignment spectra of a precomputed kernel")
    p.add_argument("--kernel", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--nproto", type=_int_list, default=[100, 200, 300])
    p.add_argument("--components", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_landmark)

    for name, handler, help_text in (
        ("experiment", cmd_experiment, "Run a replicated experiment from a JSON config"),
        ("sweep", cmd_sweep, "Run every simulation scenario and the association check"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=name == "experiment")
        p.add_argument("--preset", choices=sorted(PRESETS))
        p.add_argument("--workers", type=int)
        p.add_argument("--output-dir")
        p.add_argument("--seed", type=int)
        if name == "experiment":
            p.add_argument("--publish", action="store_true", help="Upload outputs to REPORTS_BUCKET")
        p.set_defaults(handler=handler)

    p = sub.add_parser("plot", help="Re-draw the SVG charts of an emitted report")
    p.add_argument("--report", required=True)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_plot)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_environment()
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level or env_log_level())

    try:
        return args.handler(args)
    except ValidationError as e:
        logger.error(f"❌ invalid arguments:\n{e}")
        return ConfigError.exit_code
    except TreeKtaError as e:
        logger.error(f"❌ {e}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
