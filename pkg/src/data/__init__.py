"""Data package: simulation generators and CSV ingestion"""

from .dataio import BUILTIN_SCHEMAS, KnownDataset, export_csv, load_csv, load_schema, subsample
from .dataset import Dataset
from .simgen import evaluate_signal, generate, scenario_grid, split_train_test

__all__ = [
    "BUILTIN_SCHEMAS",
    "Dataset",
    "KnownDataset",
    "evaluate_signal",
    "export_csv",
    "generate",
    "load_csv",
    "load_schema",
    "scenario_grid",
    "split_train_test",
    "subsample",
]
