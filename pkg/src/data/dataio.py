"""
CSV Ingestion

Loads real-life regression datasets from delimited text files described by a
DatasetSchema, subsamples them, and writes datasets back out.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from ..config import DatasetSchema
from ..errors import ConfigError, DataError
from .dataset import Dataset

logger = logging.getLogger(__name__)

ColumnRef = Union[str, int]


@dataclass(frozen=True)
class KnownDataset:
    """A documented real-life dataset: file name, schema and expected shape"""

    filename: str
    csv_schema: DatasetSchema
    n_rows: int
    n_features: int
    source: str

    def load(self, directory: Union[str, Path]) -> Dataset:
        """
        Read the dataset from directory/filename and check its documented shape.

        Raises:
            DataError: missing file, wrong feature count, or more rows than documented
        """
        data = load_csv(Path(directory) / self.filename, self.csv_schema)
        if data.p != self.n_features:
            raise DataError(
                f"{self.filename}: expected {self.n_features} features, found {data.p}"
            )
        if data.n > self.n_rows:
            raise DataError(f"{self.filename}: expected at most {self.n_rows} rows, found {data.n}")
        return data


BUILTIN_SCHEMAS: Dict[str, KnownDataset] = {
    "california": KnownDataset(
        filename="california.csv",
        csv_schema=DatasetSchema(target_column="median_house_value"),
        n_rows=20640,
        n_features=8,
        source="Pace & Barry (1997) California housing, StatLib numeric version",
    ),
    "boston": KnownDataset(
        filename="boston.csv",
        csv_schema=DatasetSchema(target_column="medv"),
        n_rows=506,
        n_features=13,
        source="Harrison & Rubinfeld (1978) Boston housing, UCI housing.data with header row",
    ),
    "protein": KnownDataset(
        filename="protein.csv",
        csv_schema=DatasetSchema(target_column="RMSD"),
        n_rows=45730,
        n_features=9,
        source="UCI Physicochemical Properties of Protein Tertiary Structure (CASP.csv)",
    ),
    "concrete": KnownDataset(
        filename="concrete.csv",
        csv_schema=DatasetSchema(target_column=-1),
        n_rows=1030,
        n_features=8,
        source="Yeh (1998) UCI Concrete Compressive Strength, exported from Concrete_Data.xls",
    ),
    "csm": KnownDataset(
        filename="csm.csv",
        csv_schema=DatasetSchema(
            target_column="Ratings",
            feature_columns=[
                "Year",
                "Genre",
                "Gross",
                "Budget",
                "Screens",
                "Sequel",
                "Sentiment",
                "Views",
                "Likes",
                "Dislikes",
                "Comments",
                "Aggregate Followers",
            ],
            na_policy="drop_row",
        ),
        n_rows=187,
        n_features=12,
        source="Ahmed et al. (2015) UCI CSM (conventional and social media movies) 2014/2015",
    ),
}


def load_schema(path: Union[str, Path]) -> DatasetSchema:
    """Read a DatasetSchema from its JSON sidecar file"""
    path = Path(path)
    try:
        return DatasetSchema.model_validate_json(path.read_text())
    except FileNotFoundError as e:
        raise ConfigError(f"schema file not found: {path}") from e
    except ValidationError as e:
        raise ConfigError(f"invalid schema in {path}:\n{e}") from e


def _resolve_column(frame: pd.DataFrame, ref: ColumnRef, path: Path) -> object:
    columns = list(frame.columns)
    if isinstance(ref, int):
        if not -len(columns) <= ref < len(columns):
            raise DataError(f"{path}: column index {ref} out of range ({len(columns)} columns)")
        return columns[ref]
    if ref not in columns:
        raise DataError(f"{path}: column {ref!r} not found; available: {columns}")
    return ref


def _column_label(column: object) -> str:
    return column if isinstance(column, str) else f"x{int(column) + 1}"


def _parse_number(text: str) -> float:
    # Correctly rounded, so values written with 17 significant digits reload exactly.
    try:
        return float(text)
    except ValueError:
        return np.nan


def load_csv(path: Union[str, Path], schema: DatasetSchema) -> Dataset:
    """
    Load a numeric regression dataset from a delimited file.

    Args:
        path: CSV file
        schema: Column layout and missing-value policy

    Returns:
        Dataset with the schema's feature columns and target

    Raises:
        DataError: unreadable file, unknown column, non-numeric column,
            unparseable cell (reported with file line and column) or a missing
            value under the 'error' policy
    """
    path = Path(path)
    header = 0 if schema.has_header else None
    try:
        frame = pd.read_csv(
            path,
            sep=schema.delimiter,
            header=header,
            dtype=str,
            skipinitialspace=True,
        )
    except FileNotFoundError as e:
        raise DataError(f"data file not found: {path}") from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError, OSError) as e:
        raise DataError(f"cannot parse {path}: {e}") from e

    target = _resolve_column(frame, schema.target_column, path)
    if schema.feature_columns is None:
        features = [c for c in frame.columns if c != target]
    else:
        features = [_resolve_column(frame, ref, path) for ref in schema.feature_columns]
        if target in features:
            raise DataError(f"{path}: target column {target!r} is listed among features")
    if not features:
        raise DataError(f"{path}: no features")

    # First data row sits on file line 2 with a header, line 1 without.
    first_line = 2 if schema.has_header else 1
    columns = features + [target]
    raw = frame[columns]
    missing = raw.isna()
    numeric = raw.apply(lambda col: col.map(_parse_number, na_action="ignore")).astype(np.float64)
    unparseable = numeric.isna() & ~missing

    for column in columns:
        bad = unparseable[column].to_numpy()
        if not bad.any():
            continue
        present = int((~missing[column]).sum())
        if bad.sum() == present:
            raise DataError(
                f"{path}: column {_column_label(column)!r} is non-numeric; "
                f"categorical columns are not supported"
            )
        row = int(np.flatnonzero(bad)[0])
        raise DataError(
            f"{path}: line {row + first_line}, column {_column_label(column)!r}: "
            f"cannot parse {raw[column].iloc[row]!r} as a number"
        )

    na_rows = missing.any(axis=1).to_numpy()
    if na_rows.any():
        if schema.na_policy == "error":
            row = int(np.flatnonzero(na_rows)[0])
            column = next(c for c in columns if missing[c].iloc[row])
            raise DataError(
                f"{path}: line {row + first_line}, column {_column_label(column)!r}: missing value"
            )
        logger.warning(f"⚠️  {path.name}: dropped {int(na_rows.sum())} rows with missing values")
        numeric = numeric.loc[~na_rows]

    if numeric.shape[0] == 0:
        raise DataError(f"{path}: no rows left after reading")

    return Dataset(
        X=numeric[features].to_numpy(dtype=np.float64),
        y=numeric[target].to_numpy(dtype=np.float64),
        feature_names=[_column_label(c) for c in features],
    )


def subsample(data: Dataset, n_sub: int, rng: np.random.Generator) -> Dataset:
    """
    Uniform subsample of n_sub rows without replacement.

    Raises:
        DataError: n_sub outside [1, n]
    """
    if not 1 <= n_sub <= data.n:
        raise DataError(f"cannot subsample {n_sub} rows from {data.n}")
    return data.subset(rng.choice(data.n, size=n_sub, replace=False))


def export_csv(data: Dataset, path: Union[str, Path], target_name: str = "y") -> Path:
    """Write features then target with a header row, 17 significant digits"""
    path = Path(path)
    if target_name in data.feature_names:
        raise DataError(f"target name {target_name!r} collides with a feature name")
    frame = pd.DataFrame(data.X, columns=list(data.feature_names))
    frame[target_name] = data.y
    try:
        frame.to_csv(path, index=False, float_format="%.17g")
    except OSError as e:
        raise DataError(f"cannot write dataset to {path}: {e}") from e
    return path

