"""
Configuration models for treekta

Pydantic models for every user-facing setting plus environment defaults.
"""

import json
import math
import os
from enum import Enum
from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError

ModelName = Literal["RF_kernel", "XGB_kernel", "RF", "XGB"]

KERNEL_MODELS: Dict[str, str] = {"RF_kernel": "rf", "XGB_kernel": "gbt"}
ENSEMBLE_MODELS: Dict[str, str] = {"RF": "rf", "XGB": "gbt"}

# Fields that only control scheduling or file placement; they never change results.
RUNTIME_FIELDS = {"output_dir", "workers", "executor", "tree_workers"}


def load_environment() -> None:
    """Load .env into the process environment (existing variables win)"""
    load_dotenv()


def env_workers() -> int:
    return max(1, int(os.getenv("TREEKTA_WORKERS", "1")))


def env_log_level() -> str:
    return os.getenv("TREEKTA_LOG_LEVEL", "INFO").upper()


class TreeConfig(BaseModel):
    """Growth controls for a single regression tree"""

    max_depth: Optional[int] = Field(default=None, ge=0)
    min_node_size: int = Field(default=5, ge=1)
    mtry: Optional[int] = Field(default=None, ge=1)
    min_split_gain: float = Field(default=0.0, ge=0.0)

    def resolved_mtry(self, p: int) -> int:
        """Features drawn per split; defaults to floor(sqrt(p))"""
        mtry = self.mtry if self.mtry is not None else max(1, math.isqrt(p))
        if not 1 <= mtry <= p:
            raise ConfigError(f"mtry must lie in [1, {p}], got {mtry}")
        return mtry


class RfParams(BaseModel):
    m_trees: int = Field(default=500, ge=1)
    tree: TreeConfig = Field(default_factory=TreeConfig)


class GbtParams(BaseModel):
    """Boosting controls; defaults follow the usual xgboost regression defaults"""

    m_rounds: int = Field(default=100, ge=1)
    learning_rate: float = Field(default=0.3, gt=0.0, le=1.0)
    max_depth: Optional[int] = Field(default=6, ge=0)
    reg_lambda: float = Field(default=1.0, ge=0.0)
    reg_gamma: float = Field(default=0.0, ge=0.0)
    min_child_weight: float = Field(default=1.0, ge=0.0)
    subsample: float = Field(default=1.0, gt=0.0, le=1.0)
    colsample_bynode: float = Field(default=1.0, gt=0.0, le=1.0)


class Family(str, Enum):
    FRIEDMAN = "friedman"
    CHECKERBOARD = "checkerboard"
    VAN_DER_LAAN = "van_der_laan"
    MEIER1 = "meier1"
    MEIER2 = "meier2"


class ScenarioSpec(BaseModel):
    """
    One simulation scenario.

    ``noise_sd`` of None selects the family default. ``seed`` is used by the
    ``simulate`` command; experiments derive per-replicate seeds instead.
    """

    family: Family
    n: int = Field(ge=2)
    p: int = Field(ge=1)
    noise_sd: Optional[float] = Field(default=None, ge=0.0)
    seed: int = 0

    @property
    def label(self) -> str:
        return f"{self.family.value}_n{self.n}_p{self.p}"


class DatasetSchema(BaseModel):
    """Column layout of a real-life CSV dataset"""

    target_column: Union[str, int]
    feature_columns: Optional[List[Union[str, int]]] = None
    delimiter: str = ","
    has_header: bool = True
    na_policy: Literal["drop_row", "error"] = "drop_row"

    @model_validator(mode="after")
    def _target_not_feature(self) -> "DatasetSchema":
        if self.feature_columns is not None and self.target_column in self.feature_columns:
            raise ValueError(f"target column {self.target_column!r} is listed among features")
        return self


class CsvSource(BaseModel):
    """Real-life dataset used in place of a simulation scenario"""

    name: str
    path: str
    csv_schema: DatasetSchema
    # Larger datasets are subsampled to this many rows before the split.
    subsample_threshold: int = Field(default=2000, ge=2)


class ExperimentConfig(BaseModel):
    """Full description of a replicated experiment"""

    name: str = "experiment"
    scenario: Optional[ScenarioSpec] = None
    csv: Optional[CsvSource] = None
    models: List[ModelName] = Field(default_factory=lambda: ["RF_kernel", "XGB_kernel", "RF", "XGB"])
    replicates: int = Field(default=200, ge=1)
    landmark_counts: List[int] = Field(default_factory=lambda: [100, 200, 300])
    n_components: int = Field(default=30, ge=1)
    master_seed: int = 0
    train_fraction: float = Field(default=0.75, gt=0.0, lt=1.0)
    center_targets: bool = False
    rf: RfParams = Field(default_factory=RfParams)
    gbt: GbtParams = Field(default_factory=GbtParams)
    output_dir: str = "results"
    workers: int = Field(default_factory=env_workers, ge=1)
    executor: Literal["thread", "process"] = "process"
    tree_workers: int = Field(default=1, ge=1)

    @field_validator("models")
    @classmethod
    def _models_non_empty(cls, value: List[str]) -> List[str]:
        if not value:
            raise ValueError("at least one model is required")
        return list(dict.fromkeys(value))

    @field_validator("landmark_counts")
    @classmethod
    def _positive_counts(cls, value: List[int]) -> List[int]:
        if any(count < 1 for count in value):
            raise ValueError("landmark counts must be positive")
        return sorted(set(value))

    @model_validator(mode="after")
    def _one_source(self) -> "ExperimentConfig":
        if (self.scenario is None) == (self.csv is None):
            raise ValueError("exactly one of 'scenario' or 'csv' must be given")
        return self

    @property
    def source_label(self) -> str:
        return self.scenario.label if self.scenario is not None else self.csv.name

    def kernel_models(self) -> List[str]:
        return [m for m in self.models if m in KERNEL_MODELS]

    def needs_ensemble(self, kind: str) -> bool:
        """Whether any requested model requires the 'rf' or 'gbt' ensemble"""
        return any({**KERNEL_MODELS, **ENSEMBLE_MODELS}[m] == kind for m in self.models)

    def result_fields(self) -> dict:
        """Configuration as recorded in summary.json"""
        return self.model_dump(mode="json", exclude=RUNTIME_FIELDS)


PRESETS: Dict[str, dict] = {
    "full": {"replicates": 200, "rf": {"m_trees": 500}, "gbt": {"m_rounds": 100}},
    "desk": {"replicates": 20, "rf": {"m_trees": 200}},
}


def apply_preset(config: ExperimentConfig, preset: str) -> ExperimentConfig:
    """
    Override the fields named by a preset, keeping everything else.

    Args:
        config: Base configuration
        preset: Preset name ('full' or 'desk')

    Returns:
        New validated ExperimentConfig
    """
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")

    data = config.model_dump()
    for key, value in PRESETS[preset].items():
        if isinstance(value, dict):
            data[key] = {**data[key], **value}
        else:
            data[key] = value
    return validate_experiment_config(data)


def validate_experiment_config(data: dict) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid experiment configuration:\n{e}") from e


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read an ExperimentConfig from a JSON file"""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    return validate_experiment_config(data)
