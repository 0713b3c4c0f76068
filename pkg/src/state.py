"""
Replicate State Schema

Defines the state carried through the per-replicate LangGraph pipeline and
the flat record types that end up in report.csv and spectra.csv.
"""

from typing import Dict, List, Literal, Optional, Tuple, TypedDict

from .config import ExperimentConfig
from .data.dataset import Dataset
from .ensembles import Ensemble
from .kernels import AlignmentSpectrum, CrossKernel, KernelMatrix

# n_landmarks value used for full-kernel and raw-ensemble rows
FULL_KERNEL = 0

METRICS: Tuple[str, ...] = ("test_cc", "test_mse", "align_first", "align_best", "align_top5")


class PhaseMessage(TypedDict):
    """Progress note emitted by a pipeline node"""

    phase: str
    message: str


class ReplicateRecord(TypedDict):
    """
    Test-set performance and alignment summaries of one model in one replicate.

    Alignment fields are None for raw ensembles, and for landmark spectra
    shorter than ten components.
    """

    replicate: int
    model: str
    n_landmarks: int
    test_cc: float
    test_mse: float
    align_first: Optional[float]
    align_best: Optional[float]
    align_top5: Optional[float]
    best_index: Optional[int]
    ridge: Optional[float]


class SpectrumRow(TypedDict):
    replicate: int
    model: str
    n_landmarks: int
    component: int
    value: float
    alignment: float


class ReplicateState(TypedDict):
    """
    State schema for one replicate

    Passed through every node of the replicate graph; nodes return partial
    updates.
    """

    config: ExperimentConfig
    replicate_index: int
    status: Literal[
        "preparing",
        "fitting",
        "kernel",
        "aligning",
        "landmarks",
        "evaluating",
        "completed",
    ]

    # Preloaded real-life dataset (None for simulation scenarios)
    source: Optional[Dataset]

    # Independent seeds per random stream
    seeds: Dict[str, int]

    train: Optional[Dataset]
    test: Optional[Dataset]

    # Keyed by ensemble kind: "rf" / "gbt"
    ensembles: Dict[str, Ensemble]

    # Keyed by kernel model name: "RF_kernel" / "XGB_kernel"
    kernels: Dict[str, Tuple[KernelMatrix, CrossKernel]]
    spectra: Dict[str, AlignmentSpectrum]

    records: List[ReplicateRecord]
    spectrum_rows: List[SpectrumRow]
    messages: List[PhaseMessage]


class ReplicateOutcome(TypedDict):
    """What a worker hands back to the harness for one replicate"""

    replicate: int
    records: List[ReplicateRecord]
    spectrum_rows: List[SpectrumRow]
    error: Optional[str]
    exit_code: Optional[int]


def initial_state(
    config: ExperimentConfig, replicate_index: int, source: Optional[Dataset] = None
) -> ReplicateState:
    return ReplicateState(
        config=config,
        replicate_index=replicate_index,
        status="preparing",
        source=source,
        seeds={},
        train=None,
        test=None,
        ensembles={},
        kernels={},
        spectra={},
        records=[],
        spectrum_rows=[],
        messages=[],
    )
