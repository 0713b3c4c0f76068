"""
Kernel-Target Alignment

Per-component alignment |corr(u_i, Y)| over eigenvectors (or left singular
vectors) ordered by descending eigen/singular value, and the three scalar
summaries: first component, best component, mean of the best 5 among the
leading 10.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..errors import DataError

DEFAULT_COMPONENTS = 30
_ZERO_VARIANCE_RTOL = 1e-12


@dataclass(frozen=True)
class AlignmentSpectrum:
    component_index: np.ndarray
    values: np.ndarray
    alignment: np.ndarray

    def __len__(self) -> int:
        return int(self.alignment.shape[0])


@dataclass(frozen=True)
class AlignmentSummary:
    first: float
    best: float
    top5_of_10: float
    best_index: int


def _centered_norms(M: np.ndarray) -> tuple:
    centered = M - M.mean(axis=0)
    raw = np.linalg.norm(M, axis=0)
    norms = np.linalg.norm(centered, axis=0)
    degenerate = norms <= _ZERO_VARIANCE_RTOL * np.maximum(raw, np.finfo(float).tiny)
    return centered, norms, degenerate


def alignment_spectrum(
    U: np.ndarray,
    values: np.ndarray,
    Y: np.ndarray,
    n_components: int = DEFAULT_COMPONENTS,
) -> AlignmentSpectrum:
    """
    Absolute Pearson correlation of each leading column of U with Y.

    Args:
        U: n x r matrix with orthonormal columns, ordered by descending value
        values: Matching eigen/singular values
        Y: Length-n target
        n_components: Leading components to score

    Returns:
        AlignmentSpectrum; a component (or target) with zero variance scores 0

    Raises:
        DataError: n < 2, shape mismatch or n_components above the column count
    """
    U = np.asarray(U, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if U.ndim != 2 or Y.shape != (U.shape[0],):
        raise DataError(f"dimension mismatch: vectors {U.shape}, target {Y.shape}")
    if U.shape[0] < 2:
        raise DataError("alignment needs at least 2 samples")
    if not 1 <= n_components <= U.shape[1]:
        raise DataError(f"n_components must lie in [1, {U.shape[1]}], got {n_components}")

    leading = U[:, :n_components]
    centered, norms, degenerate = _centered_norms(leading)
    y_centered, y_norm, y_degenerate = _centered_norms(Y[:, None])

    alignment = np.zeros(n_components)
    if not y_degenerate[0]:
        usable = ~degenerate
        scores = np.abs(centered[:, usable].T @ y_centered[:, 0]) / (norms[usable] * y_norm[0])
        alignment[usable] = np.clip(scores, 0.0, 1.0)

    return AlignmentSpectrum(
        component_index=np.arange(1, n_components + 1),
        values=values[:n_components].copy(),
        alignment=alignment,
    )


def scalar_alignment(U: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Unnormalized |u_i^T Y| for every column of U"""
    return np.abs(np.asarray(U, dtype=np.float64).T @ np.asarray(Y, dtype=np.float64))


def summarize_alignment(spectrum: AlignmentSpectrum) -> AlignmentSummary:
    """
    First, best and top-5-of-10 alignment.

    Raises:
        DataError: fewer than 10 components
    """
    if len(spectrum) < 10:
        raise DataError(f"alignment summary needs at least 10 components, got {len(spectrum)}")
    a = spectrum.alignment
    best = int(np.argmax(a))
    return AlignmentSummary(
        first=float(a[0]),
        best=float(a[best]),
        top5_of_10=float(np.mean(np.sort(a[:10])[-5:])),
        best_index=best + 1,
    )


def mean_spectrum(spectra: Sequence[AlignmentSpectrum]) -> AlignmentSpectrum:
    """Component-wise mean over replicates (truncated to the shortest spectrum)"""
    if not spectra:
        raise DataError("no spectra to average")
    length = min(len(s) for s in spectra)
    return AlignmentSpectrum(
        component_index=np.arange(1, length + 1),
        values=np.mean([s.values[:length] for s in spectra], axis=0),
        alignment=np.mean([s.alignment[:length] for s in spectra], axis=0),
    )


def spectrum_frame(spectrum: AlignmentSpectrum, n_landmarks: Optional[int] = None) -> pd.DataFrame:
    frame = pd.DataFrame(
        {
            "component": spectrum.component_index,
            "value": spectrum.values,
            "alignment": spectrum.alignment,
        }
    )
    if n_landmarks is not None:
        frame.insert(0, "n_landmarks", n_landmarks)
    return frame


def export_spectrum_csv(
    spectrum: Union[AlignmentSpectrum, pd.DataFrame], path: Union[str, Path]
) -> Path:
    """CSV with columns (component, value, alignment), plus n_landmarks for landmark spectra"""
    path = Path(path)
    frame = spectrum if isinstance(spectrum, pd.DataFrame) else spectrum_frame(spectrum)
    try:
        frame.to_csv(path, index=False, float_format="%.17g")
    except OSError as e:
        raise DataError(f"cannot write spectrum to {path}: {e}") from e
    return path
