"""
Landmark (prototype) learning

Each sample is represented by its kernel similarity to n_L randomly chosen
training rows. A least-squares model on those features gives the landmark
predictor; the left singular vectors of L give the landmark alignment
spectrum.
"""

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import DataError, DegenerateDesignError
from .alignment import AlignmentSpectrum, alignment_spectrum
from .kernel import CrossKernel, KernelMatrix
from .krr import DEFAULT_RIDGE_GRID, ridge_search
from .linalg import thin_svd

logger = logging.getLogger(__name__)

# Plain normal equations first, then the kernel ridge grid.
LANDMARK_RIDGE_GRID = (0.0,) + DEFAULT_RIDGE_GRID


@dataclass(frozen=True)
class LandmarkDesign:
    """n x n_L similarities of every row to the chosen landmarks"""

    landmark_indices: np.ndarray
    L: np.ndarray

    @property
    def n_landmarks(self) -> int:
        return int(self.landmark_indices.shape[0])


def select_landmarks(n: int, n_landmarks: int, rng: np.random.Generator) -> np.ndarray:
    """n_L distinct row indices drawn uniformly without replacement"""
    if not 1 <= n_landmarks <= n:
        raise DataError(f"cannot select {n_landmarks} landmarks from {n} rows")
    return rng.choice(n, size=n_landmarks, replace=False)


def _values(kernel: Union[KernelMatrix, CrossKernel, np.ndarray]) -> np.ndarray:
    if isinstance(kernel, (KernelMatrix, CrossKernel)):
        return kernel.values
    return np.asarray(kernel, dtype=np.float64)


def landmark_design(K: Union[KernelMatrix, np.ndarray], landmark_indices: np.ndarray) -> LandmarkDesign:
    """Training design L[i, j] = k(X_i, X_landmark_j) taken from the train kernel"""
    landmark_indices = np.asarray(landmark_indices, dtype=np.intp)
    return LandmarkDesign(landmark_indices, _values(K)[:, landmark_indices].copy())


def landmark_cross_design(
    Kx: Union[CrossKernel, np.ndarray], landmark_indices: np.ndarray
) -> np.ndarray:
    """Test rows' similarities to the landmarks"""
    return _values(Kx)[:, np.asarray(landmark_indices, dtype=np.intp)]


def landmark_fit(design: LandmarkDesign, Y: np.ndarray) -> np.ndarray:
    """
    Least-squares coefficients (L^T L)^-1 L^T Y.

    A singular L^T L falls back to the ascending ridge grid used by kernel
    ridge regression.

    Raises:
        DegenerateDesignError: L is all zeros
        DataError: n < n_L or target length mismatch
    """
    L = design.L
    Y = np.asarray(Y, dtype=np.float64)
    n, n_l = L.shape
    if Y.shape != (n,):
        raise DataError(f"dimension mismatch: design {L.shape}, target {Y.shape}")
    if n < n_l:
        raise DataError(f"landmark fit needs n >= n_L, got {n} < {n_l}")
    if not np.any(L):
        raise DegenerateDesignError("degenerate design")

    ridge, coefficients = ridge_search(L.T @ L, L.T @ Y, LANDMARK_RIDGE_GRID)
    if ridge > 0:
        logger.debug(f"landmark normal equations singular; used ridge {ridge:g}")
    return coefficients


def landmark_predict(coefficients: np.ndarray, L_rows: np.ndarray) -> np.ndarray:
    L_rows = np.atleast_2d(np.asarray(L_rows, dtype=np.float64))
    if L_rows.shape[1] != coefficients.shape[0]:
        raise DataError(
            f"dimension mismatch: {L_rows.shape[1]} landmark columns, {coefficients.shape[0]} coefficients"
        )
    return L_rows @ coefficients


def landmark_alignment(design: LandmarkDesign, Y: np.ndarray, n_components: int) -> AlignmentSpectrum:
    """
    Alignment of the left singular vectors of L with Y, ordered by singular value.

    Raises:
        DataError: n_components > n_L
    """
    if n_components > design.n_landmarks:
        raise DataError(
            f"n_components ({n_components}) exceeds the number of landmarks ({design.n_landmarks})"
        )
    svd = thin_svd(design.L)
    return alignment_spectrum(svd.left_vectors, svd.singular_values, Y, n_components)
