"""
Kernel Ridge Regression on precomputed kernels

alpha = (K + lambda I)^-1 Y with lambda the smallest grid value for which the
shifted system factorizes and solves accurately; predictions are Kx alpha.
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from ..errors import DataError, KernelUnusableError, NotPositiveDefiniteError, NumericalError
from .kernel import CrossKernel, KernelMatrix
from .linalg import solve_spd

logger = logging.getLogger(__name__)

DEFAULT_RIDGE_GRID: Tuple[float, ...] = tuple(10.0**k for k in range(-10, 0))


@dataclass(frozen=True)
class KrrModel:
    alpha: np.ndarray
    ridge: float
    train_targets: np.ndarray
    intercept: float = 0.0


def _values(kernel: Union[KernelMatrix, CrossKernel, np.ndarray]) -> np.ndarray:
    if isinstance(kernel, (KernelMatrix, CrossKernel)):
        return kernel.values
    return np.asarray(kernel, dtype=np.float64)


def ridge_search(
    A: np.ndarray, b: np.ndarray, grid: Sequence[float] = DEFAULT_RIDGE_GRID
) -> Tuple[float, np.ndarray]:
    """
    Ascending ridge search: first value whose shifted system solves.

    Returns:
        (ridge, solution)

    Raises:
        KernelUnusableError: every grid value failed
    """
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise NumericalError("kernel or target contains NaN or infinite entries")
    for ridge in grid:
        try:
            solution = solve_spd(A, ridge, b)
        except NotPositiveDefiniteError as e:
            logger.debug(f"ridge {ridge:g} rejected: {e}")
            continue
        if ridge > grid[0]:
            logger.debug(f"ridge search settled at {ridge:g}")
        return ridge, solution
    raise KernelUnusableError("kernel unusable")


def fit_krr(
    K: Union[KernelMatrix, np.ndarray],
    Y: np.ndarray,
    ridge_grid: Sequence[float] = DEFAULT_RIDGE_GRID,
    center: bool = False,
) -> KrrModel:
    """
    Fit dual coefficients for a precomputed kernel.

    Args:
        K: n x n kernel
        Y: Length-n targets
        ridge_grid: Ascending candidate ridge values
        center: Fit on Y - mean(Y) and add the mean back at prediction time

    Returns:
        KrrModel

    Raises:
        DataError: shape mismatch
        KernelUnusableError: no ridge value on the grid works
    """
    values = _values(K)
    Y = np.asarray(Y, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != values.shape[1] or Y.shape != (values.shape[0],):
        raise DataError(f"dimension mismatch: kernel {values.shape}, targets {Y.shape}")

    intercept = float(np.mean(Y)) if center else 0.0
    ridge, alpha = ridge_search(values, Y - intercept, ridge_grid)
    return KrrModel(alpha=alpha, ridge=ridge, train_targets=Y.copy(), intercept=intercept)


def predict_krr(model: KrrModel, Kx: Union[CrossKernel, KernelMatrix, np.ndarray]) -> np.ndarray:
    """Predictions Kx alpha (+ intercept when centered)"""
    values = np.atleast_2d(_values(Kx))
    if values.shape[1] != model.alpha.shape[0]:
        raise DataError(
            f"dimension mismatch: cross kernel has {values.shape[1]} columns, model has {model.alpha.shape[0]}"
        )
    return values @ model.alpha + model.intercept


def krr_training_identity(model: KrrModel, K: Union[KernelMatrix, np.ndarray]) -> float:
    """max |K alpha - (Y - lambda alpha)| on the training set"""
    values = _values(K)
    fitted = values @ model.alpha
    expected = (model.train_targets - model.intercept) - model.ridge * model.alpha
    return float(np.max(np.abs(fitted - expected)))
