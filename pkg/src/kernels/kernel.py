"""
Tree Ensemble Kernels

k(x_i, x_j) = fraction of trees in which x_i and x_j share a terminal node.
Co-occurrence counts come from the sparse leaf-incidence matrix Z (one
column per leaf of every tree): Z Z^T sums the all-ones blocks of each leaf
bucket, costing O(M n + sum of bucket sizes squared).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Union

import numpy as np
from scipy import sparse

from ..data.dataset import Dataset
from ..ensembles import Ensemble, apply_ensemble
from ..errors import DataError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KernelMatrix:
    """Symmetric train x train kernel; values = counts / m_trees"""

    counts: np.ndarray
    m_trees: int
    values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        values = self.counts / float(self.m_trees)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.counts.shape[0]


@dataclass(frozen=True)
class CrossKernel:
    """test x train kernel; values = counts / m_trees"""

    counts: np.ndarray
    m_trees: int
    values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        values = self.counts / float(self.m_trees)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def _leaf_offsets(ensemble: Ensemble) -> np.ndarray:
    sizes = np.array([flat.n_leaves for flat in ensemble.flat], dtype=np.int64)
    return np.concatenate([[0], np.cumsum(sizes)])


def _incidence(leaves: np.ndarray, offsets: np.ndarray, trees: np.ndarray) -> sparse.csr_matrix:
    """Rows x (leaves of the given trees) indicator matrix"""
    n = leaves.shape[0]
    base = offsets[trees[0]]
    columns = (leaves[:, trees] + (offsets[trees] - base)[None, :]).ravel()
    rows = np.repeat(np.arange(n), trees.shape[0])
    width = int(offsets[trees[-1] + 1] - base)
    data = np.ones(columns.shape[0], dtype=np.int64)
    return sparse.csr_matrix((data, (rows, columns)), shape=(n, width))


def _co_occurrence(
    leaves_a: np.ndarray, leaves_b: np.ndarray, offsets: np.ndarray, workers: int
) -> np.ndarray:
    """Integer counts of shared leaves, accumulated per chunk of trees"""
    m_trees = leaves_a.shape[1]
    chunks: List[np.ndarray] = [
        c for c in np.array_split(np.arange(m_trees), max(1, min(workers, m_trees))) if c.size
    ]

    def count(trees: np.ndarray) -> np.ndarray:
        za = _incidence(leaves_a, offsets, trees)
        zb = za if leaves_b is leaves_a else _incidence(leaves_b, offsets, trees)
        return (za @ zb.T).toarray()

    if len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            partials = list(pool.map(count, chunks))
    else:
        partials = [count(chunks[0])]

    total = np.zeros((leaves_a.shape[0], leaves_b.shape[0]), dtype=np.int64)
    for partial in partials:
        total += partial
    return total


def _rows(data: Union[Dataset, np.ndarray]) -> np.ndarray:
    return data.X if isinstance(data, Dataset) else np.asarray(data, dtype=np.float64)


def kernel_matrix(ensemble: Ensemble, data: Union[Dataset, np.ndarray], workers: int = 1) -> KernelMatrix:
    """
    Train x train co-occurrence kernel.

    Args:
        ensemble: Fitted RandomForest or GbtModel
        data: Rows to compare (usually the training set)
        workers: Threads sharing the trees; counts are exact integers, so the
            result does not depend on this

    Returns:
        KernelMatrix with K[i, j] = (#trees where i and j share a leaf) / M

    Raises:
        DataError: feature dimension mismatch
    """
    leaves = apply_ensemble(ensemble, _rows(data))
    counts = _co_occurrence(leaves, leaves, _leaf_offsets(ensemble), workers)
    logger.debug(f"Kernel matrix: n={counts.shape[0]}, M={leaves.shape[1]}")
    return KernelMatrix(counts=counts, m_trees=leaves.shape[1])


def cross_kernel(
    ensemble: Ensemble,
    test_data: Union[Dataset, np.ndarray],
    train_data: Union[Dataset, np.ndarray],
    workers: int = 1,
) -> CrossKernel:
    """test x train co-occurrence kernel (no unit-diagonal constraint)"""
    test_leaves = apply_ensemble(ensemble, _rows(test_data))
    train_leaves = apply_ensemble(ensemble, _rows(train_data))
    counts = _co_occurrence(test_leaves, train_leaves, _leaf_offsets(ensemble), workers)
    return CrossKernel(counts=counts, m_trees=test_leaves.shape[1])


def export_kernel_csv(values: np.ndarray, path: Union[str, Path]) -> Path:
    """Headerless CSV, one matrix row per line, 17 significant digits"""
    path = Path(path)
    try:
        np.savetxt(path, np.atleast_2d(values), delimiter=",", fmt="%.17g")
    except OSError as e:
        raise DataError(f"cannot write kernel to {path}: {e}") from e
    return path


def load_kernel_csv(path: Union[str, Path]) -> np.ndarray:
    path = Path(path)
    try:
        values = np.loadtxt(path, delimiter=",", ndmin=2)
    except OSError as e:
        raise DataError(f"cannot read kernel file {path}: {e}") from e
    except ValueError as e:
        raise DataError(f"kernel file {path} is not a numeric CSV matrix: {e}") from e
    return values
