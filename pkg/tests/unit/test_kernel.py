"""
Unit tests for tree ensemble kernels
"""

import numpy as np
import pytest

from src.config import Family, RfParams, ScenarioSpec
from src.data.simgen import generate
from src.ensembles import fit_gbt, fit_rf
from src.ensembles.rf import RandomForest, apply_rf
from src.ensembles.tree import TreeNode
from src.errors import DataError
from src.kernels.kernel import (
    cross_kernel,
    export_kernel_csv,
    kernel_matrix,
    load_kernel_csv,
)


def _stump(threshold):
    return TreeNode(
        split_feature=0,
        split_threshold=threshold,
        left=TreeNode(leaf_id=0, leaf_value=0.0),
        right=TreeNode(leaf_id=1, leaf_value=1.0),
    )


def _forest(*trees):
    return RandomForest(
        trees=tuple(trees),
        bootstrap_seeds=tuple(range(len(trees))),
        params=RfParams(m_trees=len(trees)),
        n_features=1,
    )


@pytest.fixture
def three_points():
    return np.array([[0.2], [0.4], [0.9]])


class TestKernelMatrix:
    """Test suite for the train kernel"""

    def test_single_tree(self, three_points):
        """Test one stump gives a 0/1 block kernel"""
        K = kernel_matrix(_forest(_stump(0.5)), three_points)
        expected = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 1]], dtype=float)
        assert np.array_equal(K.values, expected)
        assert K.m_trees == 1

    def test_two_trees_average(self, three_points):
        """Test two trees average their co-occurrence indicators"""
        forest = _forest(_stump(0.5), TreeNode(leaf_id=0, leaf_value=0.0))
        K = kernel_matrix(forest, three_points)
        assert K.values[0, 2] == 0.5
        assert K.values[0, 1] == 1.0
        assert np.array_equal(K.counts, [[2, 2, 1], [2, 2, 1], [1, 1, 2]])

    def test_matches_brute_force(self, small_forest, friedman_small):
        """Test agreement with a pairwise leaf comparison"""
        leaves = apply_rf(small_forest, friedman_small.X)
        expected = (leaves[:, None, :] == leaves[None, :, :]).mean(axis=2)
        K = kernel_matrix(small_forest, friedman_small)
        assert np.allclose(K.values, expected, rtol=0, atol=1e-15)

    def test_structure(self, small_forest, friedman_small):
        """Test symmetry, unit diagonal, 1/M grid and positive semidefiniteness"""
        K = kernel_matrix(small_forest, friedman_small).values
        assert np.array_equal(K, K.T)
        assert np.all(np.diag(K) == 1.0)
        assert np.all((K >= 0) & (K <= 1))
        assert np.allclose(K * 25, np.round(K * 25))
        assert np.linalg.eigvalsh(K).min() > -1e-10

    def test_boosted_kernel(self, small_boosted, friedman_small):
        """Test a boosted ensemble gives one kernel term per round"""
        K = kernel_matrix(small_boosted, friedman_small)
        assert K.m_trees == 15
        assert np.all(np.diag(K.values) == 1.0)

    def test_workers_give_identical_counts(self, small_forest, friedman_small):
        """Test thread count has no effect on the counts"""
        serial = kernel_matrix(small_forest, friedman_small, workers=1)
        threaded = kernel_matrix(small_forest, friedman_small, workers=4)
        assert np.array_equal(serial.counts, threaded.counts)

    def test_row_permutation_permutes_kernel(self, small_forest, friedman_small, rng):
        """Test permuting rows permutes rows and columns of K"""
        perm = rng.permutation(friedman_small.n)
        K = kernel_matrix(small_forest, friedman_small.X)
        permuted = kernel_matrix(small_forest, friedman_small.X[perm])
        assert np.array_equal(permuted.counts, K.counts[np.ix_(perm, perm)])

    def test_dimension_mismatch(self, small_forest):
        """Test a wrong column count is rejected"""
        with pytest.raises(DataError, match="dimension mismatch"):
            kernel_matrix(small_forest, np.zeros((3, 2)))


class TestCrossKernel:
    """Test suite for the test x train kernel"""

    def test_identical_row_is_one(self, small_forest, friedman_small):
        """Test a test row equal to a training row has kernel value 1"""
        Kx = cross_kernel(small_forest, friedman_small.X[:5], friedman_small)
        assert Kx.values.shape == (5, friedman_small.n)
        assert np.all(Kx.values[np.arange(5), np.arange(5)] == 1.0)

    def test_matches_train_kernel_block(self, small_forest, friedman_small):
        """Test the cross kernel on training rows equals that block of K"""
        K = kernel_matrix(small_forest, friedman_small)
        Kx = cross_kernel(small_forest, friedman_small.X[10:20], friedman_small)
        assert np.array_equal(Kx.counts, K.counts[10:20])


class TestKernelCsv:
    """Test suite for kernel CSV files"""

    def test_round_trip(self, small_forest, friedman_small, tmp_path):
        """Test a kernel survives export and reload exactly"""
        K = kernel_matrix(small_forest, friedman_small).values
        path = export_kernel_csv(K, tmp_path / "K.csv")
        assert np.array_equal(load_kernel_csv(path), K)

    def test_missing_file(self, tmp_path):
        """Test a missing kernel file is a data error"""
        with pytest.raises(DataError):
            load_kernel_csv(tmp_path / "absent.csv")

    def test_non_numeric(self, tmp_path):
        """Test a non-numeric cell is a data error"""
        path = tmp_path / "bad.csv"
        path.write_text("1,a\n0,1\n")
        with pytest.raises(DataError, match="not a numeric"):
            load_kernel_csv(path)


@pytest.mark.parametrize("seed", range(50))
def test_invariants_on_random_ensembles(seed):
    """Test kernel invariants on random forests and boosted models"""
    rng = np.random.default_rng(seed)
    n, p = int(rng.integers(20, 80)), int(rng.integers(5, 9))
    data = generate(ScenarioSpec(family=Family.FRIEDMAN, n=n, p=p, seed=seed))
    if seed % 2:
        ensemble = fit_gbt(data, m_rounds=int(rng.integers(3, 15)), master_seed=seed)
    else:
        ensemble = fit_rf(data, m_trees=int(rng.integers(3, 30)), master_seed=seed)
    K = kernel_matrix(ensemble, data)
    assert np.array_equal(K.counts, K.counts.T)
    assert np.all(np.diag(K.values) == 1.0)
    assert np.issubdtype(K.counts.dtype, np.integer)
    assert np.array_equal(K.values, K.counts / K.m_trees)
    assert np.linalg.eigvalsh(K.values).min() >= -1e-8
