"""
Unit tests for the random forest
"""

import numpy as np
import pytest

from src.config import Family, RfParams, ScenarioSpec, TreeConfig
from src.data.dataset import Dataset
from src.data.simgen import generate
from src.ensembles.rf import (
    RandomForest,
    apply_rf,
    fit_rf,
    forest_from_json,
    forest_to_json,
    predict_rf,
    predict_rf_batch,
)
from src.ensembles.tree import TreeNode, predict_tree
from src.errors import DataError


def _forest_of(*trees):
    return RandomForest(
        trees=tuple(trees),
        bootstrap_seeds=tuple(range(len(trees))),
        params=RfParams(m_trees=len(trees)),
        n_features=1,
    )


class TestFitRf:
    """Test suite for forest fitting"""

    def test_constant_target(self):
        """Test a constant target predicts that constant everywhere"""
        data = Dataset(np.arange(10, dtype=float)[:, None], np.full(10, 3.5))
        forest = fit_rf(data, m_trees=1, master_seed=1)
        assert predict_rf(forest, [4.2]) == 3.5
        assert np.all(predict_rf_batch(forest, data.X) == 3.5)

    def test_same_seed_identical_forest(self, friedman_small):
        """Test equal master seeds give identical forests"""
        a = fit_rf(friedman_small, m_trees=10, master_seed=7)
        b = fit_rf(friedman_small, m_trees=10, master_seed=7)
        assert forest_to_json(a) == forest_to_json(b)

    def test_different_seed_differs(self, friedman_small):
        """Test a different master seed changes the forest"""
        a = fit_rf(friedman_small, m_trees=10, master_seed=7)
        b = fit_rf(friedman_small, m_trees=10, master_seed=8)
        assert forest_to_json(a) != forest_to_json(b)

    def test_worker_count_does_not_change_forest(self, friedman_small):
        """Test thread count has no effect on the fitted forest"""
        serial = fit_rf(friedman_small, m_trees=12, master_seed=4, workers=1)
        threaded = fit_rf(friedman_small, m_trees=12, master_seed=4, workers=4)
        assert forest_to_json(serial) == forest_to_json(threaded)

    def test_in_sample_mse_below_variance(self):
        """Test the forest beats the mean predictor in sample"""
        data = generate(ScenarioSpec(family=Family.FRIEDMAN, n=200, p=10, seed=1))
        forest = fit_rf(data, m_trees=50, master_seed=0)
        mse = np.mean((predict_rf_batch(forest, data.X) - data.y) ** 2)
        assert mse < np.var(data.y)

    def test_default_mtry_is_floor_sqrt_p(self, friedman_small):
        """Test mtry defaults to floor(sqrt(p))"""
        forest = fit_rf(friedman_small, m_trees=2)
        assert forest.params.tree.resolved_mtry(friedman_small.p) == 2
        assert forest.m_trees == 2

    def test_insufficient_data(self):
        """Test a single row is rejected"""
        data = Dataset(np.array([[1.0]]), np.array([2.0]))
        with pytest.raises(DataError, match="insufficient data"):
            fit_rf(data, m_trees=3)

    def test_no_features(self):
        """Test a dataset without columns is rejected"""
        data = Dataset(np.empty((4, 0)), np.arange(4.0))
        with pytest.raises(DataError, match="no features"):
            fit_rf(data, m_trees=3, config=TreeConfig())


class TestPredictRf:
    """Test suite for forest prediction"""

    def test_all_trees_constant(self):
        """Test constant trees give their shared value"""
        forest = _forest_of(
            TreeNode(leaf_id=0, leaf_value=5.0), TreeNode(leaf_id=0, leaf_value=5.0)
        )
        assert predict_rf(forest, [0.0]) == 5.0

    def test_mean_of_two_trees(self):
        """Test prediction averages the trees"""
        forest = _forest_of(
            TreeNode(leaf_id=0, leaf_value=0.0), TreeNode(leaf_id=0, leaf_value=1.0)
        )
        assert predict_rf(forest, [0.0]) == 0.5

    def test_equals_mean_of_tree_predictions(self, small_forest, friedman_small):
        """Test prediction equals the mean of per-tree predictions"""
        for x in friedman_small.X[:10]:
            expected = np.mean([predict_tree(t, x) for t in small_forest.trees])
            assert predict_rf(small_forest, x) == pytest.approx(expected, abs=1e-12)

    def test_predictions_within_target_range(self, small_forest, friedman_small, rng):
        """Test predictions never leave [min y, max y], even off the training range"""
        X = np.vstack([friedman_small.X, rng.uniform(-1.0, 2.0, size=(200, friedman_small.p))])
        predictions = predict_rf_batch(small_forest, X)
        assert predictions.min() >= friedman_small.y.min() - 1e-12
        assert predictions.max() <= friedman_small.y.max() + 1e-12

    def test_batch_matches_scalar(self, small_forest, friedman_small):
        """Test batch prediction agrees with per-row prediction"""
        batch = predict_rf_batch(small_forest, friedman_small.X[:15])
        scalar = [predict_rf(small_forest, x) for x in friedman_small.X[:15]]
        assert np.allclose(batch, scalar, rtol=0, atol=1e-12)

    def test_apply_shape(self, small_forest, friedman_small):
        """Test the leaf matrix has one column per tree"""
        leaves = apply_rf(small_forest, friedman_small.X)
        assert leaves.shape == (friedman_small.n, 25)

    def test_dimension_mismatch(self, small_forest):
        """Test a wrong column count is rejected"""
        with pytest.raises(DataError, match="dimension mismatch"):
            predict_rf_batch(small_forest, np.zeros((2, 3)))


class TestForestJson:
    """Test suite for the forest document"""

    def test_round_trip_predictions(self, small_forest, friedman_small):
        """Test a restored forest predicts identically"""
        restored = forest_from_json(forest_to_json(small_forest))
        assert restored.m_trees == small_forest.m_trees
        assert np.array_equal(
            predict_rf_batch(restored, friedman_small.X),
            predict_rf_batch(small_forest, friedman_small.X),
        )

    def test_wrong_kind(self):
        """Test a boosted document is not read as a forest"""
        with pytest.raises(DataError):
            forest_from_json('{"kind": "gradient_boosting"}')
