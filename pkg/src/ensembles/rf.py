"""
Random Forest Regressor

Bagged ensemble of variance-reduction trees; the prediction is the mean of
the tree predictions.
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from ..config import RfParams, TreeConfig
from ..data.dataset import Dataset
from ..errors import DataError
from ..utils import derive_seed
from .tree import (
    FlatTree,
    TreeNode,
    VarianceReduction,
    apply_tree,
    build_nodes,
    flat_from_dict,
    flatten_tree,
    grow_tree,
    predict_tree,
    predict_tree_batch,
    tree_to_dict,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RandomForest:
    """Fitted forest; immutable and safe to share across threads"""

    trees: Tuple[TreeNode, ...]
    bootstrap_seeds: Tuple[int, ...]
    params: RfParams
    n_features: int
    flat: Tuple[FlatTree, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if not self.flat:
            object.__setattr__(self, "flat", tuple(flatten_tree(t) for t in self.trees))

    @property
    def m_trees(self) -> int:
        return len(self.trees)


def _fit_one(data: Dataset, config: TreeConfig, seed: int) -> FlatTree:
    rng = np.random.default_rng(seed)
    bootstrap = rng.integers(0, data.n, size=data.n)
    return grow_tree(data.X, data.y, bootstrap, config, VarianceReduction(), rng)


def fit_rf(
    data: Dataset,
    m_trees: int = 500,
    config: Optional[TreeConfig] = None,
    master_seed: int = 0,
    workers: int = 1,
) -> RandomForest:
    """
    Fit a random forest.

    Tree m is grown on a size-n bootstrap drawn from its own generator seeded
    with derive_seed(master_seed, m), so the forest does not depend on the
    number of workers.

    Args:
        data: Training dataset
        m_trees: Number of trees M
        config: Tree growth controls (mtry defaults to floor(sqrt(p)))
        master_seed: Seed of the whole forest
        workers: Threads used to grow trees

    Returns:
        Fitted RandomForest

    Raises:
        DataError: "insufficient data" when n < 2
    """
    if data.n < 2:
        raise DataError("insufficient data")
    if m_trees < 1:
        raise DataError("m_trees must be at least 1")
    if data.p == 0:
        raise DataError("no features")
    config = config or TreeConfig()
    config.resolved_mtry(data.p)

    seeds = tuple(derive_seed(master_seed, m) for m in range(m_trees))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            flats = list(pool.map(lambda s: _fit_one(data, config, s), seeds))
    else:
        flats = [_fit_one(data, config, s) for s in seeds]

    logger.debug(f"Fitted random forest: {m_trees} trees, {sum(f.n_leaves for f in flats)} leaves")

    return RandomForest(
        trees=tuple(build_nodes(f) for f in flats),
        bootstrap_seeds=seeds,
        params=RfParams(m_trees=m_trees, tree=config),
        n_features=data.p,
        flat=tuple(flats),
    )


def _check_width(forest_p: int, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != forest_p:
        raise DataError(f"dimension mismatch: model has {forest_p} features, data has {X.shape[1]}")
    return X


def predict_rf(forest: RandomForest, x: np.ndarray) -> float:
    """Mean of the tree predictions for one feature vector"""
    return float(np.mean([predict_tree(tree, x) for tree in forest.trees]))


def predict_rf_batch(forest: RandomForest, X: np.ndarray) -> np.ndarray:
    X = _check_width(forest.n_features, X)
    total = np.zeros(X.shape[0])
    for flat in forest.flat:
        total += predict_tree_batch(flat, X)
    return total / forest.m_trees


def apply_rf(forest: RandomForest, X: np.ndarray) -> np.ndarray:
    """n x M matrix of leaf ids"""
    X = _check_width(forest.n_features, X)
    return np.column_stack([apply_tree(flat, X) for flat in forest.flat])


def forest_to_dict(forest: RandomForest) -> Dict:
    return {
        "kind": "random_forest",
        "n_features": forest.n_features,
        "params": forest.params.model_dump(mode="json"),
        "bootstrap_seeds": list(forest.bootstrap_seeds),
        "trees": [tree_to_dict(flat) for flat in forest.flat],
    }


def forest_to_json(forest: RandomForest) -> str:
    return json.dumps(forest_to_dict(forest), sort_keys=True)


def forest_from_json(document: str) -> RandomForest:
    data = json.loads(document)
    if data.get("kind") != "random_forest":
        raise DataError(f"not a random forest document: kind={data.get('kind')!r}")
    flats = tuple(flat_from_dict(tree) for tree in data["trees"])
    return RandomForest(
        trees=tuple(build_nodes(f) for f in flats),
        bootstrap_seeds=tuple(data["bootstrap_seeds"]),
        params=RfParams.model_validate(data["params"]),
        n_features=data["n_features"],
        flat=flats,
    )
