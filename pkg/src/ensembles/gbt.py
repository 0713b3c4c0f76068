"""
Gradient Boosted Trees Regressor

Squared-error boosting with the regularized objective: leaf weights
w = -G / (H + lambda), split gain penalized by gamma, shrinkage eta.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from ..config import GbtParams, TreeConfig
from ..data.dataset import Dataset
from ..errors import DataError
from ..utils import derive_seed
from .tree import (
    FlatTree,
    RegularizedGain,
    TreeNode,
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
class GbtModel:
    """
    Fitted boosted ensemble

    Leaf values hold the raw weights w; predictions add learning_rate * w.
    training_loss[m] is the training MSE after m rounds (index 0 = base score only).
    """

    trees: Tuple[TreeNode, ...]
    base_score: float
    params: GbtParams
    n_features: int
    training_loss: Tuple[float, ...] = ()
    flat: Tuple[FlatTree, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if not self.flat:
            object.__setattr__(self, "flat", tuple(flatten_tree(t) for t in self.trees))

    @property
    def m_rounds(self) -> int:
        return len(self.trees)

    @property
    def learning_rate(self) -> float:
        return self.params.learning_rate

    @property
    def reg_lambda(self) -> float:
        return self.params.reg_lambda

    @property
    def reg_gamma(self) -> float:
        return self.params.reg_gamma


def _tree_config(params: GbtParams, p: int) -> TreeConfig:
    return TreeConfig(
        max_depth=params.max_depth,
        min_node_size=1,
        mtry=max(1, int(np.floor(params.colsample_bynode * p))),
        min_split_gain=0.0,
    )


def fit_gbt(
    data: Dataset,
    m_rounds: Optional[int] = None,
    params: Optional[GbtParams] = None,
    master_seed: int = 0,
) -> GbtModel:
    """
    Fit a boosted tree ensemble for squared error.

    Each round fits a tree to the current residuals y - y_hat (gradients
    g = y_hat - y, hessians 1) and adds learning_rate times its leaf weights.

    Args:
        data: Training dataset
        m_rounds: Boosting rounds M; defaults to params.m_rounds
        params: Regularization and sampling controls
        master_seed: Seed for optional row/column subsampling

    Returns:
        Fitted GbtModel

    Raises:
        DataError: "insufficient data" when n < 2
    """
    if data.n < 2:
        raise DataError("insufficient data")
    if data.p == 0:
        raise DataError("no features")
    params = params or GbtParams()
    if m_rounds is not None:
        params = params.model_copy(update={"m_rounds": m_rounds})

    config = _tree_config(params, data.p)
    criterion = RegularizedGain(params.reg_lambda, params.reg_gamma, params.min_child_weight)
    n_rows = max(1, int(np.floor(params.subsample * data.n)))

    base_score = float(np.mean(data.y))
    fitted = np.full(data.n, base_score)
    losses = [float(np.mean((data.y - fitted) ** 2))]
    flats = []

    for m in range(params.m_rounds):
        rng = np.random.default_rng(derive_seed(master_seed, m))
        if n_rows < data.n:
            rows = np.sort(rng.choice(data.n, size=n_rows, replace=False))
        else:
            rows = np.arange(data.n)

        residual = data.y - fitted
        flat = grow_tree(data.X, residual, rows, config, criterion, rng)
        fitted = fitted + params.learning_rate * predict_tree_batch(flat, data.X)
        flats.append(flat)
        losses.append(float(np.mean((data.y - fitted) ** 2)))

    logger.debug(
        f"Fitted boosted ensemble: {params.m_rounds} rounds, train MSE {losses[0]:.4g} -> {losses[-1]:.4g}"
    )

    return GbtModel(
        trees=tuple(build_nodes(f) for f in flats),
        base_score=base_score,
        params=params,
        n_features=data.p,
        training_loss=tuple(losses),
        flat=tuple(flats),
    )


def _check_width(model: GbtModel, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.n_features:
        raise DataError(
            f"dimension mismatch: model has {model.n_features} features, data has {X.shape[1]}"
        )
    return X


def predict_gbt(model: GbtModel, x: np.ndarray) -> float:
    """base_score + learning_rate * sum of leaf weights along each tree's path"""
    return model.base_score + model.learning_rate * float(
        sum(predict_tree(tree, x) for tree in model.trees)
    )


def predict_gbt_batch(model: GbtModel, X: np.ndarray) -> np.ndarray:
    X = _check_width(model, X)
    total = np.zeros(X.shape[0])
    for flat in model.flat:
        total += predict_tree_batch(flat, X)
    return model.base_score + model.learning_rate * total


def apply_gbt(model: GbtModel, X: np.ndarray) -> np.ndarray:
    """n x M matrix of leaf ids"""
    X = _check_width(model, X)
    return np.column_stack([apply_tree(flat, X) for flat in model.flat])


def gbt_to_dict(model: GbtModel) -> Dict:
    return {
        "kind": "gradient_boosting",
        "n_features": model.n_features,
        "base_score": model.base_score,
        "params": model.params.model_dump(mode="json"),
        "training_loss": list(model.training_loss),
        "trees": [tree_to_dict(flat) for flat in model.flat],
    }


def gbt_to_json(model: GbtModel) -> str:
    return json.dumps(gbt_to_dict(model), sort_keys=True)


def gbt_from_json(document: str) -> GbtModel:
    data = json.loads(document)
    if data.get("kind") != "gradient_boosting":
        raise DataError(f"not a gradient boosting document: kind={data.get('kind')!r}")
    flats = tuple(flat_from_dict(tree) for tree in data["trees"])
    return GbtModel(
        trees=tuple(build_nodes(f) for f in flats),
        base_score=data["base_score"],
        params=GbtParams.model_validate(data["params"]),
        n_features=data["n_features"],
        training_loss=tuple(data["training_loss"]),
        flat=flats,
    )
