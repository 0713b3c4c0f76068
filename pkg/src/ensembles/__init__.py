"""Ensembles package"""

from typing import Union

import numpy as np

from .gbt import GbtModel, apply_gbt, fit_gbt, predict_gbt, predict_gbt_batch
from .rf import RandomForest, apply_rf, fit_rf, predict_rf, predict_rf_batch
from .tree import TreeNode, fit_tree, leaf_of, predict_tree

Ensemble = Union[RandomForest, GbtModel]


def apply_ensemble(ensemble: Ensemble, X: np.ndarray) -> np.ndarray:
    """n x M leaf-id matrix for either ensemble kind"""
    if isinstance(ensemble, RandomForest):
        return apply_rf(ensemble, X)
    return apply_gbt(ensemble, X)


def predict_ensemble(ensemble: Ensemble, X: np.ndarray) -> np.ndarray:
    if isinstance(ensemble, RandomForest):
        return predict_rf_batch(ensemble, X)
    return predict_gbt_batch(ensemble, X)


__all__ = [
    "Ensemble",
    "GbtModel",
    "RandomForest",
    "TreeNode",
    "apply_ensemble",
    "fit_gbt",
    "fit_rf",
    "fit_tree",
    "leaf_of",
    "predict_ensemble",
    "predict_gbt",
    "predict_rf",
    "predict_tree",
]
