"""Nodes package"""

from .replicate_nodes import (
    align_node,
    evaluate_node,
    fit_node,
    kernel_node,
    landmark_node,
    prepare_node,
)

__all__ = [
    "align_node",
    "evaluate_node",
    "fit_node",
    "kernel_node",
    "landmark_node",
    "prepare_node",
]
