"""
Regression Tree - shared building block for RF and GBT

CART-style tree grown by exhaustive threshold search over a random subset of
features. The split score is pluggable: plain variance reduction for random
forests, the regularized second-order gain for boosting.
"""

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import TreeConfig
from ..data.dataset import Dataset
from ..errors import DataError

# Gains at or below this fraction of the node's centered sum of squares are roundoff.
_GAIN_RTOL = 1e-12


@dataclass(frozen=True)
class TreeNode:
    """
    One node of a fitted tree

    Internal nodes carry split_feature, split_threshold, left and right;
    terminal nodes carry leaf_id and leaf_value.
    """

    split_feature: Optional[int] = None
    split_threshold: Optional[float] = None
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None
    leaf_id: Optional[int] = None
    leaf_value: Optional[float] = None

    @property
    def is_leaf(self) -> bool:
        return self.leaf_id is not None


@dataclass(frozen=True)
class FlatTree:
    """
    Array form of a tree, nodes in preorder

    feature is -1 for terminal nodes; left/right are node positions;
    leaf_id is -1 for internal nodes.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf_id: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    @property
    def n_leaves(self) -> int:
        return int(np.count_nonzero(self.leaf_id >= 0))


class SplitCriterion(ABC):
    """Scores candidate splits from prefix sums of the node target"""

    min_child: float = 1.0
    # Gain unchanged by adding a constant to the target.
    shift_invariant: bool = False

    @abstractmethod
    def leaf_value(self, target: np.ndarray) -> float:
        """Value stored in a terminal node"""

    @abstractmethod
    def split_gains(
        self, left_sum: np.ndarray, left_n: np.ndarray, total_sum: float, total_n: int
    ) -> np.ndarray:
        """Gain of every candidate split position"""


class VarianceReduction(SplitCriterion):
    """Reduction of the within-node sum of squared errors"""

    shift_invariant = True

    def leaf_value(self, target: np.ndarray) -> float:
        return float(np.mean(target))

    def split_gains(self, left_sum, left_n, total_sum, total_n):
        right_sum = total_sum - left_sum
        right_n = total_n - left_n
        return left_sum**2 / left_n + right_sum**2 / right_n - total_sum**2 / total_n


class RegularizedGain(SplitCriterion):
    """
    Second-order boosting gain for squared error

    The node target is the residual r = y - y_hat, so the gradient sum is
    G = -sum(r) and the hessian sum is the row count.
    """

    def __init__(self, reg_lambda: float = 1.0, reg_gamma: float = 0.0, min_child_weight: float = 1.0):
        self.reg_lambda = reg_lambda
        self.reg_gamma = reg_gamma
        self.min_child = max(1.0, min_child_weight)

    def leaf_value(self, target: np.ndarray) -> float:
        return float(np.sum(target) / (target.shape[0] + self.reg_lambda))

    def split_gains(self, left_sum, left_n, total_sum, total_n):
        lam = self.reg_lambda
        right_sum = total_sum - left_sum
        right_n = total_n - left_n
        score = (
            left_sum**2 / (left_n + lam)
            + right_sum**2 / (right_n + lam)
            - total_sum**2 / (total_n + lam)
        )
        return 0.5 * score - self.reg_gamma


def _best_split(
    X_node: np.ndarray, target: np.ndarray, criterion: SplitCriterion
) -> Optional[Tuple[float, int, float]]:
    """
    Exhaustive threshold search over the columns of X_node.

    Returns:
        (gain, column position, threshold) or None when no valid split exists
    """
    m = X_node.shape[0]
    order = np.argsort(X_node, axis=0, kind="stable")
    xs = np.take_along_axis(X_node, order, axis=0)
    if criterion.shift_invariant:
        target = target - np.mean(target)
    ts = target[order]

    left_sum = np.cumsum(ts, axis=0)[:-1]
    left_n = np.arange(1, m, dtype=np.float64)[:, None]
    total_sum = float(np.sum(target))

    gains = criterion.split_gains(left_sum, left_n, total_sum, m)
    valid = (xs[1:] > xs[:-1]) & (left_n >= criterion.min_child) & (m - left_n >= criterion.min_child)
    gains = np.where(valid, gains, -np.inf)

    # Feature-major scan so ties resolve to the earliest drawn feature.
    flat = gains.T.ravel()
    best = int(np.argmax(flat))
    if not np.isfinite(flat[best]):
        return None
    column, position = divmod(best, m - 1)

    low, high = xs[position, column], xs[position + 1, column]
    threshold = 0.5 * (low + high)
    if threshold >= high:
        threshold = low
    return float(flat[best]), int(column), float(threshold)


def grow_tree(
    X: np.ndarray,
    target: np.ndarray,
    sample_indices: np.ndarray,
    config: TreeConfig,
    criterion: SplitCriterion,
    rng: np.random.Generator,
) -> FlatTree:
    """
    Grow a tree in preorder with an explicit stack.

    Args:
        X: Full feature matrix
        target: Per-row values the tree fits (targets or residuals)
        sample_indices: Rows reaching the root (bootstrap rows may repeat)
        config: Depth, node size and feature sampling controls
        criterion: Split score and leaf value rule
        rng: Source of the per-node feature draws

    Returns:
        FlatTree with leaf ids assigned 0..T-1 in preorder
    """
    p = X.shape[1]
    mtry = config.resolved_mtry(p)
    max_depth = config.max_depth if config.max_depth is not None else np.inf

    feature: List[int] = []
    threshold: List[float] = []
    left: List[int] = []
    right: List[int] = []
    leaf_id: List[int] = []
    value: List[float] = []
    n_leaves = 0

    # (rows, depth, parent position, attach to left?)
    stack = [(np.asarray(sample_indices, dtype=np.intp), 0, -1, True)]
    while stack:
        rows, depth, parent, is_left = stack.pop()
        node = len(feature)
        if parent >= 0:
            (left if is_left else right)[parent] = node

        node_target = target[rows]
        split = None
        if rows.shape[0] > config.min_node_size and depth < max_depth:
            columns = rng.choice(p, size=mtry, replace=False) if mtry < p else np.arange(p)
            split = _best_split(X[np.ix_(rows, columns)], node_target, criterion)
            if split is not None:
                centered = node_target - np.mean(node_target)
                tolerance = config.min_split_gain + _GAIN_RTOL * float(np.dot(centered, centered))
                if split[0] <= tolerance:
                    split = None

        feature.append(-1)
        threshold.append(np.nan)
        left.append(-1)
        right.append(-1)
        if split is None:
            leaf_id.append(n_leaves)
            value.append(criterion.leaf_value(node_target))
            n_leaves += 1
            continue

        _, column, cut = split
        split_feature = int(columns[column])
        feature[node] = split_feature
        threshold[node] = cut
        leaf_id.append(-1)
        value.append(np.nan)

        goes_left = X[rows, split_feature] <= cut
        stack.append((rows[~goes_left], depth + 1, node, False))
        stack.append((rows[goes_left], depth + 1, node, True))

    return FlatTree(
        feature=np.asarray(feature, dtype=np.intp),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.intp),
        right=np.asarray(right, dtype=np.intp),
        leaf_id=np.asarray(leaf_id, dtype=np.intp),
        value=np.asarray(value, dtype=np.float64),
    )


def build_nodes(flat: FlatTree) -> TreeNode:
    """Linked TreeNode structure from the array form"""
    nodes: List[Optional[TreeNode]] = [None] * flat.n_nodes
    # Children always follow their parent in preorder.
    for i in range(flat.n_nodes - 1, -1, -1):
        if flat.feature[i] < 0:
            nodes[i] = TreeNode(leaf_id=int(flat.leaf_id[i]), leaf_value=float(flat.value[i]))
        else:
            nodes[i] = TreeNode(
                split_feature=int(flat.feature[i]),
                split_threshold=float(flat.threshold[i]),
                left=nodes[flat.left[i]],
                right=nodes[flat.right[i]],
            )
    return nodes[0]


def flatten_tree(root: TreeNode) -> FlatTree:
    """Array form of a linked tree, nodes in preorder"""
    feature, threshold, left, right, leaf_id, value = [], [], [], [], [], []
    stack = [(root, -1, True)]
    while stack:
        node, parent, is_left = stack.pop()
        position = len(feature)
        if parent >= 0:
            (left if is_left else right)[parent] = position
        left.append(-1)
        right.append(-1)
        if node.is_leaf:
            feature.append(-1)
            threshold.append(np.nan)
            leaf_id.append(node.leaf_id)
            value.append(node.leaf_value)
        else:
            feature.append(node.split_feature)
            threshold.append(node.split_threshold)
            leaf_id.append(-1)
            value.append(np.nan)
            stack.append((node.right, position, False))
            stack.append((node.left, position, True))
    return FlatTree(
        feature=np.asarray(feature, dtype=np.intp),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.intp),
        right=np.asarray(right, dtype=np.intp),
        leaf_id=np.asarray(leaf_id, dtype=np.intp),
        value=np.asarray(value, dtype=np.float64),
    )


def fit_tree(
    data: Dataset,
    sample_indices: Sequence[int],
    config: TreeConfig,
    target_override: Optional[np.ndarray] = None,
    rng: Optional[np.random.Generator] = None,
    criterion: Optional[SplitCriterion] = None,
) -> TreeNode:
    """
    Fit a regression tree on the rows in sample_indices.

    Args:
        data: Training dataset
        sample_indices: Rows used for fitting (repeats allowed)
        config: Tree growth controls
        target_override: Length-n values to fit instead of data.y (boosting residuals)
        rng: Seeded generator for feature draws
        criterion: Split score; variance reduction by default

    Returns:
        Root TreeNode

    Raises:
        DataError: "empty node" or "no features"
    """
    if data.p == 0:
        raise DataError("no features")
    sample_indices = np.asarray(sample_indices, dtype=np.intp)
    if sample_indices.size == 0:
        raise DataError("empty node")

    target = data.y if target_override is None else np.asarray(target_override, dtype=np.float64)
    if target.shape != (data.n,):
        raise DataError(f"target_override must have length {data.n}, got {target.shape}")

    flat = grow_tree(
        data.X,
        target,
        sample_indices,
        config,
        criterion or VarianceReduction(),
        rng if rng is not None else np.random.default_rng(0),
    )
    return build_nodes(flat)


def leaf_of(tree: TreeNode, x: Sequence[float]) -> int:
    """Leaf id reached by x; ties at the threshold go left"""
    node = tree
    while not node.is_leaf:
        node = node.left if x[node.split_feature] <= node.split_threshold else node.right
    return node.leaf_id


def predict_tree(tree: TreeNode, x: Sequence[float]) -> float:
    node = tree
    while not node.is_leaf:
        node = node.left if x[node.split_feature] <= node.split_threshold else node.right
    return node.leaf_value


def _terminal_positions(flat: FlatTree, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    position = np.zeros(X.shape[0], dtype=np.intp)
    while True:
        rows = np.nonzero(flat.feature[position] >= 0)[0]
        if rows.size == 0:
            return position
        current = position[rows]
        goes_left = X[rows, flat.feature[current]] <= flat.threshold[current]
        position[rows] = np.where(goes_left, flat.left[current], flat.right[current])


def apply_tree(tree: Union[TreeNode, FlatTree], X: np.ndarray) -> np.ndarray:
    """Leaf ids for every row of X"""
    flat = tree if isinstance(tree, FlatTree) else flatten_tree(tree)
    return flat.leaf_id[_terminal_positions(flat, X)]


def predict_tree_batch(tree: Union[TreeNode, FlatTree], X: np.ndarray) -> np.ndarray:
    flat = tree if isinstance(tree, FlatTree) else flatten_tree(tree)
    return flat.value[_terminal_positions(flat, X)]


def tree_depth(tree: TreeNode) -> int:
    depth, stack = 0, [(tree, 0)]
    while stack:
        node, d = stack.pop()
        depth = max(depth, d)
        if not node.is_leaf:
            stack.extend([(node.left, d + 1), (node.right, d + 1)])
    return depth


def n_leaves(tree: TreeNode) -> int:
    return flatten_tree(tree).n_leaves


def tree_to_dict(tree: Union[TreeNode, FlatTree]) -> Dict:
    """
    JSON-ready node list with explicit child indices

    Returns:
        {"n_leaves": T, "nodes": [{"id", "feature", "threshold", "left", "right",
        "leaf_id", "value"}, ...]} in preorder
    """
    flat = tree if isinstance(tree, FlatTree) else flatten_tree(tree)
    nodes = []
    for i in range(flat.n_nodes):
        if flat.feature[i] < 0:
            nodes.append(
                {
                    "id": i,
                    "feature": None,
                    "threshold": None,
                    "left": None,
                    "right": None,
                    "leaf_id": int(flat.leaf_id[i]),
                    "value": float(flat.value[i]),
                }
            )
        else:
            nodes.append(
                {
                    "id": i,
                    "feature": int(flat.feature[i]),
                    "threshold": float(flat.threshold[i]),
                    "left": int(flat.left[i]),
                    "right": int(flat.right[i]),
                    "leaf_id": None,
                    "value": None,
                }
            )
    return {"n_leaves": flat.n_leaves, "nodes": nodes}


def flat_from_dict(document: Dict) -> FlatTree:
    nodes = sorted(document["nodes"], key=lambda node: node["id"])

    def column(key, missing, dtype):
        return np.asarray([missing if node[key] is None else node[key] for node in nodes], dtype=dtype)

    return FlatTree(
        feature=column("feature", -1, np.intp),
        threshold=column("threshold", np.nan, np.float64),
        left=column("left", -1, np.intp),
        right=column("right", -1, np.intp),
        leaf_id=column("leaf_id", -1, np.intp),
        value=column("value", np.nan, np.float64),
    )


def tree_from_dict(document: Dict) -> TreeNode:
    return build_nodes(flat_from_dict(document))


def tree_to_json(tree: Union[TreeNode, FlatTree]) -> str:
    return json.dumps(tree_to_dict(tree), sort_keys=True)
