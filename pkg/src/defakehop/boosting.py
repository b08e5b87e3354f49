"""Gradient-boosted decision trees with logistic loss, built in-repo so
parameter counts are exactly auditable.

Depth-1 stumps serve as the per-channel soft classifiers, depth-6 trees
as the final ensemble classifier.  Trees are grown greedily on
second-order gradients; split gain is sum-of-gradients^2 over
(sum-of-hessians + lambda), split thresholds sit at sample midpoints, and
everything is deterministic given input order (ties resolve to the lowest
feature index).
"""
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .errors import DataError, DimensionError, InsufficientDataError

# margins are clamped before the logistic link so probabilities stay
# strictly inside (0, 1)
_MARGIN_CLIP = 30.0


@dataclass
class BoostParams:
    max_depth: int = 1
    n_trees: int = 100
    learning_rate: float = 0.3
    reg_lambda: float = 1.0
    min_child_weight: float = 1.0


@dataclass
class StumpEnsembleModel:
    """Flat-array forest: node arrays concatenated over trees."""

    n_features: int
    params: BoostParams
    base_score: float
    tree_starts: np.ndarray          # (n_trees,) root index per tree
    feature: np.ndarray              # (n_nodes,) int64, -1 for leaves
    threshold: np.ndarray            # (n_nodes,) float64
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray                # leaf log-odds contributions
    is_leaf: np.ndarray              # (n_nodes,) uint8

    @property
    def n_trees(self):
        return len(self.tree_starts)


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def log_loss(y, p):
    p = np.clip(p, 1e-15, 1 - 1e-15)
    return float(np.mean(-(y * np.log(p) + (1 - y) * np.log(1 - p))))


def _check_training_inputs(features, labels):
    X = np.ascontiguousarray(np.asarray(features, dtype=np.float64))
    y = np.asarray(labels, dtype=np.float64).ravel()
    if X.ndim != 2 or X.shape[1] == 0:
        raise DimensionError("features must be a non-empty 2-D matrix")
    if X.shape[0] != y.shape[0]:
        raise DimensionError("feature/label length mismatch")
    if X.shape[0] < 2:
        raise InsufficientDataError("need >= 2 samples to fit a booster")
    classes = np.unique(y)
    if not np.all(np.isin(classes, (0.0, 1.0))):
        raise DataError("labels must be binary 0/1")
    if classes.size < 2:
        raise DataError("training labels contain a single class")
    return X, y


def fit_boosted(features, labels, params=None, track_loss=False):
    """Fit a boosted forest; deterministic given input order."""
    X, y = _check_training_inputs(features, labels)
    p = params or BoostParams()
    n, d = X.shape
    pos_rate = float(np.clip(y.mean(), 1e-6, 1 - 1e-6))
    base_score = float(np.log(pos_rate / (1.0 - pos_rate)))

    sort_idx = np.ascontiguousarray(
        np.stack([np.argsort(X[:, j], kind="stable") for j in range(d)])
    ).astype(np.int64)

    margins = np.full(n, base_score)
    starts, feats, thrs, lefts, rights, values, leaves = [], [], [], [], [], [], []
    losses = []
    offset = 0
    for _ in range(p.n_trees):
        prob = sigmoid(margins)
        g = prob - y
        h = prob * (1.0 - prob)
        feature, threshold, left, right, value, is_leaf, leaf_of = kernels.build_tree(
            X, sort_idx, g, h, p.max_depth, p.reg_lambda, p.min_child_weight
        )
        starts.append(offset)
        feats.append(feature)
        thrs.append(threshold)
        lefts.append(np.where(left >= 0, left + offset, -1))
        rights.append(np.where(right >= 0, right + offset, -1))
        values.append(value)
        leaves.append(is_leaf)
        margins = margins + p.learning_rate * value[leaf_of]
        offset += len(feature)
        if track_loss:
            losses.append(log_loss(y, sigmoid(margins)))

    def _cat(parts, dtype):
        return np.concatenate(parts) if parts else np.empty(0, dtype=dtype)

    model = StumpEnsembleModel(
        n_features=d,
        params=p,
        base_score=base_score,
        tree_starts=np.asarray(starts, dtype=np.int64),
        feature=_cat(feats, np.int64),
        threshold=_cat(thrs, np.float64),
        left=_cat(lefts, np.int64),
        right=_cat(rights, np.int64),
        value=_cat(values, np.float64),
        is_leaf=_cat(leaves, np.uint8),
    )
    if track_loss:
        return model, losses
    return model


def predict_margin(model, features):
    X = np.ascontiguousarray(np.asarray(features, dtype=np.float64))
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DimensionError(
            f"feature dim {X.shape[1] if X.ndim == 2 else '?'} != "
            f"model dim {model.n_features}"
        )
    if model.n_trees == 0:
        return np.full(X.shape[0], model.base_score)
    return kernels.predict_margins(
        X,
        model.feature,
        model.threshold,
        model.left,
        model.right,
        model.value,
        model.is_leaf,
        model.tree_starts,
        model.params.learning_rate,
        model.base_score,
    )


def predict_proba(model, features):
    """sigmoid(base_score + lr * sum of tree outputs), clamped strictly
    inside (0, 1)."""
    return sigmoid(np.clip(predict_margin(model, features), -_MARGIN_CLIP, _MARGIN_CLIP))


def _tree_slices(model):
    starts = list(model.tree_starts)
    ends = starts[1:] + [len(model.feature)]
    return zip(starts, ends)


def count_parameters(model, full_shape=False):
    """2 parameters per split node + 1 per leaf.

    full_shape counts every tree at its maximal shape for the given depth
    (2^d - 1 splits, 2^d leaves), which is the accounting the model-size
    budget uses; the default counts the trees actually grown.
    """
    if model is None or model.n_trees == 0:
        return 0
    if full_shape:
        d = model.params.max_depth
        per_tree = 2 * (2**d - 1) + 2**d
        return model.n_trees * per_tree
    total = 0
    for lo, hi in _tree_slices(model):
        leaves = int(model.is_leaf[lo:hi].sum())
        splits = (hi - lo) - leaves
        total += 2 * splits + leaves
    return total


def full_shape_tree_parameters(max_depth):
    return 2 * (2**max_depth - 1) + 2**max_depth
