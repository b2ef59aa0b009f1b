from __future__ import annotations

import math

import numpy as np

from . import _tree_kernels as K
from .base import LearnerKind, LearnerSpec, TrainedModel


def tree_seeds(seed: int, n: int) -> np.ndarray:
    """Seeds of the first ``n`` trees grown under ``seed``; a lone tree uses the first."""
    return np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF).generate_state(n).astype(np.int64)


def min_split_rows(fraction: float, n_rows: int) -> int:
    """Rows a node needs before it may split: ``ceil(fraction * n_rows)``, never below 2."""
    return max(2, int(math.ceil(fraction * n_rows)))


class _Tree:
    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self, X, y, weights, min_split, max_features, criterion, random_splitter, seed):
        (self.feature, self.threshold, self.left, self.right, self.value) = K.build_tree(
            X, y, weights, min_split, max_features,
            K.ENTROPY if criterion == "entropy" else K.GINI,
            random_splitter, seed,
        )

    def proba(self, X):
        return K.predict_tree(X, self.feature, self.threshold, self.left, self.right, self.value)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=int)
        for node in range(self.n_nodes):
            for child in (self.left[node], self.right[node]):
                if child >= 0:
                    depth[child] = depth[node] + 1
        return int(depth.max())


class DecisionTree(TrainedModel):
    def __init__(self, spec: LearnerSpec, X: np.ndarray, y: np.ndarray, seed: int):
        self.spec = spec
        self.training_feature_count = X.shape[1]
        p = spec.params
        self.tree = _Tree(
            np.ascontiguousarray(X, dtype=np.float64),
            y.astype(np.int64),
            np.ones(X.shape[0], dtype=np.int64),
            min_split_rows(p["min_samples_split"], X.shape[0]),
            X.shape[1],
            p["criterion"],
            p["splitter"] == "random",
            int(tree_seeds(seed, 1)[0]),
        )

    def _proba(self, X):
        return self.tree.proba(np.ascontiguousarray(X))


class RandomForest(TrainedModel):
    """Bagged CART trees with ``sqrt(n_features)`` candidates per split.

    ``bootstrap`` and ``max_features`` are not tuned; they exist so a one-tree,
    all-features, no-bootstrap forest can be checked against a lone tree.
    """

    def __init__(self, spec: LearnerSpec, X, y, seed: int, bootstrap: bool = True, max_features: int | None = None):
        self.spec = spec
        n, f = X.shape
        self.training_feature_count = f
        p = spec.params
        X = np.ascontiguousarray(X, dtype=np.float64)
        yi = y.astype(np.int64)
        mf = max_features if max_features is not None else max(1, int(math.sqrt(f)))
        self.arrays = K.build_forest(
            X, yi, tree_seeds(seed, p["n_estimators"]), bootstrap,
            min_split_rows(p["min_samples_split"], n), mf,
            K.ENTROPY if p["criterion"] == "entropy" else K.GINI,
        )

    @property
    def n_trees(self) -> int:
        return len(self.arrays[-1]) - 1

    def _proba(self, X):
        return K.predict_forest(np.ascontiguousarray(X), *self.arrays)


def fit_tree(spec: LearnerSpec, X, y, seed):
    if spec.kind is LearnerKind.DECISION_TREE:
        return DecisionTree(spec, X, y, seed)
    return RandomForest(spec, X, y, seed)
