"""Gini decision trees and the bagging logic behind the random forest classifier.

Trees are grown greedily to purity (no depth limit by default), picking
at each node the best threshold on a random subset of features. Nodes
are stored in parallel arrays so trees serialize compactly.
"""

from __future__ import annotations

import numpy as np

from .corpus import NUM_CLASSES


class DecisionTree:
    """A fitted classification tree over labels 1..6.

    Node arrays: ``feature`` is -1 for leaves; samples with
    x[feature] < threshold go left. ``probs`` holds the class
    distribution at each leaf (zero rows for internal nodes).
    """

    def __init__(
        self,
        feature: np.ndarray,
        threshold: np.ndarray,
        left: np.ndarray,
        right: np.ndarray,
        probs: np.ndarray,
    ):
        self.feature = np.asarray(feature, dtype=np.int32)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int32)
        self.right = np.asarray(right, dtype=np.int32)
        self.probs = np.asarray(probs, dtype=np.float64)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def predict_probs(self, x: np.ndarray) -> np.ndarray:
        """Class distribution of the leaf that x falls into."""
        node = 0
        while self.feature[node] >= 0:
            if x[self.feature[node]] < self.threshold[node]:
                node = self.left[node]
            else:
                node = self.right[node]
        return self.probs[node]


def _best_split_for_feature(
    values: np.ndarray, labels: np.ndarray
) -> tuple[float, float] | None:
    """Lowest weighted Gini split on one feature, or None if constant.

    Returns (weighted_gini, threshold); ties keep the smallest threshold.
    """
    order = np.argsort(values, kind="stable")
    vs = values[order]
    n = len(vs)
    boundaries = np.nonzero(vs[1:] > vs[:-1])[0] + 1
    if boundaries.size == 0:
        return None

    one_hot = np.zeros((n, NUM_CLASSES), dtype=np.float64)
    one_hot[np.arange(n), labels[order] - 1] = 1.0
    cum = np.cumsum(one_hot, axis=0)
    total = cum[-1]

    n_left = boundaries.astype(np.float64)
    n_right = n - n_left
    left_counts = cum[boundaries - 1]
    right_counts = total - left_counts
    gini_left = 1.0 - np.sum((left_counts / n_left[:, None]) ** 2, axis=1)
    gini_right = 1.0 - np.sum((right_counts / n_right[:, None]) ** 2, axis=1)
    weighted = (n_left * gini_left + n_right * gini_right) / n

    best = int(np.argmin(weighted))
    k = boundaries[best]
    lo, hi = vs[k - 1], vs[k]
    thr = (lo + hi) / 2.0
    if not lo < thr:  # midpoint rounded down onto the left value
        thr = hi
    return float(weighted[best]), float(thr)


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    rng: np.random.Generator,
    max_features: int,
    max_depth: int | None = None,
) -> DecisionTree:
    """Fit one tree on (X, y) with labels in 1..6.

    At each node up to ``max_features`` non-constant features, chosen in
    a seeded random order, are evaluated; constant features do not count
    against the budget, so a split is found whenever any feature varies.
    """
    n_features = X.shape[1]
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    probs: list[np.ndarray] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        probs.append(np.zeros(NUM_CLASSES))
        return len(feature) - 1

    root = new_node()
    stack: list[tuple[int, np.ndarray, int]] = [(root, np.arange(len(y)), 0)]
    while stack:
        node, idx, depth = stack.pop()
        labels = y[idx]
        counts = np.bincount(labels, minlength=NUM_CLASSES + 1)[1:].astype(np.float64)
        is_pure = np.count_nonzero(counts) <= 1
        if is_pure or len(idx) < 2 or (max_depth is not None and depth >= max_depth):
            probs[node] = counts / counts.sum()
            continue

        best: tuple[float, int, float] | None = None
        useful = 0
        for f in rng.permutation(n_features):
            candidate = _best_split_for_feature(X[idx, f], labels)
            if candidate is None:
                continue
            useful += 1
            gini, thr = candidate
            if best is None or gini < best[0]:
                best = (gini, int(f), thr)
            if useful >= max_features:
                break
        if best is None:  # every feature constant within the node
            probs[node] = counts / counts.sum()
            continue

        _, f, thr = best
        goes_left = X[idx, f] < thr
        feature[node] = f
        threshold[node] = thr
        left_child = new_node()
        right_child = new_node()
        left[node] = left_child
        right[node] = right_child
        stack.append((right_child, idx[~goes_left], depth + 1))
        stack.append((left_child, idx[goes_left], depth + 1))

    return DecisionTree(
        np.array(feature, dtype=np.int32),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int32),
        np.array(right, dtype=np.int32),
        np.vstack(probs),
    )


def grow_forest(
    X: np.ndarray,
    y: np.ndarray,
    n_trees: int,
    max_features: int,
    seed: int,
    bootstrap: bool = True,
    max_depth: int | None = None,
) -> list[DecisionTree]:
    """Fit ``n_trees`` trees, each from its own RNG stream derived from seed.

    Streams are spawned independently per tree, so results do not depend
    on construction order or parallelism.
    """
    seeds = np.random.SeedSequence(seed).spawn(n_trees)
    trees = []
    n = len(y)
    for tree_seed in seeds:
        rng = np.random.default_rng(tree_seed)
        if bootstrap:
            idx = rng.integers(0, n, size=n)
        else:
            idx = np.arange(n)
        trees.append(grow_tree(X[idx], y[idx], rng, max_features, max_depth))
    return trees
