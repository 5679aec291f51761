"""Decision-tree evaluation of feature subsets.

A deliberately small CART: Gini impurity, exhaustive midpoint splits,
no depth limit, fully deterministic tie-breaking (lowest feature index,
then lowest threshold). Cross-validation is stratified with a seeded
shuffle so every run of a given seed produces the same folds.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import CanonError, EmptyInput

__all__ = [
    "SingleClass",
    "LengthMismatch",
    "LabeledFeatureMatrix",
    "DecisionTree",
    "fold_count",
    "make_folds",
    "tree_fit",
    "balanced_accuracy",
    "unbalanced_accuracy",
    "cross_validate",
    "sfs_top2",
    "total_balanced",
    "total_unbalanced",
]


class SingleClass(CanonError):
    """A labeled collection contains fewer than 2 distinct labels."""


class LengthMismatch(CanonError):
    """Rows and labels (or truth and prediction) differ in length."""


@dataclass(frozen=True)
class LabeledFeatureMatrix:
    """(n, d) float64 feature rows with one string label per row."""

    rows: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise ValueError("rows must be a 2-D array")
        labels = np.asarray([str(l) for l in np.asarray(self.labels).ravel()])
        if rows.shape[0] != labels.shape[0]:
            raise LengthMismatch(
                f"{rows.shape[0]} rows but {labels.shape[0]} labels"
            )
        if rows.shape[0] < 1:
            raise EmptyInput("need at least 1 row")
        if not np.isfinite(rows).all():
            raise ValueError("rows must be finite (impute markers first)")
        rows.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels", labels)

    @property
    def n_classes(self) -> int:
        return len(np.unique(self.labels))

    def subset(self, row_mask, feature_indices) -> "LabeledFeatureMatrix":
        return LabeledFeatureMatrix(
            rows=self.rows[np.ix_(np.flatnonzero(row_mask), feature_indices)],
            labels=self.labels[row_mask],
        )


def fold_count(matrix: LabeledFeatureMatrix) -> int:
    """min(10, max(2, size of smallest class)); SingleClass if < 2 classes."""
    _, counts = np.unique(matrix.labels, return_counts=True)
    if len(counts) < 2:
        raise SingleClass("need at least 2 distinct labels")
    return int(min(10, max(2, counts.min())))


def make_folds(labels: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Stratified fold assignment: per-class seeded shuffle, then a
    rolling counter spreads each class across folds (sizes differ by
    at most 1 per class)."""
    labels = np.asarray(labels)
    rng = np.random.Generator(np.random.PCG64(seed))
    fold_of = np.empty(len(labels), dtype=np.int64)
    counter = 0
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        perm = idx[rng.permutation(idx.size)]
        for j, i in enumerate(perm):
            fold_of[i] = (counter + j) % k
        counter += idx.size
    return fold_of


@dataclass
class _Node:
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None
    prediction: str | None = None


@dataclass
class DecisionTree:
    """Fitted CART; predict sends x[feature] <= threshold to the left."""

    classes: np.ndarray
    _root: _Node = field(repr=False)

    def predict(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.float64)
        out = np.empty(rows.shape[0], dtype=self.classes.dtype)
        for i in range(rows.shape[0]):
            node = self._root
            while node.prediction is None:
                node = (
                    node.left if rows[i, node.feature] <= node.threshold else node.right
                )
            out[i] = node.prediction
        return out

    def depth(self) -> int:
        def d(node):
            if node.prediction is not None:
                return 0
            return 1 + max(d(node.left), d(node.right))

        return d(self._root)


def _majority(labels: np.ndarray) -> str:
    classes, counts = np.unique(labels, return_counts=True)
    # np.unique sorts, so argmax resolves count ties to the smallest label
    return str(classes[np.argmax(counts)])


def _best_split(rows: np.ndarray, codes: np.ndarray, n_classes: int):
    """Exhaustive midpoint search; returns (impurity, feature, threshold)
    or None when no feature separates the rows."""
    n, d = rows.shape
    best = None
    for f in range(d):
        col = rows[:, f]
        order = np.argsort(col, kind="mergesort")
        cs = col[order]
        boundary = np.flatnonzero(cs[1:] != cs[:-1])
        if boundary.size == 0:
            continue
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), codes[order]] = 1.0
        cum = np.cumsum(onehot, axis=0)
        total = cum[-1]
        nl = (boundary + 1).astype(np.float64)
        nr = n - nl
        left = cum[boundary]
        right = total - left
        gini_l = 1.0 - ((left / nl[:, None]) ** 2).sum(axis=1)
        gini_r = 1.0 - ((right / nr[:, None]) ** 2).sum(axis=1)
        weighted = (nl * gini_l + nr * gini_r) / n
        b = int(np.argmin(weighted))  # first minimum → lowest threshold
        cand = float(weighted[b])
        if best is None or cand < best[0]:
            i = boundary[b]
            thr = float(0.5 * (cs[i] + cs[i + 1]))
            # adjacent floats: the midpoint can round onto the upper
            # value, which would send every row left; clamp down
            if thr >= cs[i + 1]:
                thr = float(cs[i])
            best = (cand, f, thr)
    return best


def _grow(rows: np.ndarray, labels: np.ndarray, codes: np.ndarray, n_classes: int):
    if (labels == labels[0]).all():
        return _Node(prediction=str(labels[0]))
    best = _best_split(rows, codes, n_classes)
    if best is None:
        return _Node(prediction=_majority(labels))
    _, f, thr = best
    mask = rows[:, f] <= thr
    if mask.all() or not mask.any():
        return _Node(prediction=_majority(labels))
    return _Node(
        feature=f,
        threshold=thr,
        left=_grow(rows[mask], labels[mask], codes[mask], n_classes),
        right=_grow(rows[~mask], labels[~mask], codes[~mask], n_classes),
    )


def tree_fit(matrix: LabeledFeatureMatrix) -> DecisionTree:
    """Grow an unpruned CART; splitting stops only on pure or
    unsplittable nodes. Zero-gain splits are allowed."""
    classes, codes = np.unique(matrix.labels, return_inverse=True)
    if len(classes) < 2:
        raise SingleClass("training data has a single label")
    root = _grow(matrix.rows, matrix.labels, codes, len(classes))
    return DecisionTree(classes=classes, _root=root)


def balanced_accuracy(truth, predicted) -> float:
    """Accuracy with each sample weighted by 1 / (its class count in truth)."""
    t = np.asarray([str(x) for x in np.asarray(truth).ravel()])
    p = np.asarray([str(x) for x in np.asarray(predicted).ravel()])
    if t.shape != p.shape:
        raise LengthMismatch("truth and prediction lengths differ")
    if t.size == 0:
        raise EmptyInput("no labels to score")
    _, inverse, counts = np.unique(t, return_inverse=True, return_counts=True)
    weights = 1.0 / counts[inverse]
    return float(weights[t == p].sum() / weights.sum())


def unbalanced_accuracy(truth, predicted) -> float:
    """Plain fraction of correct predictions."""
    t = np.asarray([str(x) for x in np.asarray(truth).ravel()])
    p = np.asarray([str(x) for x in np.asarray(predicted).ravel()])
    if t.shape != p.shape:
        raise LengthMismatch("truth and prediction lengths differ")
    if t.size == 0:
        raise EmptyInput("no labels to score")
    return float((t == p).mean())


def cross_validate(
    matrix: LabeledFeatureMatrix, feature_indices, seed: int
) -> tuple[float, list[float]]:
    """Stratified k-fold CV of a tree on the given feature columns;
    returns (mean balanced accuracy, per-fold accuracies)."""
    feature_indices = list(feature_indices)
    k = fold_count(matrix)
    fold_of = make_folds(matrix.labels, k, seed)
    per_fold = []
    for f in range(k):
        test = fold_of == f
        train = matrix.subset(~test, feature_indices)
        tree = tree_fit(train)
        pred = tree.predict(matrix.rows[np.ix_(np.flatnonzero(test), feature_indices)])
        per_fold.append(balanced_accuracy(matrix.labels[test], pred))
    return float(np.mean(per_fold)), per_fold


def sfs_top2(matrix: LabeledFeatureMatrix, seed: int) -> tuple[int, int, float]:
    """Greedy forward selection of the best single feature, then its best
    partner; fold assignment is fixed once so candidates are comparable.
    Returns (first index, second index, pair accuracy)."""
    d = matrix.rows.shape[1]
    if d < 2:
        raise EmptyInput("need at least 2 candidate features")
    best1, acc1 = -1, -np.inf
    for j in range(d):
        acc, _ = cross_validate(matrix, [j], seed)
        if acc > acc1:
            best1, acc1 = j, acc
    best2, acc2 = -1, -np.inf
    for j in range(d):
        if j == best1:
            continue
        acc, _ = cross_validate(matrix, [best1, j], seed)
        if acc > acc2:
            best2, acc2 = j, acc
    return best1, best2, float(acc2)


def total_balanced(per_task_fold_accuracies) -> float:
    """Mean over tasks of the mean over folds."""
    tasks = list(per_task_fold_accuracies)
    if not tasks:
        raise EmptyInput("no tasks")
    return float(np.mean([np.mean(folds) for folds in tasks]))


def total_unbalanced(per_task_accuracies) -> float:
    """Mean over tasks of a single per-task accuracy."""
    vals = list(per_task_accuracies)
    if not vals:
        raise EmptyInput("no tasks")
    return float(np.mean(vals))
