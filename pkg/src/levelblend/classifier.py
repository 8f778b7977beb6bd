"""Random-forest segment classifiers and label-match bookkeeping.

The forest follows the usual defaults: 100 bootstrapped trees grown to purity
with Gini impurity and sqrt(n_features) candidate features per split. Class
probabilities are averaged over trees and ties go to the lowest class index.
Features are the flattened one-hot tile grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Hashable, Sequence

import numpy as np

from .archive import read_archive, write_archive
from .corpus import ALL_LABELS, Corpus, DirectionalLabel, TileGrid
from .errors import AnnotationError


class MatchKind(str, Enum):
    EXACT = "exact"
    ADMISSIBLE = "admissible"
    NONE = "none"


def match(predicted: Sequence[int], conditioned: Sequence[int]) -> MatchKind:
    """Exact if equal; admissible if every open bit of ``conditioned`` is open in ``predicted``."""
    p = tuple(int(b) for b in predicted)
    c = tuple(int(b) for b in conditioned)
    if p == c:
        return MatchKind.EXACT
    if all(pb >= cb for pb, cb in zip(p, c)):
        return MatchKind.ADMISSIBLE
    return MatchKind.NONE


def is_admissible(kind: MatchKind) -> bool:
    return kind is not MatchKind.NONE


def in_out_split(labels) -> tuple[list[DirectionalLabel], list[DirectionalLabel]]:
    """IN = directional labels present in the training data, OUT = the rest of the 16."""
    if isinstance(labels, Corpus):
        labels = labels.labels
    present = {DirectionalLabel(*l) for l in labels if l is not None}
    return [l for l in ALL_LABELS if l in present], [l for l in ALL_LABELS if l not in present]


def one_hot_features(grids: Sequence[TileGrid] | np.ndarray, vocabulary: str) -> np.ndarray:
    """(N, cells * |vocabulary|) uint8 one-hot rows. Accepts grids or index arrays."""
    if isinstance(grids, np.ndarray):
        idx = grids.reshape(len(grids), -1)
    else:
        idx = np.array([g.indices(vocabulary).ravel() for g in grids], dtype=np.int64)
        idx = idx.reshape(len(grids), -1)
    v = len(vocabulary)
    out = np.zeros((idx.shape[0], idx.shape[1] * v), dtype=np.uint8)
    cols = np.arange(idx.shape[1]) * v + idx
    out[np.arange(idx.shape[0])[:, None], cols] = 1
    return out


@dataclass
class Tree:
    feature: np.ndarray    # -1 at leaves
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray      # (nodes, n_classes) class fractions

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            idx = np.nonzero(active)[0]
            n = node[idx]
            go_left = X[idx, self.feature[n]] <= self.threshold[n]
            node[idx] = np.where(go_left, self.left[n], self.right[n])
            active[idx] = self.feature[node[idx]] >= 0
        return node

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]


def _split_scan_order(Xs: np.ndarray, rng: np.random.Generator, max_features: int) -> np.ndarray:
    """Features whose splits get evaluated at one node.

    Features are drawn in random order. The first ``max_features`` draws are
    examined and the non-constant ones kept; constant features use up draws.
    When every draw was constant, drawing continues until the first
    non-constant feature.
    """
    nonconst = Xs.min(axis=0) != Xs.max(axis=0)
    order = rng.permutation(Xs.shape[1])
    usable = nonconst[order]
    head = order[:max_features][usable[:max_features]]
    if len(head) or not usable.any():
        return head
    return order[np.argmax(usable)][None]


def _best_split_binary(Xs, y_onehot, features):
    n = len(Xs)
    parent = y_onehot.sum(axis=0)
    right = Xs[:, features].T.astype(np.float64) @ y_onehot  # (f, k) counts where x == 1
    left = parent - right
    nr = right.sum(axis=1)
    nl = n - nr
    gini_l = 1.0 - np.sum(left ** 2, axis=1) / nl ** 2
    gini_r = 1.0 - np.sum(right ** 2, axis=1) / nr ** 2
    impurity = (nl * gini_l + nr * gini_r) / n
    i = int(np.argmin(impurity))
    return int(features[i]), 0.5


def _best_split_general(Xs, y_onehot, features):
    n = len(Xs)
    parent = y_onehot.sum(axis=0)
    best = (np.inf, -1, 0.0)
    nl = np.arange(1, n, dtype=np.float64)
    nr = n - nl
    for f in features:
        col = Xs[:, f]
        order = np.argsort(col, kind="stable")
        xs = col[order]
        left = np.cumsum(y_onehot[order], axis=0)[:-1]
        right = parent - left
        gini_l = 1.0 - np.sum((left / nl[:, None]) ** 2, axis=1)
        gini_r = 1.0 - np.sum((right / nr[:, None]) ** 2, axis=1)
        impurity = np.where(xs[:-1] < xs[1:], (nl * gini_l + nr * gini_r) / n, np.inf)
        i = int(np.argmin(impurity))
        if impurity[i] < best[0] or best[1] < 0:
            best = (float(impurity[i]), int(f), 0.5 * (float(xs[i]) + float(xs[i + 1])))
    return best[1], best[2]


def build_tree(X: np.ndarray, y: np.ndarray, n_classes: int, max_features: int, rng: np.random.Generator) -> Tree:
    """Grow one tree until every leaf is pure or has no non-constant feature.

    The best split among the examined features is taken even when it does not
    lower the impurity.
    """
    binary = X.dtype == np.uint8 or bool(np.all((X == 0) | (X == 1)))
    feature, threshold, left, right, value = [], [], [], [], []
    eye = np.eye(n_classes)

    def new_node(samples):
        counts = np.bincount(y[samples], minlength=n_classes).astype(np.float64)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(counts / counts.sum())
        return len(feature) - 1

    root = new_node(np.arange(len(y)))
    stack = [(root, np.arange(len(y)))]
    while stack:
        node, samples = stack.pop()
        ys = y[samples]
        if len(samples) < 2 or np.all(ys == ys[0]):
            continue
        Xs = X[samples]
        features = _split_scan_order(Xs, rng, max_features)
        if not len(features):
            continue
        splitter = _best_split_binary if binary else _best_split_general
        f, t = splitter(Xs, eye[ys], features)
        if f < 0:
            continue
        mask = Xs[:, f] <= t
        feature[node] = f
        threshold[node] = t
        l_node = new_node(samples[mask])
        r_node = new_node(samples[~mask])
        left[node], right[node] = l_node, r_node
        stack.append((r_node, samples[~mask]))
        stack.append((l_node, samples[mask]))
    return Tree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(value, dtype=np.float64),
    )


@dataclass
class Forest:
    trees: list[Tree]
    classes: list[Hashable]
    n_features: int

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X)
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        total = np.zeros((len(X), len(self.classes)))
        for tree in self.trees:
            total += tree.predict_proba(X)
        return total / len(self.trees)

    def predict_index(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def predict(self, X: np.ndarray) -> list:
        return [self.classes[i] for i in self.predict_index(X)]


def _class_key(c) -> str:
    return ",".join(map(str, c)) if isinstance(c, tuple) else str(c)


def train_forest(
    X: np.ndarray,
    labels: Sequence[Hashable],
    n_trees: int = 100,
    rng: np.random.Generator | None = None,
    max_features: int | None = None,
) -> Forest:
    """Fit a bootstrap forest. Classes are ordered by sorted key for determinism."""
    rng = rng if rng is not None else np.random.default_rng()
    X = np.asarray(X)
    labels = [tuple(l) if isinstance(l, (list, DirectionalLabel)) else l for l in labels]
    classes = sorted(set(labels), key=_class_key)
    if len(classes) < 2:
        raise ValueError("a forest needs at least two distinct class labels")
    index = {c: i for i, c in enumerate(classes)}
    y = np.array([index[l] for l in labels], dtype=np.int64)
    n, d = X.shape
    mf = max_features or max(1, int(math.sqrt(d)))
    trees = []
    for seq in np.random.SeedSequence(int(rng.integers(0, 2 ** 63 - 1))).spawn(n_trees):
        tree_rng = np.random.default_rng(seq)
        boot = tree_rng.integers(0, n, size=n)
        trees.append(build_tree(X[boot], y[boot], len(classes), mf, tree_rng))
    return Forest(trees, classes, d)


def stratified_folds(labels: Sequence[Hashable], k: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Deal each class's shuffled members round-robin over ``k`` folds."""
    folds: list[list[int]] = [[] for _ in range(k)]
    by_class: dict = {}
    for i, l in enumerate(labels):
        by_class.setdefault(l, []).append(i)
    offset = 0
    for key in sorted(by_class, key=_class_key):
        members = np.array(by_class[key])[rng.permutation(len(by_class[key]))]
        for j, m in enumerate(members):
            folds[(offset + j) % k].append(int(m))
        offset += len(members)
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


def cross_validate(
    X: np.ndarray,
    labels: Sequence[Hashable],
    k: int = 10,
    rng: np.random.Generator | None = None,
    n_trees: int = 100,
) -> float:
    """Mean held-out accuracy over ``k`` stratified folds."""
    rng = rng if rng is not None else np.random.default_rng()
    if k < 2:
        raise ValueError("cross-validation needs k >= 2")
    labels = [tuple(l) if isinstance(l, (list, DirectionalLabel)) else l for l in labels]
    if k > len(labels):
        raise ValueError(f"k={k} exceeds the {len(labels)} samples")
    X = np.asarray(X)
    accs = []
    for fold in stratified_folds(labels, k, rng):
        if not len(fold):
            continue
        train_mask = np.ones(len(labels), dtype=bool)
        train_mask[fold] = False
        train_idx = np.nonzero(train_mask)[0]
        forest = train_forest(X[train_idx], [labels[i] for i in train_idx], n_trees, rng)
        pred = forest.predict(X[fold])
        accs.append(float(np.mean([p == labels[i] for p, i in zip(pred, fold)])))
    return float(np.mean(accs))


# --- persistence --------------------------------------------------------------

def save_forest(forest: Forest, path) -> None:
    classes = [list(c) if isinstance(c, tuple) else c for c in forest.classes]
    meta = {"format": "levelblend-forest", "n_features": forest.n_features, "classes": classes,
            "n_trees": forest.n_trees}
    arrays = {}
    for i, t in enumerate(forest.trees):
        for name in ("feature", "threshold", "left", "right", "value"):
            arrays[f"tree{i:04d}/{name}"] = getattr(t, name)
    write_archive(path, meta, arrays)


def load_forest(path) -> Forest:
    meta, arrays = read_archive(path)
    if meta.get("format") != "levelblend-forest":
        raise AnnotationError(f"{path} is not a forest file")
    trees = [
        Tree(*(arrays[f"tree{i:04d}/{name}"] for name in ("feature", "threshold", "left", "right", "value")))
        for i in range(meta["n_trees"])
    ]
    classes = [tuple(c) if isinstance(c, list) else c for c in meta["classes"]]
    return Forest(trees, classes, int(meta["n_features"]))
