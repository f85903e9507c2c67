"""Random Forest over shapelet-distance features.

Trees are CART classifiers grown on bootstrap samples with Gini impurity and
a random feature subset at each node. The forest prediction is the mean of the
trees' leaf class-probability vectors.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .core import ClassLabel, TransformMatrix
from .errors import EmptyMatrix, InvalidArgs, FeatureLengthMismatch, ParseError, SingleClassTrainingSet

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 500
    max_features_per_split: int | None = None  # floor(sqrt(r)) when None
    min_samples_leaf: int = 1
    max_depth: int | None = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise InvalidArgs("n_trees must be >= 1")
        if self.max_features_per_split is not None and self.max_features_per_split < 1:
            raise InvalidArgs("max_features_per_split must be >= 1")
        if self.min_samples_leaf < 1:
            raise InvalidArgs("min_samples_leaf must be >= 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise InvalidArgs("max_depth must be >= 0")

    def features_for(self, n_features: int) -> int:
        if self.max_features_per_split is None:
            return max(1, int(math.isqrt(n_features)))
        if self.max_features_per_split > n_features:
            raise InvalidArgs(
                f"max_features_per_split {self.max_features_per_split} exceeds {n_features} features"
            )
        return self.max_features_per_split


@dataclass(eq=False)
class DecisionTree:
    """Flat array form; ``feature[k] == -1`` marks a leaf.

    Samples with ``x[feature] <= threshold`` go to ``left``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # (n_nodes, n_classes) leaf probabilities

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row of *X*."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        active = self.feature[node] >= 0
        while active.any():
            r = rows[active]
            k = node[r]
            go_left = X[r, self.feature[k]] <= self.threshold[k]
            node[r] = np.where(go_left, self.left[k], self.right[k])
            active = self.feature[node] >= 0
        return node

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_record(self, k: int = 0) -> dict:
        stack = [(k, None, None)]
        root = None
        while stack:
            node, parent, side = stack.pop()
            if self.feature[node] < 0:
                rec = {"probabilities": [float(p) for p in self.value[node]]}
            else:
                rec = {"feature": int(self.feature[node]), "threshold": float(self.threshold[node])}
                stack.append((int(self.right[node]), rec, "right"))
                stack.append((int(self.left[node]), rec, "left"))
            if parent is None:
                root = rec
            else:
                parent[side] = rec
        return root

    @classmethod
    def from_record(cls, record: dict, n_classes: int) -> "DecisionTree":
        feature, threshold, left, right, value = [], [], [], [], []
        stack = [(record, None, None)]
        while stack:
            rec, parent, side = stack.pop()
            k = len(feature)
            if parent is not None:
                (left if side == "left" else right)[parent] = k
            left.append(-1)
            right.append(-1)
            if "probabilities" in rec:
                probs = [float(p) for p in rec["probabilities"]]
                if len(probs) != n_classes:
                    raise ParseError("leaf probability vector has the wrong length")
                feature.append(-1)
                threshold.append(0.0)
                value.append(probs)
            else:
                feature.append(int(rec["feature"]))
                threshold.append(float(rec["threshold"]))
                value.append([0.0] * n_classes)
                stack.append((rec["right"], k, "right"))
                stack.append((rec["left"], k, "left"))
        return cls(
            np.array(feature, dtype=np.int64),
            np.array(threshold, dtype=np.float64),
            np.array(left, dtype=np.int64),
            np.array(right, dtype=np.int64),
            np.array(value, dtype=np.float64).reshape(len(feature), n_classes),
        )


def _best_split(Xn, yn, feats, n_classes, min_leaf):
    """Best Gini split over *feats*; returns ``(score, feature, threshold)`` or None."""
    n = Xn.shape[0]
    sub = Xn[:, feats]
    order = np.argsort(sub, axis=0, kind="stable")
    vals = np.take_along_axis(sub, order, axis=0)
    ys = yn[order]  # (n, f)
    onehot = np.zeros((n, len(feats), n_classes))
    np.put_along_axis(onehot, ys[:, :, None], 1.0, axis=2)
    left = np.cumsum(onehot, axis=0)[:-1]  # split after p = 1..n-1 samples
    total = left[-1] + onehot[-1]
    right = total[None] - left
    p = np.arange(1, n, dtype=np.float64)[:, None]
    gini_l = 1.0 - np.sum(left * left, axis=2) / (p * p)
    gini_r = 1.0 - np.sum(right * right, axis=2) / ((n - p) * (n - p))
    score = (p * gini_l + (n - p) * gini_r) / n
    valid = vals[1:] > vals[:-1]
    if min_leaf > 1:
        pi = np.arange(1, n)
        valid &= ((pi >= min_leaf) & (n - pi >= min_leaf))[:, None]
    if not valid.any():
        return None
    score = np.where(valid, score, np.inf)
    # column-major flatten: first feature in draw order wins ties
    flat = int(np.argmin(score.T))
    j, pos = divmod(flat, n - 1)
    lo, hi = vals[pos, j], vals[pos + 1, j]
    thr = 0.5 * (lo + hi)
    if thr >= hi:  # adjacent floats: keep the split between them
        thr = lo
    return float(score[pos, j]), int(feats[j]), float(thr)


def _grow_tree(X, y, n_classes, cfg: ForestConfig, tree_index: int) -> DecisionTree:
    rng = np.random.default_rng([cfg.rng_seed, tree_index])
    n, r = X.shape
    boot = rng.integers(0, n, size=n)
    Xb, yb = X[boot], y[boot]
    mf = cfg.features_for(r)

    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(idx):
        counts = np.bincount(yb[idx], minlength=n_classes).astype(np.float64)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(counts / counts.sum())
        return len(feature) - 1, counts

    root, counts = new_node(np.arange(n))
    stack = [(root, np.arange(n), 0, counts)]
    while stack:
        k, idx, depth, counts = stack.pop()
        if (
            np.count_nonzero(counts) <= 1
            or idx.shape[0] < 2 * cfg.min_samples_leaf
            or (cfg.max_depth is not None and depth >= cfg.max_depth)
        ):
            continue
        perm = rng.permutation(r)
        Xn, yn = Xb[idx], yb[idx]
        split = None
        # keep drawing features until a usable split exists
        for lo in range(0, r, mf):
            split = _best_split(Xn, yn, perm[lo:lo + mf], n_classes, cfg.min_samples_leaf)
            if split is not None:
                break
        if split is None:
            continue
        _, f, thr = split
        mask = Xn[:, f] <= thr
        feature[k] = f
        threshold[k] = thr
        li, lc = new_node(idx[mask])
        ri, rc = new_node(idx[~mask])
        left[k], right[k] = li, ri
        value[k] = np.zeros(n_classes)
        stack.append((ri, idx[~mask], depth + 1, rc))
        stack.append((li, idx[mask], depth + 1, lc))

    return DecisionTree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(value, dtype=np.float64),
    )


@dataclass(eq=False)
class ForestModel:
    trees: list
    classes: tuple  # ClassLabel, ascending id
    config: ForestConfig
    n_features: int
    feature_ids: tuple = ()

    def predict_proba(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_features:
            raise FeatureLengthMismatch(
                f"model expects {self.n_features} features, got {X.shape[1]}"
            )
        total = np.zeros((X.shape[0], len(self.classes)))
        for tree in self.trees:
            total += tree.predict_proba(X)
        return total / len(self.trees)

    def predict_labels(self, X) -> list:
        proba = self.predict_proba(X)
        # argmax takes the first maximum, i.e. the lowest class id
        return [self.classes[i] for i in np.argmax(proba, axis=1)]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "random_forest",
            "classes": [int(c) for c in self.classes],
            "n_features": self.n_features,
            "feature_ids": list(self.feature_ids),
            "config": asdict(self.config),
            "trees": [t.to_record() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ForestModel":
        version = doc.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ParseError(f"unsupported model schema version {version!r}")
        try:
            classes = tuple(ClassLabel(int(c)) for c in doc["classes"])
            trees = [DecisionTree.from_record(t, len(classes)) for t in doc["trees"]]
            return cls(
                trees=trees,
                classes=classes,
                config=ForestConfig(**doc["config"]),
                n_features=int(doc["n_features"]),
                feature_ids=tuple(doc.get("feature_ids", ())),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"malformed model document: {exc}") from exc


def train_forest(matrix: TransformMatrix, cfg: ForestConfig | None = None, workers=1) -> ForestModel:
    """Grow ``cfg.n_trees`` trees on bootstrap samples of the matrix rows.

    Tree *i* draws all its randomness from ``default_rng([seed, i])``, so
    the model does not depend on *workers*.

    Raises
    ------
    EmptyMatrix, SingleClassTrainingSet
    """
    cfg = cfg or ForestConfig()
    X = np.ascontiguousarray(matrix.values, dtype=np.float64)
    if X.shape[0] == 0 or X.shape[1] == 0:
        raise EmptyMatrix("transform matrix has no rows or no columns")
    classes = tuple(sorted(set(matrix.labels)))
    if X.shape[0] < 2 or len(classes) < 2:
        raise SingleClassTrainingSet("training needs at least two rows and two classes")
    cfg.features_for(X.shape[1])
    code = {c: i for i, c in enumerate(classes)}
    y = np.array([code[lab] for lab in matrix.labels], dtype=np.int64)

    def grow(i):
        return _grow_tree(X, y, len(classes), cfg, i)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            trees = list(pool.map(grow, range(cfg.n_trees)))
    else:
        trees = [grow(i) for i in range(cfg.n_trees)]
    return ForestModel(trees, classes, cfg, X.shape[1], tuple(matrix.feature_ids))


def predict(model: ForestModel, features) -> tuple[ClassLabel, np.ndarray]:
    """Label and mean class-probability vector for one feature vector."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 1:
        raise FeatureLengthMismatch("predict expects a single feature vector")
    proba = model.predict_proba(x)[0]
    return model.classes[int(np.argmax(proba))], proba
