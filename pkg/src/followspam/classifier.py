"""Decision trees, random forests and information-gain feature ranking.

Labels are binary throughout: 1 is spammer, 0 is legitimate. Splits are
binary on one continuous column, ``x <= threshold`` going left, chosen by
information gain (base 2) over midpoints between consecutive distinct values.

Tree growth runs in a numba kernel. :func:`info_gain` and :func:`best_split`
are the plain numpy reference for the same rule and are used for ranking.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numba
import numpy as np

from .metrics import ConfusionMatrix, confusion

# Gains at or below this are treated as zero; guards against rounding noise
# when a split leaves class proportions unchanged.
MIN_GAIN = 1e-12
NO_SPLIT = float("nan")  # sentinel threshold when a column cannot be split

MODEL_FORMAT = "followspam-model"
MODEL_VERSION = 1


class ModelError(ValueError):
    pass


def as_labels(labels) -> np.ndarray:
    """Coerce labels to a 0/1 int array. Accepts 0/1, bools or spam/legit strings."""
    arr = np.asarray(labels)
    if arr.dtype.kind in "US":
        bad = ~np.isin(arr, ("spam", "legit"))
        if bad.any():
            raise ValueError(f"unknown label {arr[bad][0]!r}")
        return (arr == "spam").astype(np.int64)
    arr = arr.astype(np.int64)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("labels must be binary")
    return arr


def entropy(counts) -> float:
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def info_gain(column, labels, threshold: float) -> float:
    """Entropy of ``labels`` minus the weighted entropy after splitting
    ``column`` at ``threshold``."""
    column = np.asarray(column, dtype=np.float64)
    y = as_labels(labels)
    if column.shape != y.shape:
        raise ValueError(f"column has {column.size} values but there are {y.size} labels")
    n = y.size
    if n == 0:
        return 0.0
    left = column <= threshold
    parent = entropy(np.bincount(y, minlength=2))
    cond = 0.0
    for side in (left, ~left):
        m = int(side.sum())
        if m:
            cond += m / n * entropy(np.bincount(y[side], minlength=2))
    return max(parent - cond, 0.0)


def _midpoint(a: float, b: float) -> float:
    t = a + (b - a) / 2.0
    # adjacent floats: keep a so that a goes left and b goes right
    return a if t >= b else t


def best_split(column, labels, min_leaf: int = 1) -> tuple[float, float]:
    """Best single threshold on ``column`` as ``(threshold, gain)``.

    Candidates are midpoints between consecutive distinct values; ties in
    gain go to the smaller threshold. A column with one distinct value (or
    no candidate leaving ``min_leaf`` rows per side) returns ``(nan, 0.0)``.
    """
    x = np.asarray(column, dtype=np.float64)
    y = as_labels(labels)
    if x.shape != y.shape:
        raise ValueError("column and labels differ in length")
    if x.size < 2:
        raise ValueError("best_split needs at least 2 rows")
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    n = len(xs)
    pos_left = np.cumsum(ys)[:-1]  # spammers among the first i+1 rows
    n_left = np.arange(1, n)
    valid = (xs[1:] > xs[:-1]) & (n_left >= min_leaf) & (n - n_left >= min_leaf)
    if not valid.any():
        return NO_SPLIT, 0.0
    neg, pos = n - int(ys.sum()), int(ys.sum())
    gains = _split_gains(neg, pos, n_left - pos_left, pos_left)
    gains[~valid] = -1.0
    i = int(np.argmax(gains))  # first maximum: smallest threshold
    gain = float(gains[i]) if gains[i] > MIN_GAIN else 0.0
    return _midpoint(xs[i], xs[i + 1]), gain


def _entropy2(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        pa, pb = a / n, b / n
        h = -(np.where(a > 0, pa * np.log2(pa), 0.0) + np.where(b > 0, pb * np.log2(pb), 0.0))
    return np.where(n > 0, h, 0.0)


def _split_gains(neg, pos, left_neg, left_pos) -> np.ndarray:
    n = neg + pos
    nl = left_neg + left_pos
    return (_entropy2(neg, pos) - nl / n * _entropy2(left_neg, left_pos)
            - (n - nl) / n * _entropy2(neg - left_neg, pos - left_pos))


def rank_features(X, labels, columns) -> list[tuple[str, float]]:
    """Columns ordered by the gain of their best single split, highest first.

    Equal gains keep the schema order.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != len(columns):
        raise ValueError("feature matrix does not match the column list")
    if X.shape[0] < 2:
        raise ValueError("ranking needs at least 2 rows")
    gains = [best_split(X[:, j], labels)[1] for j in range(X.shape[1])]
    order = sorted(range(len(columns)), key=lambda j: -gains[j])
    return [(columns[j], gains[j]) for j in order]


# --------------------------------------------------------------------------
# tree growth kernel

@numba.njit(cache=True)
def _h2(a, b):
    n = a + b
    if a == 0 or b == 0:
        return 0.0
    pa = a / n
    pb = b / n
    return -(pa * np.log2(pa) + pb * np.log2(pb))


@numba.njit(cache=True)
def _grow(X, y, rows, min_leaf, max_depth, n_sub, seed):
    """Grow one tree on ``X[rows]``.

    Node arrays: feature (-1 for a leaf), threshold, left, right and the
    (legit, spam) counts reaching the node. ``n_sub`` features are drawn per
    split with numba's generator seeded by ``seed``; ``n_sub >= F`` uses every
    column and draws nothing.
    """
    n_feat = X.shape[1]
    idx = rows.copy()
    cap = 2 * len(idx) + 1
    feature = np.full(cap, -1, np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    counts = np.zeros((cap, 2), np.int64)
    if n_sub < n_feat:
        np.random.seed(seed)
    all_feats = np.arange(n_feat)

    # stack of (node, start, end, depth)
    stack = np.zeros((cap, 4), np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = len(idx)
    top = 1
    n_nodes = 1
    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]
        m = end - start
        pos = 0
        for r in range(start, end):
            pos += y[idx[r]]
        neg = m - pos
        counts[node, 0] = neg
        counts[node, 1] = pos
        if pos == 0 or neg == 0 or m < 2 * min_leaf or (max_depth >= 0 and depth >= max_depth):
            continue

        if n_sub < n_feat:
            feats = np.sort(np.random.permutation(n_feat)[:n_sub])
        else:
            feats = all_feats
        parent = _h2(neg, pos)
        best_gain = MIN_GAIN
        best_f = -1
        best_t = 0.0
        vals = np.empty(m)
        labs = np.empty(m, np.int64)
        for f in feats:
            for r in range(m):
                vals[r] = X[idx[start + r], f]
            order = np.argsort(vals)
            lp = 0
            for r in range(m):
                labs[r] = y[idx[start + order[r]]]
            for r in range(m - 1):
                lp += labs[r]
                nl = r + 1
                if nl < min_leaf:
                    continue
                if m - nl < min_leaf:
                    break
                a = vals[order[r]]
                b = vals[order[r + 1]]
                if not b > a:
                    continue
                ln = nl - lp
                gain = parent - nl / m * _h2(ln, lp) - (m - nl) / m * _h2(neg - ln, pos - lp)
                if gain > best_gain:
                    best_gain = gain
                    best_f = f
                    t = a + (b - a) / 2.0
                    best_t = a if t >= b else t
        if best_f < 0:
            continue

        # partition idx[start:end] in place, left block first
        i = start
        j = end - 1
        while i <= j:
            if X[idx[i], best_f] <= best_t:
                i += 1
            else:
                tmp = idx[i]
                idx[i] = idx[j]
                idx[j] = tmp
                j -= 1
        feature[node] = best_f
        threshold[node] = best_t
        lc = n_nodes
        rc = n_nodes + 1
        n_nodes += 2
        left[node] = lc
        right[node] = rc
        stack[top, 0] = rc
        stack[top, 1] = i
        stack[top, 2] = end
        stack[top, 3] = depth + 1
        stack[top + 1, 0] = lc
        stack[top + 1, 1] = start
        stack[top + 1, 2] = i
        stack[top + 1, 3] = depth + 1
        top += 2
    return (feature[:n_nodes], threshold[:n_nodes], left[:n_nodes],
            right[:n_nodes], counts[:n_nodes])


@numba.njit(cache=True)
def _leaf_proba(X, feature, threshold, left, right, counts):
    out = np.empty(X.shape[0])
    for i in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = counts[node, 1] / (counts[node, 0] + counts[node, 1])
    return out


# --------------------------------------------------------------------------
# models

def _check_xy(X, y):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("feature matrix must be 2-D")
    if X.shape[0] == 0:
        raise ValueError("no training rows")
    if not np.all(np.isfinite(X)):
        raise ValueError("feature matrix contains non-finite values")
    y = as_labels(y)
    if y.shape != (X.shape[0],):
        raise ValueError("labels do not match the number of rows")
    return X, y


def _check_rows(X, n_features):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != n_features:
        raise ModelError(f"rows have {X.shape[1]} features, model expects {n_features}")
    return X


@dataclass(frozen=True)
class DecisionTree:
    feature: np.ndarray    # split column, -1 at leaves
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray     # (nodes, 2): legitimate and spammer rows reaching the node
    n_features: int
    min_leaf: int = 2
    max_depth: int | None = None

    @property
    def node_count(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        d = np.zeros(self.node_count, dtype=np.int64)
        for i in range(self.node_count):
            if self.feature[i] >= 0:
                d[self.left[i]] = d[self.right[i]] = d[i] + 1
        return int(d.max())

    def predict_proba(self, X) -> np.ndarray:
        X = _check_rows(X, self.n_features)
        return _leaf_proba(X, self.feature, self.threshold, self.left, self.right, self.counts)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)

    def to_dict(self) -> dict:
        nodes = [[int(f), float(t), int(l), int(r), int(c[0]), int(c[1])]
                 for f, t, l, r, c in zip(self.feature, self.threshold, self.left, self.right, self.counts)]
        return {"min_leaf": self.min_leaf, "max_depth": self.max_depth, "nodes": nodes}

    @classmethod
    def from_dict(cls, d: dict, n_features: int) -> "DecisionTree":
        nodes = d["nodes"]
        if not nodes:
            raise ModelError("tree without nodes")
        f, t, l, r, neg, pos = (np.array(col) for col in zip(*nodes))
        n = len(nodes)
        inner = f >= 0
        if (f >= n_features).any() or not np.isfinite(t).all():
            raise ModelError("tree node refers to a missing column or has a bad threshold")
        if ((l[inner] <= 0) | (l[inner] >= n) | (r[inner] <= 0) | (r[inner] >= n)).any():
            raise ModelError("tree node child out of range")
        if ((neg + pos)[~inner] <= 0).any():
            raise ModelError("empty leaf")
        return cls(f.astype(np.int64), t.astype(np.float64), l.astype(np.int64), r.astype(np.int64),
                   np.column_stack([neg, pos]).astype(np.int64), n_features,
                   int(d.get("min_leaf", 2)), d.get("max_depth"))


def _fit_tree(X, y, rows, min_leaf, max_depth, n_sub, seed) -> DecisionTree:
    f, t, l, r, c = _grow(X, y, rows, min_leaf, -1 if max_depth is None else max_depth,
                          n_sub, seed)
    return DecisionTree(f, t, l, r, c, X.shape[1], min_leaf, max_depth)


def train_tree(X, y, min_leaf: int = 2, max_depth: int | None = None) -> DecisionTree:
    """Grow one tree on every row and every column.

    A node becomes a leaf when it is pure, when no split leaves ``min_leaf``
    rows on each side, at ``max_depth``, or when the best gain is zero. Gain
    ties go to the lower column index, then the smaller threshold.
    """
    X, y = _check_xy(X, y)
    if min_leaf < 1:
        raise ValueError("min_leaf must be >= 1")
    if X.shape[0] < min_leaf:
        raise ValueError(f"need at least {min_leaf} rows")
    rows = np.arange(X.shape[0], dtype=np.int64)
    return _fit_tree(X, y, rows, min_leaf, max_depth, X.shape[1], 0)


@dataclass(frozen=True)
class RandomForest:
    trees: tuple[DecisionTree, ...]
    seeds: tuple[int, ...]     # per-tree seed for bootstrap and feature draws
    features_per_split: int
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if not self.trees:
            raise ValueError("a forest needs at least one tree")

    @property
    def n_features(self) -> int:
        return self.trees[0].n_features

    def tree_probas(self, X) -> np.ndarray:
        X = _check_rows(X, self.n_features)
        return np.array([t.predict_proba(X) for t in self.trees])

    def predict_proba(self, X) -> np.ndarray:
        return self.tree_probas(X).mean(axis=0)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)

    def to_dict(self) -> dict:
        return {"features_per_split": self.features_per_split, "bootstrap": self.bootstrap,
                "seed": self.seed, "tree_seeds": list(self.seeds),
                "trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def from_dict(cls, d: dict, n_features: int) -> "RandomForest":
        trees = tuple(DecisionTree.from_dict(t, n_features) for t in d["trees"])
        return cls(trees, tuple(int(s) for s in d["tree_seeds"]), int(d["features_per_split"]),
                   bool(d["bootstrap"]), int(d["seed"]))


def default_features_per_split(n_features: int) -> int:
    return max(1, math.ceil(math.sqrt(n_features)))


def train_forest(X, y, n_trees: int = 100, features_per_split: int | None = None,
                 bootstrap: bool = True, seed: int = 0, min_leaf: int = 2,
                 max_depth: int | None = None) -> RandomForest:
    """Bagged trees with a random column subset drawn at every split.

    Each tree gets its own seed derived from ``seed``; it drives both the
    bootstrap resample and the column draws, so the forest is reproducible
    tree by tree.
    """
    X, y = _check_xy(X, y)
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    n, F = X.shape
    k = default_features_per_split(F) if features_per_split is None else int(features_per_split)
    if k < 1:
        raise ValueError("features_per_split must be >= 1")
    seeds = np.random.SeedSequence(seed).generate_state(n_trees, dtype=np.uint32)
    trees = []
    for s in seeds:
        s = int(s)
        if bootstrap:
            rows = np.sort(np.random.default_rng(s).integers(0, n, size=n))
        else:
            rows = np.arange(n, dtype=np.int64)
        trees.append(_fit_tree(X, y, rows, min_leaf, max_depth, min(k, F), s))
    return RandomForest(tuple(trees), tuple(int(s) for s in seeds), min(k, F), bootstrap, seed)


ALGOS = ("tree", "forest")


def train(X, y, algo: str = "forest", seed: int = 0, **params):
    if algo == "tree":
        return train_tree(X, y, **params)
    if algo == "forest":
        return train_forest(X, y, seed=seed, **params)
    raise ValueError(f"unknown algorithm {algo!r}; expected one of {ALGOS}")


# --------------------------------------------------------------------------
# cross-validation

def stratified_folds(y, k: int = 10, seed: int = 0) -> np.ndarray:
    """Fold index per row.

    Each class is shuffled with ``seed`` and dealt round-robin onto the folds.
    The second class starts where the first left off, so fold sizes differ
    by at most one overall.
    """
    y = as_labels(y)
    if k < 2:
        raise ValueError("k must be >= 2")
    fold = np.empty(len(y), dtype=np.int64)
    rng = np.random.default_rng(seed)
    offset = 0
    for cls_ in (1, 0):
        members = np.flatnonzero(y == cls_)
        if len(members) < k:
            name = "spammer" if cls_ else "legitimate"
            raise ValueError(f"{name} class has {len(members)} rows, fewer than k={k}")
        members = members[rng.permutation(len(members))]
        fold[members] = (np.arange(len(members)) + offset) % k
        offset = (offset + len(members)) % k
    return fold


@dataclass
class CVResult:
    folds: np.ndarray                   # fold index per row
    scores: np.ndarray                  # out-of-fold spammer probability per row
    fold_confusions: list[ConfusionMatrix] = field(default_factory=list)

    @property
    def confusion(self) -> ConfusionMatrix:
        total = self.fold_confusions[0]
        for cm in self.fold_confusions[1:]:
            total = total + cm
        return total


def cross_validate(X, y, k: int = 10, algo: str = "forest", seed: int = 0, **params) -> CVResult:
    """Stratified k-fold cross-validation with a pooled confusion matrix."""
    X, y = _check_xy(X, y)
    folds = stratified_folds(y, k, seed)
    scores = np.empty(len(y))
    cms = []
    for f in range(k):
        test = folds == f
        model = train(X[~test], y[~test], algo=algo, seed=seed + f, **params)
        p = model.predict_proba(X[test])
        scores[test] = p
        cms.append(confusion((p >= 0.5).astype(np.int64), y[test]))
    return CVResult(folds, scores, cms)


# --------------------------------------------------------------------------
# persistence

@dataclass(frozen=True)
class TrainedModel:
    """An estimator together with what is needed to score new users."""
    estimator: DecisionTree | RandomForest
    mode: str
    columns: tuple[str, ...]
    seed: int
    normalization: dict = field(default_factory=dict)

    def predict_proba(self, X) -> np.ndarray:
        return self.estimator.predict_proba(X)

    def to_json(self) -> str:
        algo = "tree" if isinstance(self.estimator, DecisionTree) else "forest"
        doc = {"format": MODEL_FORMAT, "version": MODEL_VERSION, "algo": algo,
               "mode": self.mode, "columns": list(self.columns), "seed": self.seed,
               "normalization": self.normalization, "model": self.estimator.to_dict()}
        return json.dumps(doc, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "TrainedModel":
        try:
            doc = json.loads(text)
            if doc.get("format") != MODEL_FORMAT or doc.get("version") != MODEL_VERSION:
                raise ModelError("not a followspam model file")
            columns = tuple(doc["columns"])
            kind = {"tree": DecisionTree, "forest": RandomForest}[doc["algo"]]
            est = kind.from_dict(doc["model"], len(columns))
            return cls(est, doc["mode"], columns, int(doc["seed"]), doc.get("normalization", {}))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ModelError):
                raise
            raise ModelError(f"corrupt model: {exc}") from exc

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "TrainedModel":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ModelError(f"cannot read model {path}: {exc}") from exc
        return cls.from_json(text)
