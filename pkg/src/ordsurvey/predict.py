"""Naive Bayes and decision-tree prediction of the ordinal response.

Both learners output a distribution over every value of the response scale.
The point prediction is the argmax, with ties going to the lower value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from ordsurvey.dataset import OrdinalDataset, Scale
from ordsurvey.errors import InputError, TooFewRows


class EmptyTrainingSet(InputError):
    pass


def point_prediction(dist: np.ndarray, classes: Sequence[int]) -> int:
    # np.argmax returns the first maximum, i.e. the lowest tied class
    return int(classes[int(np.argmax(dist))])


def _labeled_rows(ds: OrdinalDataset) -> tuple[np.ndarray, np.ndarray]:
    mask = ds.labeled_mask
    if not mask.any():
        raise EmptyTrainingSet("no labeled rows to train on")
    return ds.X[mask], ds.y[mask]


def _row_array(row) -> np.ndarray:
    return np.array([math.nan if v is None else v for v in row], dtype=float)


# --------------------------------------------------------------------------
# naive Bayes
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NBModel:
    """Class priors and per-attribute conditional value distributions.

    ``conditionals[a]`` has shape (n_classes, scale size); row c is
    P(A = value | class c).
    """

    classes: tuple[int, ...]
    scales: tuple[Scale, ...]
    priors: np.ndarray
    conditionals: tuple[np.ndarray, ...]
    smoothing: float = 1.0

    def predict_proba(self, row) -> np.ndarray:
        return predict_nb(self, row)

    def predict(self, row) -> int:
        return point_prediction(self.predict_proba(row), self.classes)


def train_naive_bayes(ds: OrdinalDataset, smoothing: float = 1.0) -> NBModel:
    """Fit priors and conditionals with additive (Laplace) smoothing.

    Rows without a response are ignored; a missing attribute value is left
    out of that attribute's counts only.
    """
    X, y = _labeled_rows(ds)
    classes = tuple(ds.response_scale.values)
    K = len(classes)
    class_idx = (y - ds.response_scale.min).astype(int)
    class_counts = np.bincount(class_idx, minlength=K).astype(float)
    priors = (class_counts + smoothing) / (class_counts.sum() + smoothing * K)
    conditionals = []
    for a, sc in enumerate(ds.scales):
        col = X[:, a]
        known = ~np.isnan(col)
        counts = np.zeros((K, sc.size))
        np.add.at(counts, (class_idx[known], (col[known] - sc.min).astype(int)), 1.0)
        cond = (counts + smoothing) / (counts.sum(axis=1, keepdims=True) + smoothing * sc.size)
        conditionals.append(cond)
    return NBModel(classes, tuple(ds.scales), priors, tuple(conditionals), smoothing)


def predict_nb(model: NBModel, row) -> np.ndarray:
    """Normalized posterior over ``model.classes``; missing values are skipped."""
    x = _row_array(row)
    logp = np.log(model.priors).copy()
    for v, sc, cond in zip(x, model.scales, model.conditionals):
        if math.isnan(v):
            continue
        logp += np.log(cond[:, int(v) - sc.min])
    p = np.exp(logp - logp.max())
    return p / p.sum()


# --------------------------------------------------------------------------
# decision tree
# --------------------------------------------------------------------------

@dataclass(eq=False)
class TreeNode:
    counts: np.ndarray
    attribute: int | None = None
    children: dict[int, "TreeNode"] = field(default_factory=dict)
    default: int | None = None  # child value taking missing/unseen values

    @property
    def is_leaf(self) -> bool:
        return self.attribute is None

    def distribution(self) -> np.ndarray:
        return self.counts / self.counts.sum()


@dataclass(frozen=True)
class TreeParams:
    """Growth limits.

    ``require_gain`` stops growth when no split has positive information
    gain. With ``min_leaf=1, max_depth=None, require_gain=False`` the tree
    grows until every leaf is pure or no attribute separates its rows.
    """

    min_leaf: int = 2
    max_depth: int | None = None
    require_gain: bool = True

    def __post_init__(self):
        if self.min_leaf < 1:
            raise InputError("min_leaf must be at least 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise InputError("max_depth must be non-negative")


UNBOUNDED = TreeParams(min_leaf=1, max_depth=None, require_gain=False)


@dataclass(frozen=True, eq=False)
class TreeModel:
    classes: tuple[int, ...]
    root: TreeNode
    params: TreeParams
    attribute_names: tuple[str, ...] = ()

    def predict_proba(self, row) -> np.ndarray:
        return predict_tree(self, row)

    def predict(self, row) -> int:
        return point_prediction(self.predict_proba(row), self.classes)

    def depth(self) -> int:
        def walk(node):
            return 0 if node.is_leaf else 1 + max(walk(c) for c in node.children.values())
        return walk(self.root)

    def rules(self) -> list[tuple[tuple[tuple[str, int], ...], int]]:
        """Root-to-leaf paths as ((attribute, value), ...) with the leaf's point prediction."""
        out = []

        def walk(node, path):
            if node.is_leaf:
                out.append((tuple(path), point_prediction(node.distribution(), self.classes)))
                return
            name = self.attribute_names[node.attribute] if self.attribute_names else str(node.attribute)
            for v in sorted(node.children):
                walk(node.children[v], path + [(name, v)])

        walk(self.root, [])
        return out


def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def _class_counts(idx: np.ndarray, K: int) -> np.ndarray:
    return np.bincount(idx, minlength=K).astype(float)


def _heaviest(groups: dict[int, np.ndarray]) -> int:
    return min(groups, key=lambda v: (-len(groups[v]), v))


def _candidate_splits(X, cls, rows, used, K, params):
    n = len(rows)
    cands = []
    for a in range(X.shape[1]):
        if a in used:
            continue
        col = X[rows, a]
        known = ~np.isnan(col)
        if not known.any():
            continue
        values = col[known].astype(int)
        groups = {int(v): rows[known][values == v] for v in np.unique(values)}
        if sum(len(g) >= params.min_leaf for g in groups.values()) < 2:
            continue
        krows = rows[known]
        h_known = _entropy(_class_counts(cls[krows], K))
        h_split = sum(len(g) / len(krows) * _entropy(_class_counts(cls[g], K)) for g in groups.values())
        gain = len(krows) / n * (h_known - h_split)
        fractions = [len(g) / n for g in groups.values()]
        if (~known).any():
            fractions.append((~known).sum() / n)
        split_info = -sum(f * math.log2(f) for f in fractions)
        cands.append((a, gain, gain / split_info if split_info > 0 else 0.0, groups, rows[~known]))
    return cands


def _choose(cands, params):
    eps = 1e-12
    positive = [c for c in cands if c[1] > eps]
    if positive:
        # C4.5 heuristic: only attributes with at least average gain compete on gain ratio
        mean_gain = sum(c[1] for c in positive) / len(positive)
        pool = [c for c in positive if c[1] >= mean_gain - eps]
    elif params.require_gain or not cands:
        return None
    else:
        pool = cands
    return max(pool, key=lambda c: (c[2], c[1], -c[0]))


def train_decision_tree(ds: OrdinalDataset, params: TreeParams = TreeParams()) -> TreeModel:
    """Greedy multiway tree on gain ratio.

    Each split creates one child per attribute value present at the node.
    Rows missing the split attribute follow the heaviest child, as at
    prediction time. A split needs at least two children with ``min_leaf``
    rows.
    """
    X, y = _labeled_rows(ds)
    classes = tuple(ds.response_scale.values)
    K = len(classes)
    cls = (y - ds.response_scale.min).astype(int)

    def grow(rows: np.ndarray, used: frozenset, depth: int) -> TreeNode:
        counts = _class_counts(cls[rows], K)
        node = TreeNode(counts)
        if (counts > 0).sum() <= 1 or (params.max_depth is not None and depth >= params.max_depth):
            return node
        best = _choose(_candidate_splits(X, cls, rows, used, K, params), params)
        if best is None:
            return node
        a, _, _, groups, missing = best
        node.attribute = a
        node.default = _heaviest(groups)
        for v, g in groups.items():
            if v == node.default and len(missing):
                g = np.sort(np.concatenate([g, missing]))
            node.children[v] = grow(g, used | {a}, depth + 1)
        return node

    root = grow(np.arange(len(y)), frozenset(), 0)
    return TreeModel(classes, root, params, tuple(ds.attribute_names))


def predict_tree(model: TreeModel, row) -> np.ndarray:
    """Leaf distribution reached by ``row``; missing or unseen values take the default child."""
    x = _row_array(row)
    node = model.root
    while not node.is_leaf:
        v = x[node.attribute]
        key = None if math.isnan(v) else int(v)
        node = node.children.get(key, node.children[node.default])
    return node.distribution()


# --------------------------------------------------------------------------
# learners, cross-validation, ranking
# --------------------------------------------------------------------------

class Model(Protocol):
    classes: tuple[int, ...]

    def predict_proba(self, row) -> np.ndarray: ...

    def predict(self, row) -> int: ...


class Learner(Protocol):
    name: str

    def fit(self, ds: OrdinalDataset) -> Model: ...


@dataclass(frozen=True)
class NaiveBayesLearner:
    smoothing: float = 1.0
    name: str = "naive_bayes"

    def fit(self, ds):
        return train_naive_bayes(ds, self.smoothing)


@dataclass(frozen=True)
class DecisionTreeLearner:
    params: TreeParams = TreeParams()
    name: str = "decision_tree"

    def fit(self, ds):
        return train_decision_tree(ds, self.params)


@dataclass(frozen=True, eq=False)
class ConstantModel:
    classes: tuple[int, ...]
    dist: np.ndarray

    def predict_proba(self, row):
        return self.dist

    def predict(self, row):
        return point_prediction(self.dist, self.classes)


@dataclass(frozen=True)
class MajorityLearner:
    """Always predicts the modal training response (lowest value on ties)."""

    name: str = "majority"

    def fit(self, ds):
        _, y = _labeled_rows(ds)
        classes = tuple(ds.response_scale.values)
        counts = _class_counts((y - ds.response_scale.min).astype(int), len(classes))
        dist = np.zeros(len(classes))
        dist[int(np.argmax(counts))] = 1.0
        return ConstantModel(classes, dist)


@dataclass(frozen=True)
class FoldResult:
    fold: int
    n_test: int
    exact_accuracy: float
    within_one_accuracy: float


@dataclass(frozen=True)
class CVReport:
    learner: str
    folds: int
    seed: int
    n: int
    exact_accuracy: float
    within_one_accuracy: float
    majority_baseline: float
    per_fold: tuple[FoldResult, ...]

    def __post_init__(self):
        # the within-one event contains the exact event
        if self.within_one_accuracy < self.exact_accuracy:
            raise AssertionError("within-one accuracy below exact accuracy")

    def to_dict(self) -> dict:
        return {
            "learner": self.learner,
            "folds": self.folds,
            "seed": self.seed,
            "n": self.n,
            "exact_accuracy": self.exact_accuracy,
            "within_one_accuracy": self.within_one_accuracy,
            "majority_baseline": self.majority_baseline,
            "per_fold": [
                {"fold": f.fold, "n_test": f.n_test, "exact_accuracy": f.exact_accuracy,
                 "within_one_accuracy": f.within_one_accuracy}
                for f in self.per_fold
            ],
        }


def majority_baseline(y: np.ndarray) -> float:
    """Relative frequency of the modal response among present responses."""
    y = y[~np.isnan(y)]
    _, counts = np.unique(y, return_counts=True)
    return float(counts.max() / y.size)


def stratified_folds(y: np.ndarray, folds: int, seed: int) -> np.ndarray:
    """Fold index per row.

    Rows of each response value (ascending) are shuffled with one seeded
    generator and dealt round-robin; the dealing position carries over from
    one value to the next, so total fold sizes also differ by at most one.
    """
    rng = np.random.default_rng(seed)
    assign = np.empty(len(y), dtype=int)
    pos = 0
    for v in np.unique(y):
        idx = np.flatnonzero(y == v)
        idx = idx[rng.permutation(idx.size)]
        assign[idx] = (pos + np.arange(idx.size)) % folds
        pos = (pos + idx.size) % folds
    return assign


def cross_validate(ds: OrdinalDataset, learner: Learner, folds: int = 10, seed: int = 0) -> CVReport:
    """Stratified k-fold cross-validation on the labeled rows of ``ds``."""
    ds = ds.take(np.flatnonzero(ds.labeled_mask))
    if ds.n < folds:
        raise TooFewRows(f"{folds}-fold cross-validation needs at least {folds} labeled rows, got {ds.n}")
    assign = stratified_folds(ds.y, folds, seed)
    correct = np.zeros(ds.n, dtype=bool)
    near = np.zeros(ds.n, dtype=bool)
    per_fold = []
    for f in range(folds):
        test = np.flatnonzero(assign == f)
        model = learner.fit(ds.take(np.flatnonzero(assign != f)))
        for i in test:
            pred = model.predict(ds.X[i])
            correct[i] = pred == ds.y[i]
            near[i] = abs(pred - ds.y[i]) <= 1
        per_fold.append(FoldResult(f, int(test.size),
                                   float(correct[test].mean()) if test.size else 0.0,
                                   float(near[test].mean()) if test.size else 0.0))
    return CVReport(learner.name, folds, seed, ds.n, float(correct.mean()), float(near.mean()),
                    majority_baseline(ds.y), tuple(per_fold))


@dataclass(frozen=True)
class RankedPrediction:
    row_id: str
    predicted: int
    distribution: dict[int, float]


def _id_key(row_id: str):
    # numeric ids compare as numbers so that "10" follows "9"
    return (0, int(row_id), "") if row_id.isdigit() else (1, 0, row_id)


def rank_targets(model: Model, unlabeled: OrdinalDataset) -> list[RankedPrediction]:
    """Predictions for every row, highest predicted response first, ties by row id."""
    preds = []
    for i in range(unlabeled.n):
        dist = model.predict_proba(unlabeled.X[i])
        preds.append(RankedPrediction(
            unlabeled.row_ids[i], point_prediction(dist, model.classes),
            {int(c): float(p) for c, p in zip(model.classes, dist)},
        ))
    return sorted(preds, key=lambda p: (-p.predicted, _id_key(p.row_id)))
