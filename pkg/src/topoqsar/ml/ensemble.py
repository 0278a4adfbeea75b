"""Gradient boosting and random forests built on :mod:`topoqsar.ml.tree`."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from topoqsar.ml.features import as_array
from topoqsar.ml.tree import RegressionTree, SplitFinder, build_tree

__all__ = [
    "TreeEnsemble",
    "fit_gradient_boosting",
    "fit_random_forest",
    "feature_importances",
    "oob_predictions",
    "GB_DEFAULTS",
    "RF_DEFAULTS",
]

GB_DEFAULTS = {"n_trees": 300, "learning_rate": 0.05, "max_depth": 3, "min_leaf": 5}
RF_DEFAULTS = {"n_trees": 300, "max_features": "third", "min_leaf": 2, "max_depth": None,
               "bootstrap": True, "seed": 0, "n_jobs": 1}


@dataclass
class TreeEnsemble:
    kind: str
    trees: list[RegressionTree]
    base_prediction: float
    learning_rate: float = 1.0
    n_features: int = 0
    feature_names: tuple[str, ...] | None = None
    params: dict = field(default_factory=dict)
    train_loss: list[float] = field(default_factory=list, repr=False)
    in_bag: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("gradient_boosting", "random_forest"):
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if not 0 < self.learning_rate <= 1:
            raise ValueError("learning rate must lie in (0, 1]")
        for t in self.trees:
            if t.n_nodes and t.feature.max() >= self.n_features:
                raise ValueError("tree splits on a feature outside the matrix")

    def predict(self, X) -> np.ndarray:
        X, _ = as_array(X)
        if self.kind == "gradient_boosting":
            out = np.full(len(X), self.base_prediction)
            for t in self.trees:
                out += self.learning_rate * t.predict(X)
            return out
        if not self.trees:
            return np.full(len(X), self.base_prediction)
        return np.mean([t.predict(X) for t in self.trees], axis=0)


def fit_gradient_boosting(X, y, n_trees: int = 300, learning_rate: float = 0.05,
                          max_depth: int = 3, min_leaf: int = 5,
                          feature_names=None) -> TreeEnsemble:
    """Least-squares boosting: each tree fits the current residuals and is
    added with shrinkage ``learning_rate``. A constant target yields no
    trees."""
    if n_trees < 1:
        raise ValueError("n_trees must be at least 1")
    if not 0 < learning_rate <= 1:
        raise ValueError("learning rate must lie in (0, 1]")
    X, names = as_array(X)
    y = np.asarray(y, dtype=np.float64)
    names = names or (tuple(feature_names) if feature_names is not None else None)
    base = float(y.mean())
    params = {"n_trees": n_trees, "learning_rate": learning_rate,
              "max_depth": max_depth, "min_leaf": min_leaf}
    F = np.full(len(y), base)
    loss = [float(np.mean((y - F) ** 2))]
    trees: list[RegressionTree] = []
    if np.ptp(y) > 0:
        finder = SplitFinder(X)
        for _ in range(n_trees):
            tree = build_tree(X, y - F, max_depth=max_depth, min_leaf=min_leaf, finder=finder)
            F = F + learning_rate * tree.value[tree.apply(X)]
            trees.append(tree)
            loss.append(float(np.mean((y - F) ** 2)))
    return TreeEnsemble("gradient_boosting", trees, base, learning_rate, X.shape[1],
                        names, params, loss)


def _resolve_max_features(max_features, p: int) -> int:
    if max_features is None or max_features == "all":
        return p
    if max_features == "third":
        return max(1, math.ceil(p / 3))
    if max_features == "sqrt":
        return max(1, math.ceil(math.sqrt(p)))
    if isinstance(max_features, float):
        return max(1, math.ceil(max_features * p))
    return max(1, min(int(max_features), p))


def _grow_forest_tree(X, y, finder, sample, k, min_leaf, max_depth, seed):
    rng = np.random.default_rng(seed)
    return build_tree(X, y, max_depth=max_depth, min_leaf=min_leaf, max_features=k,
                      rng=rng, sample=sample, finder=finder)


def fit_random_forest(X, y, n_trees: int = 300, max_features="third", min_leaf: int = 2,
                      max_depth: int | None = None, bootstrap: bool = True, seed: int = 0,
                      n_jobs: int = 1, feature_names=None) -> TreeEnsemble:
    """Bagged regression trees with per-node feature subsampling.

    ``max_features`` may be an int, a fraction, ``"third"`` (ceil(p/3)),
    ``"sqrt"`` or ``"all"``. Results depend only on ``seed``, not on
    ``n_jobs``.
    """
    if n_trees < 1:
        raise ValueError("n_trees must be at least 1")
    X, names = as_array(X)
    y = np.asarray(y, dtype=np.float64)
    names = names or (tuple(feature_names) if feature_names is not None else None)
    n, p = X.shape
    k = _resolve_max_features(max_features, p)
    seq = np.random.SeedSequence(seed)
    boot_rng = np.random.default_rng(seq.spawn(1)[0])
    tree_seeds = [int(s.generate_state(1)[0]) for s in seq.spawn(n_trees + 1)[1:]]
    samples = []
    in_bag = np.zeros((n_trees, n), dtype=np.int32)
    for t in range(n_trees):
        s = boot_rng.integers(0, n, n) if bootstrap else np.arange(n)
        s.sort()
        samples.append(s)
        in_bag[t] = np.bincount(s, minlength=n)
    finder = SplitFinder(X)
    args = [(X, y, finder, samples[t], k, min_leaf, max_depth, tree_seeds[t])
            for t in range(n_trees)]
    if n_jobs == 1:
        trees = [_grow_forest_tree(*a) for a in args]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs if n_jobs > 0 else None) as pool:
            trees = list(pool.map(lambda a: _grow_forest_tree(*a), args))
    params = {"n_trees": n_trees, "max_features": max_features, "min_leaf": min_leaf,
              "max_depth": max_depth, "bootstrap": bootstrap, "seed": seed}
    return TreeEnsemble("random_forest", trees, float(y.mean()), 1.0, p, names, params,
                        in_bag=in_bag if bootstrap else None)


def feature_importances(ensemble: TreeEnsemble) -> np.ndarray:
    """Total variance reduction per feature over all trees, normalised to 1.

    An ensemble without a single split spreads importance uniformly.
    """
    p = ensemble.n_features
    total = np.zeros(p)
    for t in ensemble.trees:
        split = t.feature >= 0
        np.add.at(total, t.feature[split], t.gain[split])
    s = total.sum()
    if s <= 0:
        return np.full(p, 1.0 / p)
    return total / s


def oob_predictions(forest: TreeEnsemble, X) -> np.ndarray:
    """Out-of-bag prediction per training row (NaN if never out of bag)."""
    if forest.in_bag is None:
        raise ValueError("out-of-bag predictions need a bootstrapped forest")
    X, _ = as_array(X)
    total = np.zeros(len(X))
    count = np.zeros(len(X))
    for t, bag in zip(forest.trees, forest.in_bag):
        oob = bag == 0
        if oob.any():
            total[oob] += t.predict(X[oob])
            count[oob] += 1
    with np.errstate(invalid="ignore"):
        return np.where(count > 0, total / np.maximum(count, 1), np.nan)
