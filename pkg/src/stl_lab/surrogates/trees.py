"""Random forest and gradient-boosted trees on the shared CART engine."""

from __future__ import annotations

import numpy as np

from ..cart import Tree, build_tree, presort_columns
from ..errors import ValidationError

__all__ = ["RandomForest", "GradientBoosting"]


def _tree_seed(master: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(master), int(index)]))


class RandomForest:
    """Bagged CARTs, no depth limit by default, all features at every split.

    Impurity is the squared error averaged across outputs; prediction is
    the index-ordered mean over trees, so results are independent of any
    execution interleaving.
    """

    def __init__(self, n_trees=200, max_depth=None, bootstrap=True, seed=0, min_leaf=1):
        self.n_trees = int(n_trees)
        self.max_depth = max_depth
        self.bootstrap = bool(bootstrap)
        self.seed = int(seed)
        self.min_leaf = int(min_leaf)
        self.trees: list[Tree] = []
        self.n_features = None

    def fit(self, X, Y):
        X = np.ascontiguousarray(X, dtype=np.float64)
        Y = np.asarray(Y, dtype=np.float64)
        if Y.ndim == 1:
            Y = Y.reshape(-1, 1)
        n = X.shape[0]
        if n < 1:
            raise ValidationError("random forest needs at least one sample")
        self.n_features = X.shape[1]
        col_order = presort_columns(X)
        self.trees = []
        for t in range(self.n_trees):
            if self.bootstrap:
                samples = _tree_seed(self.seed, t).integers(0, n, size=n)
            else:
                samples = np.arange(n, dtype=np.int64)
            self.trees.append(
                build_tree(X, Y, samples=samples, max_depth=self.max_depth,
                           min_leaf=self.min_leaf, col_order=col_order)
            )
        return self

    def predict(self, X):
        X = np.ascontiguousarray(X, dtype=np.float64)
        out = np.zeros((X.shape[0], self.trees[0].n_outputs))
        for tree in self.trees:
            tree.predict_into(X, out)
        out /= len(self.trees)
        return out

    def raw_importances(self):
        """Mean over trees of per-tree weighted impurity decreases (unnormalised)."""
        acc = np.zeros(self.n_features)
        for tree in self.trees:
            acc += tree.importance
        return acc / len(self.trees)

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "bootstrap": self.bootstrap,
            "seed": self.seed,
            "min_leaf": self.min_leaf,
            "n_features": self.n_features,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RandomForest":
        rf = cls(doc["n_trees"], doc["max_depth"], doc["bootstrap"], doc["seed"], doc["min_leaf"])
        rf.n_features = doc["n_features"]
        rf.trees = [Tree.from_dict(td) for td in doc["trees"]]
        return rf


class GradientBoosting:
    """Per-output boosted residual trees: f_t = f_{t-1} + lr * tree_t.

    One independent chain of trees is fit for each output column.
    """

    def __init__(self, n_trees=125, max_depth=10, learning_rate=0.05, seed=0):
        self.n_trees = int(n_trees)
        self.max_depth = None if max_depth is None else int(max_depth)
        self.learning_rate = float(learning_rate)
        self.seed = int(seed)
        self.base = None  # (F,) per-output training means
        self.chains: list[list[Tree]] = []

    def fit(self, X, Y):
        X = np.ascontiguousarray(X, dtype=np.float64)
        Y = np.asarray(Y, dtype=np.float64)
        if Y.ndim == 1:
            Y = Y.reshape(-1, 1)
        col_order = presort_columns(X)
        self.base = Y.mean(axis=0)
        self.chains = []
        n = X.shape[0]
        for o in range(Y.shape[1]):
            resid = Y[:, o : o + 1] - self.base[o]
            chain = []
            pred = np.zeros((n, 1))
            for _ in range(self.n_trees):
                tree = build_tree(X, resid, max_depth=self.max_depth, col_order=col_order)
                pred[:] = 0.0
                tree.predict_into(X, pred)
                resid = resid - self.learning_rate * pred
                chain.append(tree)
            self.chains.append(chain)
        return self

    def predict(self, X):
        X = np.ascontiguousarray(X, dtype=np.float64)
        out = np.empty((X.shape[0], len(self.chains)))
        buf = np.zeros((X.shape[0], 1))
        for o, chain in enumerate(self.chains):
            acc = np.full(X.shape[0], self.base[o])
            for tree in chain:
                buf[:] = 0.0
                tree.predict_into(X, buf)
                acc += self.learning_rate * buf[:, 0]
            out[:, o] = acc
        return out

    def staged_train_mse(self, X, Y):
        """Training MSE after each boosting stage (diagnostics/tests)."""
        X = np.ascontiguousarray(X, dtype=np.float64)
        Y = np.asarray(Y, dtype=np.float64)
        if Y.ndim == 1:
            Y = Y.reshape(-1, 1)
        n = X.shape[0]
        preds = np.tile(self.base, (n, 1))
        buf = np.zeros((n, 1))
        mses = []
        for s in range(self.n_trees):
            for o, chain in enumerate(self.chains):
                buf[:] = 0.0
                chain[s].predict_into(X, buf)
                preds[:, o] += self.learning_rate * buf[:, 0]
            mses.append(float(np.mean((preds - Y) ** 2)))
        return np.array(mses)

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "learning_rate": self.learning_rate,
            "seed": self.seed,
            "base": self.base.tolist(),
            "chains": [[t.to_dict() for t in chain] for chain in self.chains],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GradientBoosting":
        gbt = cls(doc["n_trees"], doc["max_depth"], doc["learning_rate"], doc["seed"])
        gbt.base = np.asarray(doc["base"], dtype=np.float64)
        gbt.chains = [[Tree.from_dict(td) for td in chain] for chain in doc["chains"]]
        return gbt
