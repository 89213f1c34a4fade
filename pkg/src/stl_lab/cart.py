"""Array-based CART regression trees (numba), shared by RF, GBT and MDI.

Impurity is the mean squared error averaged over outputs. A split's
quality is the variance-reduction gain

    gain = sum_o [ SL_o^2/nL + SR_o^2/nR - S_o^2/n ]

which equals (up to the 1/(N F) factor applied by the caller) the
sample-weighted impurity decrease used for Mean Decrease in Impurity.
Ties between candidate splits resolve to the lowest feature index, then
the lowest threshold, by scanning features and thresholds in ascending
order and only accepting strictly better gains.

The builder keeps one presorted position array per feature and partitions
it stably at every split (no per-node sorting). Feature columns are sorted
once per forest/boosting fit and reused across trees.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["presort_columns", "build_tree", "Tree"]


def presort_columns(X) -> np.ndarray:
    """(d, N) row indices, each row of the result sorting one feature column."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    return np.argsort(X, axis=0, kind="stable").T.astype(np.int32).copy()


@njit(cache=True)
def _positions_sorted(col_order, samples, n_rows):
    """Per-feature sample positions (0..n-1) ordered by feature value.

    `samples` may repeat rows (bootstrap); repeated rows come out adjacent.
    """
    d = col_order.shape[0]
    n = samples.size
    count = np.zeros(n_rows + 1, np.int32)
    for p in range(n):
        count[samples[p] + 1] += 1
    for r in range(n_rows):
        count[r + 1] += count[r]
    bucket = np.empty(n, np.int32)
    fill = count[:-1].copy()
    for p in range(n):
        r = samples[p]
        bucket[fill[r]] = p
        fill[r] += 1
    out = np.empty((d, n), np.int32)
    for f in range(d):
        k = 0
        for j in range(n_rows):
            r = col_order[f, j]
            for s in range(count[r], count[r + 1]):
                out[f, k] = bucket[s]
                k += 1
    return out


@njit(cache=True)
def _build(X, Y, samples, sp, max_depth, min_leaf):
    n = samples.size
    d = X.shape[1]
    n_out = Y.shape[1]
    cap = 2 * n + 1
    feature = np.full(cap, -1, np.int32)
    thresh = np.zeros(cap, np.float64)
    left = np.full(cap, -1, np.int32)
    right = np.full(cap, -1, np.int32)
    leaf_slot = np.full(cap, -1, np.int32)
    leaf_values = np.zeros((n, n_out), np.float64)
    raw_importance = np.zeros(d, np.float64)

    side = np.empty(n, np.uint8)
    scratch = np.empty(n, np.int32)
    csum = np.empty(n_out, np.float64)
    total = np.empty(n_out, np.float64)

    stack = np.empty((cap, 4), np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = n
    stack[0, 3] = 0
    top = 1
    n_nodes = 1
    n_leaves = 0

    while top > 0:
        top -= 1
        node = stack[top, 0]
        lo = stack[top, 1]
        hi = stack[top, 2]
        depth = stack[top, 3]
        nn = hi - lo

        for o in range(n_out):
            total[o] = 0.0
        for i in range(lo, hi):
            row = samples[sp[0, i]]
            for o in range(n_out):
                total[o] += Y[row, o]

        best_gain = 0.0
        best_f = -1
        best_thr = 0.0
        if nn >= 2 * min_leaf and (max_depth < 0 or depth < max_depth):
            base = 0.0
            for o in range(n_out):
                base += total[o] * total[o]
            base /= nn
            for f in range(d):
                for o in range(n_out):
                    csum[o] = 0.0
                prev = X[samples[sp[f, lo]], f]
                for i in range(nn - 1):
                    row = samples[sp[f, lo + i]]
                    for o in range(n_out):
                        csum[o] += Y[row, o]
                    cur = X[samples[sp[f, lo + i + 1]], f]
                    if cur > prev:
                        nl = i + 1
                        nr = nn - nl
                        if nl >= min_leaf and nr >= min_leaf:
                            g = -base
                            for o in range(n_out):
                                sl = csum[o]
                                sr = total[o] - sl
                                g += sl * sl / nl + sr * sr / nr
                            if g > best_gain:
                                best_gain = g
                                best_f = f
                                best_thr = 0.5 * (prev + cur)
                    prev = cur

        if best_f < 0:
            leaf_slot[node] = n_leaves
            for o in range(n_out):
                leaf_values[n_leaves, o] = total[o] / nn
            n_leaves += 1
            continue

        raw_importance[best_f] += best_gain
        nl = 0
        for i in range(lo, hi):
            p = sp[0, i]
            if X[samples[p], best_f] <= best_thr:
                side[p] = 1
                nl += 1
            else:
                side[p] = 0
        # stable partition of every feature's sorted segment
        for f in range(d):
            a = 0
            b = nl
            for i in range(lo, hi):
                p = sp[f, i]
                if side[p] == 1:
                    scratch[a] = p
                    a += 1
                else:
                    scratch[b] = p
                    b += 1
            for i in range(nn):
                sp[f, lo + i] = scratch[i]

        feature[node] = best_f
        thresh[node] = best_thr
        left[node] = n_nodes
        right[node] = n_nodes + 1
        stack[top, 0] = n_nodes + 1
        stack[top, 1] = lo + nl
        stack[top, 2] = hi
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = n_nodes
        stack[top, 1] = lo
        stack[top, 2] = lo + nl
        stack[top, 3] = depth + 1
        top += 1
        n_nodes += 2

    return (
        feature[:n_nodes].copy(),
        thresh[:n_nodes].copy(),
        left[:n_nodes].copy(),
        right[:n_nodes].copy(),
        leaf_slot[:n_nodes].copy(),
        leaf_values[:n_leaves].copy(),
        raw_importance,
    )


@njit(cache=True)
def _predict_into(feature, thresh, left, right, leaf_slot, leaf_values, X, out):
    for i in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= thresh[node]:
                node = left[node]
            else:
                node = right[node]
        slot = leaf_slot[node]
        for o in range(out.shape[1]):
            out[i, o] += leaf_values[slot, o]


class Tree:
    """One fitted CART held as flat arrays."""

    __slots__ = ("feature", "thresh", "left", "right", "leaf_slot", "leaf_values", "importance")

    def __init__(self, feature, thresh, left, right, leaf_slot, leaf_values, importance):
        self.feature = feature
        self.thresh = thresh
        self.left = left
        self.right = right
        self.leaf_slot = leaf_slot
        self.leaf_values = leaf_values
        self.importance = importance

    @property
    def n_outputs(self):
        return self.leaf_values.shape[1]

    def predict_into(self, X, out):
        _predict_into(
            self.feature, self.thresh, self.left, self.right,
            self.leaf_slot, self.leaf_values,
            np.ascontiguousarray(X, dtype=np.float64), out,
        )

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "thresh": self.thresh.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "leaf_slot": self.leaf_slot.tolist(),
            "leaf_values": self.leaf_values.tolist(),
            "importance": self.importance.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Tree":
        lv = np.asarray(doc["leaf_values"], dtype=np.float64)
        if lv.ndim == 1:
            lv = lv.reshape(-1, 1)
        return cls(
            np.asarray(doc["feature"], dtype=np.int32),
            np.asarray(doc["thresh"], dtype=np.float64),
            np.asarray(doc["left"], dtype=np.int32),
            np.asarray(doc["right"], dtype=np.int32),
            np.asarray(doc["leaf_slot"], dtype=np.int32),
            lv,
            np.asarray(doc["importance"], dtype=np.float64),
        )


def build_tree(X, Y, samples=None, max_depth=None, min_leaf=1, col_order=None) -> Tree:
    """Fit one tree on X[samples]. `samples` may repeat rows (bootstrap).

    `col_order` is the presort_columns(X) result; pass it when fitting many
    trees on the same X. Tree.importance holds the per-feature weighted
    impurity decrease, divided by (n_samples * n_outputs).
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1)
    if samples is None:
        samples = np.arange(X.shape[0], dtype=np.int64)
    else:
        samples = np.ascontiguousarray(samples, dtype=np.int64)
    if col_order is None:
        col_order = presort_columns(X)
    sp = _positions_sorted(col_order, samples, X.shape[0])
    depth = -1 if max_depth is None else int(max_depth)
    out = _build(X, Y, samples, sp, depth, int(min_leaf))
    tree = Tree(*out)
    tree.importance = tree.importance / (samples.size * Y.shape[1])
    return tree
