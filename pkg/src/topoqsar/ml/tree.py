"""CART regression trees with exhaustive variance-reduction splits.

Candidate thresholds are midpoints between consecutive distinct values of
a feature inside the node. Ties in gain go to the lowest feature index and
then to the lowest threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import os

import numpy as np

from topoqsar.ml import _kernels

TIE_RTOL = _kernels.TIE_RTOL

__all__ = ["RegressionTree", "SplitFinder", "build_tree", "best_split"]


@dataclass
class RegressionTree:
    """Flat array representation; ``feature[i] < 0`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray
    gain: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=np.int64)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by each row of ``X``."""
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            f = self.feature[node]
            active = f >= 0
            if not active.any():
                return node
            r, nd = rows[active], node[active]
            go_left = X[r, f[active]] <= self.threshold[nd]
            node[active] = np.where(go_left, self.left[nd], self.right[nd])

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(np.asarray(X, dtype=np.float64))]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "n_samples": self.n_samples.tolist(),
            "gain": self.gain.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RegressionTree":
        ints = ("feature", "left", "right", "n_samples")
        return cls(**{k: np.asarray(d[k], dtype=np.int64 if k in ints else np.float64)
                      for k in ("feature", "threshold", "left", "right", "value",
                                "n_samples", "gain")})


class SplitFinder:
    """Exact best-split search over pre-binned columns.

    Each column is coded by the rank of its value among the distinct
    training values, so per-node statistics reduce to bincounts. Nodes with
    few rows relative to the number of bins fall back to sorting. When the
    0/1 columns are sparse (fingerprints) they are scored together from a
    row-wise list of set bits.
    """

    SPARSE_DENSITY = 0.3

    def __init__(self, X: np.ndarray, backend: str | None = None):
        backend = backend or os.environ.get("TOPOQSAR_SPLIT_BACKEND") or (
            "numba" if _kernels.AVAILABLE else "numpy")
        if backend not in ("numba", "numpy"):
            raise ValueError(f"unknown split backend {backend!r}")
        if backend == "numba" and not _kernels.AVAILABLE:
            raise ImportError("the numba split backend needs numba installed")
        self.backend = backend
        self.X = np.ascontiguousarray(X, dtype=np.float64)
        n, p = self.X.shape
        self.uniques = []
        codes = np.empty((n, p), dtype=np.int64)
        for j in range(p):
            u, inv = np.unique(self.X[:, j], return_inverse=True)
            self.uniques.append(u)
            codes[:, j] = inv.ravel()
        self.codes = codes
        self.n_bins = np.array([len(u) for u in self.uniques], dtype=np.int64)
        self.binary = np.array([len(u) == 2 and u[0] == 0 and u[1] == 1 for u in self.uniques],
                               dtype=bool)
        self.sparse = False
        if self.binary.any():
            ones = self.X[:, self.binary] == 1
            if ones.mean() <= self.SPARSE_DENSITY:
                self.sparse = True
                cols = np.flatnonzero(self.binary)
                r, c = np.nonzero(ones)
                self.bit_cols = cols[c]
                self.bit_ptr = np.concatenate(([0], np.cumsum(np.bincount(r, minlength=n))))
        if not self.sparse:
            self.bit_cols = np.zeros(0, dtype=np.int64)
            self.bit_ptr = np.zeros(n + 1, dtype=np.int64)

    def find(self, idx: np.ndarray, y: np.ndarray, features: np.ndarray, min_leaf: int):
        """Best (gain, feature, threshold) for rows ``idx`` over ``features``
        (ascending), or None when no admissible split exists.

        ``y`` holds the node's targets aligned with ``idx``.
        """
        n = len(idx)
        if n < 2 * min_leaf:
            return None
        if self.backend == "numba":
            g, f, t = _kernels.node_split(self.X, np.asarray(idx, dtype=np.int64),
                                          np.asarray(y, dtype=np.float64),
                                          np.asarray(features, dtype=np.int64), min_leaf,
                                          self.binary, self.sparse, self.bit_ptr, self.bit_cols)
            return None if f < 0 else (float(g), int(f), float(t))
        yc = y - y.mean()
        bins = self.n_bins[features]
        usable = bins > 1
        if not usable.all():
            features, bins = features[usable], bins[usable]
            if len(features) == 0:
                return None
        best = None
        if self.sparse:
            is_bit = self.binary[features]
            if is_bit.any():
                best = self._find_bits(idx, yc, features[is_bit], min_leaf)
                features, bins = features[~is_bit], bins[~is_bit]
                if len(features) == 0:
                    return best
        if int(bins.sum()) <= 2 * n * len(features):
            dense = self._find_binned(idx, yc, features, bins, min_leaf)
        else:
            dense = self._find_sorted(idx, yc, features, min_leaf)
        if best is None:
            return dense
        if dense is None:
            return best
        if _beats(dense[0], best[0]) or (not _beats(best[0], dense[0]) and dense[1] < best[1]):
            return dense
        return best

    def _find_bits(self, idx, yc, features, min_leaf):
        # rows with the bit unset go left (x <= 0.5); sum(yc) = 0 gives s_left = -s_set
        n = len(idx)
        p = self.X.shape[1]
        starts = self.bit_ptr[idx]
        lens = self.bit_ptr[idx + 1] - starts
        total = int(lens.sum())
        pos = np.repeat(starts - np.concatenate(([0], np.cumsum(lens)[:-1])), lens)
        cols = self.bit_cols[pos + np.arange(total)]
        n_set = np.bincount(cols, minlength=p)[features]
        s_set = np.bincount(cols, weights=np.repeat(yc, lens), minlength=p)[features]
        n_left = n - n_set
        ok = (n_left >= min_leaf) & (n_set >= min_leaf)
        if not ok.any():
            return None
        gain = np.full(len(features), -np.inf)
        gain[ok] = s_set[ok] ** 2 * n / (n_left[ok] * n_set[ok])
        b = _first_best(gain)
        return float(gain[b]), int(features[b]), 0.5

    def _find_binned(self, idx, yc, features, bins, min_leaf):
        n = len(idx)
        offsets = np.concatenate(([0], np.cumsum(bins)[:-1]))
        flat = (self.codes[np.ix_(idx, features)] + offsets).ravel()
        total = int(bins.sum())
        cnt = np.bincount(flat, minlength=total)
        sums = np.bincount(flat, weights=np.repeat(yc, len(features)), minlength=total)
        seg_start = np.repeat(offsets, bins)
        cum_cnt = np.cumsum(cnt)
        cum_sum = np.cumsum(sums)
        base_cnt = np.where(seg_start > 0, cum_cnt[seg_start - 1], 0)
        base_sum = np.where(seg_start > 0, cum_sum[seg_start - 1], 0.0)
        n_left = cum_cnt - base_cnt
        s_left = cum_sum - base_sum
        n_right = n - n_left
        ok = (cnt > 0) & (n_left >= min_leaf) & (n_right >= min_leaf)
        if not ok.any():
            return None
        gain = np.full(total, -np.inf)
        nl, nr, sl = n_left[ok], n_right[ok], s_left[ok]
        gain[ok] = sl * sl * n / (nl * nr)
        b = _first_best(gain)
        k = int(np.searchsorted(offsets, b, side="right") - 1)
        feat = int(features[k])
        local = b - offsets[k]
        seg_end = offsets[k] + bins[k]
        nxt = b + 1 + int(np.flatnonzero(cnt[b + 1 : seg_end])[0])
        lo = self.uniques[feat][local]
        hi = self.uniques[feat][nxt - offsets[k]]
        return float(gain[b]), feat, _midpoint(lo, hi)

    def _find_sorted(self, idx, yc, features, min_leaf):
        n = len(idx)
        vals = self.X[np.ix_(idx, features)]
        order = np.argsort(vals, axis=0, kind="stable")
        svals = np.take_along_axis(vals, order, axis=0)
        cum = np.cumsum(yc[order], axis=0)
        n_left = np.arange(1, n)[:, None]
        sl = cum[:-1]
        distinct = svals[1:] > svals[:-1]
        ok = distinct & (n_left >= min_leaf) & (n - n_left >= min_leaf)
        if not ok.any():
            return None
        gain = np.where(ok, sl * sl * n / (n_left * (n - n_left)), -np.inf)
        # feature-major scan so ties resolve to the lowest feature, then threshold
        flat = gain.T.ravel()
        b = _first_best(flat)
        k, pos = divmod(b, n - 1)
        return float(flat[b]), int(features[k]), _midpoint(svals[pos, k], svals[pos + 1, k])


def _beats(g: float, incumbent: float) -> bool:
    return g > incumbent + TIE_RTOL * abs(incumbent)


def _first_best(gain: np.ndarray) -> int:
    # gains equal up to summation-order rounding count as ties; take the first
    top = gain.max()
    return int(np.argmax(gain >= top - TIE_RTOL * abs(top)))


def _midpoint(lo: float, hi: float) -> float:
    mid = lo + (hi - lo) / 2.0
    return float(lo if mid >= hi else mid)


def build_tree(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: int | None = None,
    min_leaf: int = 1,
    max_features: int | None = None,
    rng: np.random.Generator | None = None,
    sample: np.ndarray | None = None,
    finder: SplitFinder | None = None,
) -> RegressionTree:
    """Grow a regression tree depth-first.

    ``sample`` lists training row indices (repeats allowed, as in a
    bootstrap). ``max_features`` draws that many candidate features per
    node; if none of them admits a split, further disjoint draws are tried.
    """
    finder = finder or SplitFinder(X)
    y = np.asarray(y, dtype=np.float64)
    p = finder.X.shape[1]
    idx0 = np.arange(len(y)) if sample is None else np.asarray(sample)
    all_features = np.arange(p)
    k = p if max_features is None else max(1, min(int(max_features), p))

    feature, threshold, left, right, value, n_samples, gain = [], [], [], [], [], [], []

    def new_node(rows):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(float(y[rows].mean()))
        n_samples.append(len(rows))
        gain.append(0.0)
        return len(feature) - 1

    root = new_node(idx0)
    stack = [(root, idx0, 0)]
    while stack:
        node, rows, depth = stack.pop()
        if max_depth is not None and depth >= max_depth:
            continue
        yr = y[rows]
        if len(rows) < 2 * min_leaf or np.ptp(yr) == 0:
            continue
        if k < p:
            perm = rng.permutation(p)
            split = None
            for start in range(0, p, k):
                feats = np.sort(perm[start : start + k])
                split = finder.find(rows, yr, feats, min_leaf)
                if split is not None:
                    break
        else:
            split = finder.find(rows, yr, all_features, min_leaf)
        if split is None or split[0] <= 0:
            continue
        g, f, t = split
        go_left = finder.X[rows, f] <= t
        lrows, rrows = rows[go_left], rows[~go_left]
        feature[node], threshold[node], gain[node] = f, t, g
        lchild = new_node(lrows)
        rchild = new_node(rrows)
        left[node], right[node] = lchild, rchild
        stack.append((rchild, rrows, depth + 1))
        stack.append((lchild, lrows, depth + 1))

    return RegressionTree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.array(value, dtype=np.float64),
        n_samples=np.array(n_samples, dtype=np.int64),
        gain=np.array(gain, dtype=np.float64),
    )


def best_split(X, y, min_leaf: int = 1):
    """Best split of the whole of ``X, y``; thin wrapper for testing."""
    X = np.asarray(X, dtype=np.float64)
    finder = SplitFinder(X)
    return finder.find(np.arange(len(y)), np.asarray(y, dtype=np.float64),
                       np.arange(X.shape[1]), min_leaf)
