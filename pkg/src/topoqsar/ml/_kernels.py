"""Numeric inner loops, compiled with numba when it is importable.

The split search mirrors the numpy implementation in ``tree.py``; the lasso
loop runs uncompiled (slowly) without numba."""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    njit = None

AVAILABLE = njit is not None

# relative gap below which two split gains are treated as equal
TIE_RTOL = 1e-12


def _node_split(X, idx, y, features, min_leaf, binary, use_bits, bit_ptr, bit_cols):
    """Return (gain, feature, threshold); feature -1 when nothing qualifies.

    Features are visited in ascending order and a gain must exceed the
    incumbent by more than TIE_RTOL (relative) to replace it, so ties, even
    ones blurred by summation order, keep the lowest feature and, within a
    feature, the lowest threshold.
    """
    n = idx.shape[0]
    mean = 0.0
    for i in range(n):
        mean += y[i]
    mean /= n
    yc = np.empty(n)
    for i in range(n):
        yc[i] = y[i] - mean

    p = X.shape[1]
    n_set = np.zeros(p, dtype=np.int64)
    s_set = np.zeros(p)
    if use_bits:
        for i in range(n):
            r = idx[i]
            for q in range(bit_ptr[r], bit_ptr[r + 1]):
                c = bit_cols[q]
                n_set[c] += 1
                s_set[c] += yc[i]

    best_gain = -1.0  # gains are >= 0; a finite sentinel keeps the tie test NaN-free
    best_feat = -1
    best_thr = 0.0
    vals = np.empty(n)
    for f in features:
        if use_bits and binary[f]:
            nr = n_set[f]
            nl = n - nr
            if nl >= min_leaf and nr >= min_leaf:
                g = s_set[f] * s_set[f] * n / (nl * nr)
                if g > best_gain + TIE_RTOL * abs(best_gain):
                    best_gain, best_feat, best_thr = g, f, 0.5
            continue
        for i in range(n):
            vals[i] = X[idx[i], f]
        order = np.argsort(vals, kind="mergesort")
        sl = 0.0
        for j in range(n - 1):
            sl += yc[order[j]]
            nl = j + 1
            if nl < min_leaf:
                continue
            if n - nl < min_leaf:
                break
            lo = vals[order[j]]
            hi = vals[order[j + 1]]
            if hi <= lo:
                continue
            g = sl * sl * n / (nl * (n - nl))
            if g > best_gain + TIE_RTOL * abs(best_gain):
                mid = lo + (hi - lo) / 2.0
                best_gain, best_feat = g, f
                best_thr = lo if mid >= hi else mid
    return best_gain, best_feat, best_thr


if AVAILABLE:
    node_split = njit(cache=True, nogil=True)(_node_split)
else:  # pragma: no cover
    node_split = None


def _lasso_path(G, c, lambdas, tol, max_sweeps):
    """Covariance coordinate descent with warm starts along ``lambdas``.

    Minimises (1/2) b'Gb - c'b + lam |b|_1, i.e. the lasso on a standardised
    problem with G = Z'Z/n and c = Z'y/n. Returns (betas, converged, sweeps).
    """
    p = c.shape[0]
    m = lambdas.shape[0]
    beta = np.zeros(p)
    betas = np.zeros((m, p))
    converged = np.zeros(m, dtype=np.bool_)
    sweeps_used = np.zeros(m, dtype=np.int64)
    for i in range(m):
        lam = lambdas[i]
        sweeps = 0
        ok = False
        while sweeps < max_sweeps:
            sweeps += 1
            max_delta = 0.0
            for j in range(p):
                gjj = G[j, j]
                if gjj <= 0.0:
                    continue
                rho = c[j]
                for k in range(p):
                    rho -= G[j, k] * beta[k]
                rho = (rho + gjj * beta[j]) / gjj
                cut = lam / gjj
                if rho > cut:
                    new = rho - cut
                elif rho < -cut:
                    new = rho + cut
                else:
                    new = 0.0
                delta = abs(new - beta[j])
                if delta > max_delta:
                    max_delta = delta
                beta[j] = new
            if max_delta < tol:
                ok = True
                break
        betas[i] = beta
        converged[i] = ok
        sweeps_used[i] = sweeps
    return betas, converged, sweeps_used


lasso_path = njit(cache=True, nogil=True)(_lasso_path) if AVAILABLE else _lasso_path
