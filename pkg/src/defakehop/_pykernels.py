"""Pure-numpy implementations of the hot kernels.

The compiled extension (``defakehop._ckernels``) implements the same four
functions with identical arithmetic; ``defakehop.backend`` picks one at
import time.  Bit-identical output between the two backends is a hard
contract (covered by tests/test_backends.py), so every accumulation here
is written in an explicitly ordered way: prefix sums use ``np.cumsum``
(sequential left-to-right) and never pairwise ``np.sum``.
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

NAME = "pure"


def extract_windows(x, kh, kw):
    """x: (n, h, w, c) float64 -> (n, h-kh+1, w-kw+1, kh*kw*c).

    Each output vector is the row-major (kh, kw, c) flattening of the
    block anchored at its position.
    """
    n, h, w, c = x.shape
    v = sliding_window_view(x, (kh, kw), axis=(1, 2))  # (n, oh, ow, c, kh, kw)
    v = np.moveaxis(v, 3, 5)  # (n, oh, ow, kh, kw, c)
    oh, ow = h - kh + 1, w - kw + 1
    return np.ascontiguousarray(v).reshape(n, oh, ow, kh * kw * c)


def max_pool2(x):
    """2x2 -> 1x1 max pooling, ceil mode (odd edges form partial windows)."""
    n, h, w, c = x.shape
    oh, ow = (h + 1) // 2, (w + 1) // 2
    xp = x
    if h % 2 or w % 2:
        xp = np.pad(
            x,
            ((0, 0), (0, 2 * oh - h), (0, 2 * ow - w), (0, 0)),
            constant_values=-np.inf,
        )
    return xp.reshape(n, oh, 2, ow, 2, c).max(axis=(2, 4))


def build_tree(X, sort_idx, g, h, max_depth, lam, min_child_weight):
    """Grow one regression tree on second-order logistic gradients.

    Exact greedy level-wise growth.  ``sort_idx[j]`` must be
    ``np.argsort(X[:, j], kind="stable")`` (value-ascending, ties by
    sample index).  Split thresholds sit at sample midpoints; candidate
    positions require strictly distinct adjacent values; gain must be
    strictly positive; ties resolve to the lowest feature index and then
    the lowest scan position.

    Returns (feature, threshold, left, right, value, is_leaf, leaf_of_sample).
    """
    n, d = X.shape
    feature = [-1]
    threshold = [0.0]
    left = [-1]
    right = [-1]
    value = [0.0]
    is_leaf = [True]
    node_of = np.zeros(n, dtype=np.int64)
    active = [0]

    for depth in range(max_depth + 1):
        if not active:
            break
        G = {}
        H = {}
        for nid in active:
            idxs = np.flatnonzero(node_of == nid)
            G[nid] = float(np.cumsum(g[idxs])[-1])
            H[nid] = float(np.cumsum(h[idxs])[-1])
        if depth == max_depth:
            for nid in active:
                value[nid] = -G[nid] / (H[nid] + lam)
            break
        next_active = []
        for nid in active:
            Gn, Hn = G[nid], H[nid]
            parent_term = Gn * Gn / (Hn + lam)
            best_gain = 0.0
            best = None
            for j in range(d):
                order = sort_idx[j]
                sel = order[node_of[order] == nid]
                if sel.size < 2:
                    continue
                vals = X[sel, j]
                gl = np.cumsum(g[sel])[:-1]
                hl = np.cumsum(h[sel])[:-1]
                valid = (
                    (vals[:-1] < vals[1:])
                    & (hl >= min_child_weight)
                    & (Hn - hl >= min_child_weight)
                )
                if not valid.any():
                    continue
                gains = (
                    gl * gl / (hl + lam)
                    + (Gn - gl) * (Gn - gl) / (Hn - hl + lam)
                    - parent_term
                )
                gains[~valid] = -np.inf
                k = int(np.argmax(gains))
                if gains[k] > best_gain:
                    best_gain = float(gains[k])
                    a, b = float(vals[k]), float(vals[k + 1])
                    thr = 0.5 * (a + b)
                    if not thr < b:
                        thr = a
                    best = (j, thr)
            if best is None:
                value[nid] = -Gn / (Hn + lam)
            else:
                j, thr = best
                lid = len(feature)
                rid = lid + 1
                for arr, fill in (
                    (feature, -1),
                    (threshold, 0.0),
                    (left, -1),
                    (right, -1),
                    (value, 0.0),
                    (is_leaf, True),
                ):
                    arr.extend([fill, fill])
                feature[nid] = j
                threshold[nid] = thr
                left[nid] = lid
                right[nid] = rid
                is_leaf[nid] = False
                idxs = np.flatnonzero(node_of == nid)
                go_left = X[idxs, j] <= thr
                node_of[idxs[go_left]] = lid
                node_of[idxs[~go_left]] = rid
                next_active.extend([lid, rid])
        active = next_active

    return (
        np.asarray(feature, dtype=np.int64),
        np.asarray(threshold, dtype=np.float64),
        np.asarray(left, dtype=np.int64),
        np.asarray(right, dtype=np.int64),
        np.asarray(value, dtype=np.float64),
        np.asarray(is_leaf, dtype=np.uint8),
        node_of,
    )


def predict_margins(
    X, feature, threshold, left, right, value, is_leaf, tree_starts, learning_rate, base_score
):
    """Margins = base_score + lr * sum of per-tree leaf values, in tree order."""
    n = X.shape[0]
    margins = np.full(n, base_score, dtype=np.float64)
    rows = np.arange(n)
    for start in tree_starts:
        node = np.full(n, start, dtype=np.int64)
        pending = is_leaf[node] == 0
        while pending.any():
            idx = rows[pending]
            nd = node[idx]
            go_left = X[idx, feature[nd]] <= threshold[nd]
            node[idx] = np.where(go_left, left[nd], right[nd])
            pending = is_leaf[node] == 0
        margins += learning_rate * value[node]
    return margins
