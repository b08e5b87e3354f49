"""Slow reference implementations the tests check the package against.

Everything here is written in the most obvious way possible (explicit
loops, no shared code with the package) so a bug in the implementation
cannot hide in its own oracle.
"""
import numpy as np


def jacobi_eigh(a, tol=1e-12, max_sweeps=60):
    """Eigenvalues/vectors of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues descending, eigenvectors as rows).
    """
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off < tol * max(1.0, np.trace(np.abs(a))):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # a <- J.T a J and v <- v J for the (p, q) rotation J,
                # applied as column then row updates
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp, rq = a[p].copy(), a[q].copy()
                a[p] = c * rp - s * rq
                a[q] = s * rp + c * rq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    evals = np.diag(a).copy()
    order = np.argsort(-evals, kind="stable")
    return evals[order], v[:, order].T


def windows_bruteforce(x, kh, kw):
    """All kh x kw sliding blocks of an (h, w, c) map, by explicit loops."""
    h, w, c = x.shape
    oh, ow = h - kh + 1, w - kw + 1
    out = np.empty((oh, ow, kh * kw * c))
    for i in range(oh):
        for j in range(ow):
            vec = []
            for di in range(kh):
                for dj in range(kw):
                    for ch in range(c):
                        vec.append(x[i + di, j + dj, ch])
            out[i, j] = vec
    return out


def maxpool_bruteforce(x):
    """2x2 ceil-mode max pooling of an (h, w, c) map, by explicit loops."""
    h, w, c = x.shape
    oh, ow = (h + 1) // 2, (w + 1) // 2
    out = np.empty((oh, ow, c))
    for i in range(oh):
        for j in range(ow):
            for ch in range(c):
                vals = []
                for di in range(2):
                    for dj in range(2):
                        if 2 * i + di < h and 2 * j + dj < w:
                            vals.append(x[2 * i + di, 2 * j + dj, ch])
                out[i, j, ch] = max(vals)
    return out


def best_stump_exhaustive(X, g, h, lam, min_child_weight):
    """Exhaustive depth-1 split search over every (feature, position).

    Same selection rules as the trainer: candidate positions need
    strictly distinct adjacent sorted values and both child hessian sums
    at or above min_child_weight; gain must be strictly positive; ties go
    to the lowest feature index, then the lowest position.  Returns
    (feature, threshold) or None if no split has positive gain.
    """
    n, d = X.shape
    G = 0.0
    H = 0.0
    for i in range(n):
        G += g[i]
        H += h[i]
    parent = G * G / (H + lam)
    best_gain = 0.0
    best = None
    for j in range(d):
        order = sorted(range(n), key=lambda i: (X[i, j], i))
        gl = 0.0
        hl = 0.0
        for k in range(n - 1):
            gl += g[order[k]]
            hl += h[order[k]]
            a = X[order[k], j]
            b = X[order[k + 1], j]
            if not a < b:
                continue
            if hl < min_child_weight or H - hl < min_child_weight:
                continue
            gain = gl * gl / (hl + lam) + (G - gl) ** 2 / (H - hl + lam) - parent
            if gain > best_gain:
                best_gain = gain
                thr = 0.5 * (a + b)
                if not thr < b:
                    thr = a
                best = (j, thr)
    return best


def tree_walk_predict(model, X):
    """Margin prediction by walking each tree node by node."""
    n = X.shape[0]
    margins = np.full(n, model.base_score)
    for i in range(n):
        for start in model.tree_starts:
            node = int(start)
            while not model.is_leaf[node]:
                j = int(model.feature[node])
                if X[i, j] <= model.threshold[node]:
                    node = int(model.left[node])
                else:
                    node = int(model.right[node])
            margins[i] += model.params.learning_rate * model.value[node]
    return margins


def pairwise_auc(scores, labels):
    """AUC as the O(n^2) count of correctly ordered (pos, neg) pairs."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y != 1]
    wins = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 1.0
            elif p == q:
                wins += 0.5
    return wins / (len(pos) * len(neg))
