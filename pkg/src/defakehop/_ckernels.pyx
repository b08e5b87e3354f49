# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels.

Mirrors defakehop._pykernels operation for operation; the arithmetic is
ordered identically (sequential prefix sums, first-occurrence tie breaks)
so that both backends produce bit-identical results.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "compiled"


def extract_windows(cnp.float64_t[:, :, :, ::1] x, int kh, int kw):
    cdef Py_ssize_t n = x.shape[0], h = x.shape[1], w = x.shape[2], c = x.shape[3]
    cdef Py_ssize_t oh = h - kh + 1, ow = w - kw + 1
    out_arr = np.empty((n, oh, ow, kh * kw * c), dtype=np.float64)
    cdef cnp.float64_t[:, :, :, ::1] out = out_arr
    cdef Py_ssize_t b, i, j, p, q, ch, pos
    for b in range(n):
        for i in range(oh):
            for j in range(ow):
                pos = 0
                for p in range(kh):
                    for q in range(kw):
                        for ch in range(c):
                            out[b, i, j, pos] = x[b, i + p, j + q, ch]
                            pos += 1
    return out_arr


def max_pool2(cnp.float64_t[:, :, :, ::1] x):
    cdef Py_ssize_t n = x.shape[0], h = x.shape[1], w = x.shape[2], c = x.shape[3]
    cdef Py_ssize_t oh = (h + 1) // 2, ow = (w + 1) // 2
    out_arr = np.empty((n, oh, ow, c), dtype=np.float64)
    cdef cnp.float64_t[:, :, :, ::1] out = out_arr
    cdef Py_ssize_t b, i, j, ch, p, q, pmax, qmax
    cdef cnp.float64_t m, v
    for b in range(n):
        for i in range(oh):
            pmax = 2 if 2 * i + 2 <= h else 1
            for j in range(ow):
                qmax = 2 if 2 * j + 2 <= w else 1
                for ch in range(c):
                    m = x[b, 2 * i, 2 * j, ch]
                    for p in range(pmax):
                        for q in range(qmax):
                            v = x[b, 2 * i + p, 2 * j + q, ch]
                            if v > m:
                                m = v
                    out[b, i, j, ch] = m
    return out_arr


def build_tree(cnp.float64_t[:, ::1] X, cnp.int64_t[:, ::1] sort_idx,
               cnp.float64_t[::1] g, cnp.float64_t[::1] h,
               int max_depth, double lam, double min_child_weight):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1]
    cdef Py_ssize_t max_nodes = 1
    cdef int depth
    for depth in range(max_depth):
        max_nodes = 2 * max_nodes + 1

    feature_arr = np.full(max_nodes, -1, dtype=np.int64)
    threshold_arr = np.zeros(max_nodes, dtype=np.float64)
    left_arr = np.full(max_nodes, -1, dtype=np.int64)
    right_arr = np.full(max_nodes, -1, dtype=np.int64)
    value_arr = np.zeros(max_nodes, dtype=np.float64)
    leaf_arr = np.ones(max_nodes, dtype=np.uint8)
    node_of_arr = np.zeros(n, dtype=np.int64)

    cdef cnp.int64_t[::1] feature = feature_arr
    cdef cnp.float64_t[::1] threshold = threshold_arr
    cdef cnp.int64_t[::1] left = left_arr
    cdef cnp.int64_t[::1] right = right_arr
    cdef cnp.float64_t[::1] value = value_arr
    cdef cnp.uint8_t[::1] leaf = leaf_arr
    cdef cnp.int64_t[::1] node_of = node_of_arr

    # per-active-node scratch, indexed by slot (position in the active list)
    slot_arr = np.full(max_nodes, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] slot = slot_arr  # node id -> slot, -1 if inactive
    cdef cnp.float64_t[::1] G = np.zeros(max_nodes, dtype=np.float64)
    cdef cnp.float64_t[::1] H = np.zeros(max_nodes, dtype=np.float64)
    cdef cnp.float64_t[::1] gl_run = np.zeros(max_nodes, dtype=np.float64)
    cdef cnp.float64_t[::1] hl_run = np.zeros(max_nodes, dtype=np.float64)
    cdef cnp.float64_t[::1] prev_val = np.zeros(max_nodes, dtype=np.float64)
    cdef cnp.int64_t[::1] cnt = np.zeros(max_nodes, dtype=np.int64)
    cdef cnp.float64_t[::1] best_gain = np.zeros(max_nodes, dtype=np.float64)
    cdef cnp.int64_t[::1] best_feat = np.zeros(max_nodes, dtype=np.int64)
    cdef cnp.float64_t[::1] best_thr = np.zeros(max_nodes, dtype=np.float64)
    cdef cnp.int64_t[::1] active = np.zeros(max_nodes, dtype=np.int64)
    cdef cnp.int64_t[::1] next_active = np.zeros(max_nodes, dtype=np.int64)

    cdef Py_ssize_t n_active = 1, n_next, n_nodes = 1
    cdef Py_ssize_t i, j, t, s, nid, lid, rid
    cdef double Gn, Hn, gl, hl, v, gain, thr, a
    active[0] = 0

    for depth in range(max_depth + 1):
        if n_active == 0:
            break
        for s in range(n_active):
            nid = active[s]
            slot[nid] = s
            G[nid] = 0.0
            H[nid] = 0.0
        for i in range(n):
            nid = node_of[i]
            if slot[nid] >= 0:
                G[nid] = G[nid] + g[i]
                H[nid] = H[nid] + h[i]
        if depth == max_depth:
            for s in range(n_active):
                nid = active[s]
                value[nid] = -G[nid] / (H[nid] + lam)
                slot[nid] = -1
            break
        for s in range(n_active):
            nid = active[s]
            best_gain[nid] = 0.0
            best_feat[nid] = -1
        for j in range(d):
            for s in range(n_active):
                nid = active[s]
                gl_run[nid] = 0.0
                hl_run[nid] = 0.0
                cnt[nid] = 0
            for t in range(n):
                i = sort_idx[j, t]
                nid = node_of[i]
                if slot[nid] < 0:
                    continue
                v = X[i, j]
                if cnt[nid] >= 1 and prev_val[nid] < v:
                    gl = gl_run[nid]
                    hl = hl_run[nid]
                    Gn = G[nid]
                    Hn = H[nid]
                    if hl >= min_child_weight and Hn - hl >= min_child_weight:
                        gain = (gl * gl / (hl + lam)
                                + (Gn - gl) * (Gn - gl) / (Hn - hl + lam)
                                - Gn * Gn / (Hn + lam))
                        if gain > best_gain[nid]:
                            best_gain[nid] = gain
                            best_feat[nid] = j
                            a = prev_val[nid]
                            thr = 0.5 * (a + v)
                            if not thr < v:
                                thr = a
                            best_thr[nid] = thr
                gl_run[nid] = gl_run[nid] + g[i]
                hl_run[nid] = hl_run[nid] + h[i]
                prev_val[nid] = v
                cnt[nid] = cnt[nid] + 1
        n_next = 0
        for s in range(n_active):
            nid = active[s]
            if best_feat[nid] < 0:
                value[nid] = -G[nid] / (H[nid] + lam)
            else:
                lid = n_nodes
                rid = n_nodes + 1
                n_nodes += 2
                feature[nid] = best_feat[nid]
                threshold[nid] = best_thr[nid]
                left[nid] = lid
                right[nid] = rid
                leaf[nid] = 0
                next_active[n_next] = lid
                next_active[n_next + 1] = rid
                n_next += 2
        for i in range(n):
            nid = node_of[i]
            if slot[nid] >= 0 and leaf[nid] == 0:
                if X[i, feature[nid]] <= threshold[nid]:
                    node_of[i] = left[nid]
                else:
                    node_of[i] = right[nid]
        for s in range(n_active):
            slot[active[s]] = -1
        for s in range(n_next):
            active[s] = next_active[s]
        n_active = n_next

    return (
        feature_arr[:n_nodes].copy(),
        threshold_arr[:n_nodes].copy(),
        left_arr[:n_nodes].copy(),
        right_arr[:n_nodes].copy(),
        value_arr[:n_nodes].copy(),
        leaf_arr[:n_nodes].copy(),
        node_of_arr,
    )


def predict_margins(cnp.float64_t[:, ::1] X,
                    cnp.int64_t[::1] feature, cnp.float64_t[::1] threshold,
                    cnp.int64_t[::1] left, cnp.int64_t[::1] right,
                    cnp.float64_t[::1] value, cnp.uint8_t[::1] is_leaf,
                    cnp.int64_t[::1] tree_starts,
                    double learning_rate, double base_score):
    cdef Py_ssize_t n = X.shape[0], n_trees = tree_starts.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef cnp.float64_t[::1] out = out_arr
    cdef Py_ssize_t i, t
    cdef cnp.int64_t node
    cdef double m
    for i in range(n):
        m = base_score
        for t in range(n_trees):
            node = tree_starts[t]
            while is_leaf[node] == 0:
                if X[i, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            m += learning_rate * value[node]
        out[i] = m
    return out_arr
