"""Compiled CART kernels shared by the decision tree and random forest."""
import numpy as np
from numba import njit

GINI = 0
ENTROPY = 1


@njit(cache=True)
def _impurity(pos, n, criterion):
    if n == 0:
        return 0.0
    p = pos / n
    if criterion == GINI:
        return 2.0 * p * (1.0 - p)
    h = 0.0
    if p > 0.0:
        h -= p * np.log2(p)
    if p < 1.0:
        h -= (1.0 - p) * np.log2(1.0 - p)
    return h


@njit(cache=True)
def _weighted_impurity(pos, n, criterion, xlogx):
    # n * impurity(pos / n); entropy via the table xlogx[k] = k * log2(k)
    if n == 0:
        return 0.0
    if criterion == GINI:
        return 2.0 * pos * (n - pos) / n
    return xlogx[n] - xlogx[pos] - xlogx[n - pos]


@njit(cache=True)
def _xlogx_table(n):
    t = np.zeros(n + 1)
    for k in range(2, n + 1):
        t[k] = k * np.log2(k)
    return t


@njit(cache=True)
def presort(X):
    """Row order of every feature, one column per feature."""
    out = np.empty((X.shape[0], X.shape[1]), np.int64)
    for f in range(X.shape[1]):
        out[:, f] = np.argsort(X[:, f], kind="mergesort")
    return out


@njit(cache=True)
def build_tree(X, y, weights, min_split, max_features, criterion, random_splitter, seed):
    """Grow one tree depth-first on rows weighted by ``weights`` (0 = absent).

    Returns parallel arrays (feature, threshold, left, right, value); a node
    with feature -1 is a leaf and ``value`` is its positive-class fraction.
    """
    np.random.seed(seed)
    return _grow(X, y, weights, presort(X), min_split, max_features, criterion, random_splitter)


@njit(cache=True)
def build_forest(X, y, seeds, bootstrap, min_split, max_features, criterion):
    """Grow one tree per seed; trees are stored back to back, tree ``t`` at ``offsets[t]``.

    A bootstrap sample is represented by per-row draw counts, which splits
    exactly like the duplicated rows would.
    """
    n = X.shape[0]
    n_trees = seeds.shape[0]
    order = presort(X)
    cap = n_trees * (2 * n + 1)
    feature = np.full(cap, -1, np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    value = np.zeros(cap)
    offsets = np.zeros(n_trees + 1, np.int64)
    w = np.empty(n, np.int64)
    for t in range(n_trees):
        np.random.seed(seeds[t])
        if bootstrap:
            w[:] = 0
            draws = np.random.randint(0, n, n)
            for i in range(n):
                w[draws[i]] += 1
        else:
            w[:] = 1
        f, th, l, r, v = _grow(X, y, w, order, min_split, max_features, criterion, False)
        o = offsets[t]
        m = f.shape[0]
        feature[o:o + m] = f
        threshold[o:o + m] = th
        left[o:o + m] = l
        right[o:o + m] = r
        value[o:o + m] = v
        offsets[t + 1] = o + m
    e = offsets[n_trees]
    return feature[:e], threshold[:e], left[:e], right[:e], value[:e], offsets


@njit(cache=True)
def predict_forest(X, feature, threshold, left, right, value, offsets):
    n_trees = offsets.shape[0] - 1
    out = np.zeros(X.shape[0])
    for i in range(X.shape[0]):
        for t in range(n_trees):
            o = offsets[t]
            node = 0
            while feature[o + node] >= 0:
                if X[i, feature[o + node]] <= threshold[o + node]:
                    node = left[o + node]
                else:
                    node = right[o + node]
            out[i] += value[o + node]
    return out / n_trees


@njit(cache=True)
def _grow(X, y, w, presorted, min_split, max_features, criterion, random_splitter):
    N = X.shape[0]
    n_features = X.shape[1]
    total = 0
    m = 0
    for i in range(N):
        total += w[i]
        if w[i] > 0:
            m += 1
    cap = 2 * m + 1
    feature = np.full(cap, -1, np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    value = np.zeros(cap)

    # idx holds the distinct rows present; each node owns a contiguous slice
    idx = np.empty(m, np.int64)
    k = 0
    for i in range(N):
        if w[i] > 0:
            idx[k] = i
            k += 1
    stack = np.empty((cap, 3), np.int64)
    top = 0
    stack[top, 0] = 0
    stack[top, 1] = 0
    stack[top, 2] = m
    top += 1
    n_nodes = 1
    feats = np.arange(n_features)
    rows = np.empty(m, np.int64)
    order = np.empty(m, np.int64)
    mark = np.full(N, -1, np.int64)
    xlogx = _xlogx_table(total)

    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        size = end - start
        n = 0
        pos = 0
        for i in range(start, end):
            r = idx[i]
            n += w[r]
            pos += w[r] * y[r]
            mark[r] = node
        value[node] = pos / n if n > 0 else 0.0
        if n < min_split or pos == 0 or pos == n:
            continue

        parent = _impurity(pos, n, criterion)
        best_gain = 1e-12
        best_f = -1
        best_t = 0.0
        np.random.shuffle(feats)
        visited = 0
        small = size * 8 < N
        for fi in range(n_features):
            if visited >= max_features:
                break
            f = feats[fi]
            lo = X[idx[start], f]
            hi = lo
            for i in range(start, end):
                v = X[idx[i], f]
                if v < lo:
                    lo = v
                if v > hi:
                    hi = v
            # a constant feature still counts toward max_features, as in CART
            visited += 1
            if hi <= lo:
                continue
            if random_splitter:
                t = lo + np.random.random() * (hi - lo)
                if t >= hi:
                    t = lo
                nl = 0
                pl = 0
                for i in range(start, end):
                    r = idx[i]
                    if X[r, f] <= t:
                        nl += w[r]
                        pl += w[r] * y[r]
                nr = n - nl
                if nl == 0 or nr == 0:
                    continue
                child = (_weighted_impurity(pl, nl, criterion, xlogx)
                         + _weighted_impurity(pos - pl, nr, criterion, xlogx)) / n
                gain = parent - child
                if gain > best_gain:
                    best_gain = gain
                    best_f = f
                    best_t = t
                continue
            # node rows in ascending order of feature f
            if small:
                for i in range(size):
                    order[i] = idx[start + i]
                vals = np.empty(size)
                for i in range(size):
                    vals[i] = X[order[i], f]
                o = np.argsort(vals, kind="mergesort")
                for i in range(size):
                    rows[i] = order[o[i]]
            else:
                k = 0
                for i in range(N):
                    r = presorted[i, f]
                    if mark[r] == node:
                        rows[k] = r
                        k += 1
            nl = 0
            pl = 0
            for i in range(size - 1):
                r = rows[i]
                nl += w[r]
                pl += w[r] * y[r]
                a = X[r, f]
                b = X[rows[i + 1], f]
                if b <= a:
                    continue
                nr = n - nl
                child = (_weighted_impurity(pl, nl, criterion, xlogx)
                         + _weighted_impurity(pos - pl, nr, criterion, xlogx)) / n
                gain = parent - child
                if gain > best_gain:
                    best_gain = gain
                    best_f = f
                    best_t = 0.5 * (a + b)
                    if best_t >= b:
                        best_t = a
        if best_f < 0:
            continue

        # partition idx[start:end] in place
        nl = 0
        for i in range(start, end):
            if X[idx[i], best_f] <= best_t:
                order[nl] = idx[i]
                nl += 1
        k = nl
        for i in range(start, end):
            if X[idx[i], best_f] > best_t:
                order[k] = idx[i]
                k += 1
        for i in range(size):
            idx[start + i] = order[i]

        feature[node] = best_f
        threshold[node] = best_t
        lc = n_nodes
        rc = n_nodes + 1
        n_nodes += 2
        left[node] = lc
        right[node] = rc
        stack[top, 0] = rc
        stack[top, 1] = start + nl
        stack[top, 2] = end
        top += 1
        stack[top, 0] = lc
        stack[top, 1] = start
        stack[top, 2] = start + nl
        top += 1

    return feature[:n_nodes], threshold[:n_nodes], left[:n_nodes], right[:n_nodes], value[:n_nodes]


@njit(cache=True)
def predict_tree(X, feature, threshold, left, right, value):
    out = np.empty(X.shape[0])
    for i in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]
    return out
