from __future__ import annotations

import numpy as np
from numba import njit

from .base import LearnerSpec, TrainedModel

CHEBYSHEV = -1


@njit(cache=True)
def _knn(Q, X, p, k):
    """The ``k`` nearest training rows of every query row, nearest first.

    ``p`` is the Minkowski order, or CHEBYSHEV. Minkowski ranking uses the
    p-th power sum (monotone in the distance); only kept neighbours are
    rooted. Equal distances keep training-row order.
    """
    nq, n = Q.shape[0], X.shape[0]
    idx = np.empty((nq, k), np.int64)
    dist = np.empty((nq, k))
    for q in range(nq):
        buf_d = np.full(k, np.inf)
        buf_i = np.full(k, -1, np.int64)
        filled = 0
        for j in range(n):
            s = 0.0
            for f in range(X.shape[1]):
                a = abs(Q[q, f] - X[j, f])
                if p == CHEBYSHEV:
                    if a > s:
                        s = a
                else:
                    t = a
                    for _ in range(p - 1):
                        t *= a
                    s += t
            if filled == k and s >= buf_d[k - 1]:
                continue
            pos = filled if filled < k else k - 1
            while pos > 0 and buf_d[pos - 1] > s:
                buf_d[pos] = buf_d[pos - 1]
                buf_i[pos] = buf_i[pos - 1]
                pos -= 1
            buf_d[pos] = s
            buf_i[pos] = j
            if filled < k:
                filled += 1
        for m in range(k):
            idx[q, m] = buf_i[m]
            if p == CHEBYSHEV or p == 1:
                dist[q, m] = buf_d[m]
            else:
                dist[q, m] = buf_d[m] ** (1.0 / p)
    return idx, dist


class KNN(TrainedModel):
    """k-nearest-neighbour vote under Minkowski-p or Chebyshev distance.

    Neighbour ties are broken by training-row order. With ``weights="distance"``
    any training row at distance zero outvotes all others.
    """

    def __init__(self, spec: LearnerSpec, X, y, seed: int = 0):
        self.spec = spec
        self.training_feature_count = X.shape[1]
        self.X = np.ascontiguousarray(X, dtype=np.float64)
        self.y = np.asarray(y, dtype=bool)
        p = spec.params
        self.k = min(int(p["n_neighbors"]), len(self.y))
        self.weights = p["weights"]
        self.metric = p["metric"]
        self.p = int(p["p"])

    def neighbors(self, X):
        order = CHEBYSHEV if self.metric == "chebyshev" else self.p
        return _knn(np.ascontiguousarray(X, dtype=np.float64), self.X, order, self.k)

    def _proba(self, X):
        order, dist = self.neighbors(X)
        votes = self.y[order].astype(float)
        if self.weights == "uniform":
            return votes.mean(axis=1)
        exact = dist == 0
        with np.errstate(divide="ignore"):
            w = np.where(exact.any(axis=1, keepdims=True), exact.astype(float), 1.0 / dist)
        return (w * votes).sum(axis=1) / w.sum(axis=1)
