"""Latent Dirichlet allocation by collapsed Gibbs sampling.

``learning_decay``, ``learning_offset`` and ``batch_size`` only mean something
to online variational Bayes; the Gibbs sampler accepts and ignores them. Pass
``method="online"`` to use scikit-learn's online variational implementation,
which does consume them.
"""
from __future__ import annotations

import numpy as np
from numba import njit

# a zero Dirichlet prior makes the sampler's conditionals improper
_MIN_PRIOR = 1e-6


@njit(cache=True)
def _sweeps(words, docs, z, n_dk, n_kw, n_k, alpha, beta, iterations, seed, fixed_topics):
    np.random.seed(seed)
    K = n_dk.shape[1]
    V = n_kw.shape[1]
    p = np.empty(K)
    for _ in range(iterations):
        for i in range(words.shape[0]):
            w = words[i]
            d = docs[i]
            k = z[i]
            n_dk[d, k] -= 1
            if not fixed_topics:
                n_kw[k, w] -= 1
                n_k[k] -= 1
            total = 0.0
            for t in range(K):
                p[t] = (n_dk[d, t] + alpha) * (n_kw[t, w] + beta) / (n_k[t] + V * beta)
                total += p[t]
            u = np.random.random() * total
            k = 0
            acc = p[0]
            while acc < u and k < K - 1:
                k += 1
                acc += p[k]
            z[i] = k
            n_dk[d, k] += 1
            if not fixed_topics:
                n_kw[k, w] += 1
                n_k[k] += 1


def _flatten(M: np.ndarray):
    counts = M.astype(np.int64)
    docs, words = np.nonzero(counts)
    reps = counts[docs, words]
    return np.repeat(words, reps).astype(np.int64), np.repeat(docs, reps).astype(np.int64)


def _theta(n_dk, alpha):
    K = n_dk.shape[1]
    return (n_dk + alpha) / (n_dk.sum(axis=1, keepdims=True) + K * alpha)


class GibbsLDA:
    def __init__(self, n_topics: int, doc_topic_prior: float, topic_word_prior: float, iterations: int = 200, seed: int = 0):
        if n_topics < 2:
            raise ValueError("need at least 2 topics")
        self.n_topics = n_topics
        self.alpha = max(float(doc_topic_prior), _MIN_PRIOR)
        self.beta = max(float(topic_word_prior), _MIN_PRIOR)
        self.iterations = iterations
        self.seed = seed

    def fit_transform(self, counts: np.ndarray) -> np.ndarray:
        """Sample topics for a document-by-term count matrix; returns doc-topic rows."""
        D, V = counts.shape
        K = self.n_topics
        words, docs = _flatten(counts)
        rng = np.random.default_rng(self.seed)
        z = rng.integers(0, K, words.size).astype(np.int64)
        n_dk = np.zeros((D, K), np.int64)
        n_kw = np.zeros((K, V), np.int64)
        np.add.at(n_dk, (docs, z), 1)
        np.add.at(n_kw, (z, words), 1)
        n_k = n_kw.sum(axis=1)
        _sweeps(words, docs, z, n_dk, n_kw, n_k, self.alpha, self.beta, self.iterations, self.seed, False)
        self.n_kw = n_kw
        self.n_k = n_k
        return _theta(n_dk, self.alpha)

    @property
    def topic_word(self) -> np.ndarray:
        V = self.n_kw.shape[1]
        return (self.n_kw + self.beta) / (self.n_k[:, None] + V * self.beta)

    def transform(self, counts: np.ndarray) -> np.ndarray:
        """Fold in unseen documents against the fitted topic-word counts."""
        D = counts.shape[0]
        K = self.n_topics
        words, docs = _flatten(counts)
        z = np.random.default_rng(self.seed + 1).integers(0, K, words.size).astype(np.int64)
        n_dk = np.zeros((D, K), np.int64)
        np.add.at(n_dk, (docs, z), 1)
        # fixed_topics keeps the fitted counts read-only; pass copies anyway
        _sweeps(words, docs, z, n_dk, self.n_kw.copy(), self.n_k.copy(), self.alpha, self.beta,
                max(1, self.iterations // 4), self.seed + 1, True)
        return _theta(n_dk, self.alpha)


class OnlineLDA:
    def __init__(self, n_topics, doc_topic_prior, topic_word_prior, learning_decay, learning_offset, batch_size, seed=0):
        from sklearn.decomposition import LatentDirichletAllocation

        self.model = LatentDirichletAllocation(
            n_components=n_topics,
            doc_topic_prior=max(float(doc_topic_prior), _MIN_PRIOR),
            topic_word_prior=max(float(topic_word_prior), _MIN_PRIOR),
            learning_method="online",
            learning_decay=learning_decay,
            learning_offset=learning_offset,
            batch_size=batch_size,
            random_state=seed % (2**32),
        )

    def fit_transform(self, counts):
        return self._norm(self.model.fit_transform(counts))

    def transform(self, counts):
        return self._norm(self.model.transform(counts))

    @staticmethod
    def _norm(theta):
        return theta / theta.sum(axis=1, keepdims=True)


def lda_fit_transform(counts: np.ndarray, n_topics: int, doc_topic_prior: float, topic_word_prior: float,
                      iterations: int = 200, seed: int = 0) -> np.ndarray:
    return GibbsLDA(n_topics, doc_topic_prior, topic_word_prior, iterations, seed).fit_transform(counts)
