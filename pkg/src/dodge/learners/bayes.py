from __future__ import annotations

import numpy as np

from .base import LearnerSpec, TrainedModel

# alpha = 0 would give log(0) for unseen features
_MIN_ALPHA = 1e-10


class MultinomialNB(TrainedModel):
    """Multinomial naive Bayes with additive smoothing.

    Negative feature values are clipped to zero, at fit and at predict time.
    """

    def __init__(self, spec: LearnerSpec, X, y, seed: int = 0):
        self.spec = spec
        self.training_feature_count = X.shape[1]
        alpha = max(float(spec.params["alpha"]), _MIN_ALPHA)
        X = np.clip(X, 0.0, None)
        self.class_log_prior = np.log(np.array([np.mean(~y), np.mean(y)]))
        counts = np.vstack([X[~y].sum(axis=0), X[y].sum(axis=0)]) + alpha
        self.feature_log_prob = np.log(counts / counts.sum(axis=1, keepdims=True))

    def joint_log_likelihood(self, X):
        return np.clip(X, 0.0, None) @ self.feature_log_prob.T + self.class_log_prior

    def _proba(self, X):
        jll = self.joint_log_likelihood(X)
        # P(positive) = 1 / (1 + exp(jll_neg - jll_pos))
        return 1.0 / (1.0 + np.exp(np.clip(jll[:, 0] - jll[:, 1], -700, 700)))
