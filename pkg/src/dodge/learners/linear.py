from __future__ import annotations

import numpy as np
from scipy.special import expit

from .base import LearnerSpec, TrainedModel

MAX_EPOCHS = 500


def _standardize(X):
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd[sd == 0] = 1.0
    return mu, sd


def _logloss(z, y):
    # mean of log(1 + exp(-s z)) with s = +-1, computed stably
    s = np.where(y, 1.0, -1.0)
    return float(np.mean(np.logaddexp(0.0, -s * z)))


class LogisticRegression(TrainedModel):
    """Penalized logistic regression fitted by full-batch (proximal) gradient descent.

    Minimizes ``mean logloss + penalty(w) / (C * n)`` on standardized features,
    with ``penalty`` either ``|w|_1`` (soft-thresholding step) or ``|w|^2 / 2``.
    The step size is ``1/L`` for the smooth part, so the objective never
    increases between epochs. Stops when it improves by less than ``tol``.
    """

    def __init__(self, spec: LearnerSpec, X, y, seed: int = 0):
        self.spec = spec
        n, f = X.shape
        self.training_feature_count = f
        p = spec.params
        self.mu, self.sd = _standardize(X)
        Z = np.hstack([(X - self.mu) / self.sd, np.ones((n, 1))])
        lam = 1.0 / (float(p["C"]) * n)
        l1 = p["penalty"] == "l1"
        lipschitz = 0.25 * np.linalg.norm(Z, 2) ** 2 / n + (0.0 if l1 else lam)
        step = 1.0 / lipschitz
        yf = y.astype(float)
        w = np.zeros(f + 1)

        def objective(w):
            reg = np.abs(w[:-1]).sum() if l1 else 0.5 * float(w[:-1] @ w[:-1])
            return _logloss(Z @ w, y) + lam * reg

        self.loss_history = [objective(w)]
        for _ in range(MAX_EPOCHS):
            grad = Z.T @ (expit(Z @ w) - yf) / n
            if not l1:
                grad[:-1] += lam * w[:-1]
            w = w - step * grad
            if l1:
                w[:-1] = np.sign(w[:-1]) * np.maximum(np.abs(w[:-1]) - step * lam, 0.0)
            self.loss_history.append(objective(w))
            if abs(self.loss_history[-2] - self.loss_history[-1]) < p["tol"]:
                break
        self.coef = w[:-1] / self.sd
        self.intercept = w[-1] - float(self.coef @ self.mu)

    def _proba(self, X):
        return expit(X @ self.coef + self.intercept)


class LinearSVM(TrainedModel):
    """Hinge-loss linear classifier trained by stochastic subgradient descent (Pegasos steps)."""

    def __init__(self, spec: LearnerSpec, X, y, seed: int):
        self.spec = spec
        n, f = X.shape
        self.training_feature_count = f
        self.mu, self.sd = _standardize(X)
        Z = np.hstack([(X - self.mu) / self.sd, np.ones((n, 1))])
        s = np.where(y, 1.0, -1.0)
        lam = 1.0 / (spec.params["C"] * n)
        rng = np.random.default_rng(seed)
        w = np.zeros(f + 1)
        t = 0
        for _ in range(spec.params["epochs"]):
            for i in rng.permutation(n):
                t += 1
                eta = 1.0 / (lam * t)
                margin = s[i] * (Z[i] @ w)
                w[:-1] *= 1.0 - eta * lam
                if margin < 1.0:
                    w += eta * s[i] * Z[i]
        self.w = w

    def decision_function(self, X):
        return ((X - self.mu) / self.sd) @ self.w[:-1] + self.w[-1]

    def _proba(self, X):
        return expit(self.decision_function(X))
