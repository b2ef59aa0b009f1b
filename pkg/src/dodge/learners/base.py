"""Learner specifications, parameter ranges and the shared model contract."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np


class LearnerKind(str, enum.Enum):
    DECISION_TREE = "DECISION_TREE"
    RANDOM_FOREST = "RANDOM_FOREST"
    LOGISTIC_REGRESSION = "LOGISTIC_REGRESSION"
    MULTINOMIAL_NB = "MULTINOMIAL_NB"
    KNN = "KNN"
    LINEAR_SVM = "LINEAR_SVM"


@dataclass(frozen=True)
class Real:
    lo: float
    hi: float

    def contains(self, v) -> bool:
        return isinstance(v, (int, float)) and not isinstance(v, bool) and self.lo <= v <= self.hi


@dataclass(frozen=True)
class Int:
    lo: int
    hi: int

    def contains(self, v) -> bool:
        return isinstance(v, (int, np.integer)) and not isinstance(v, bool) and self.lo <= v <= self.hi


@dataclass(frozen=True)
class Choice:
    values: tuple

    def contains(self, v) -> bool:
        return v in self.values


# Hyperparameter ranges of the tuned learners.
PARAM_RANGES: dict[LearnerKind, dict[str, Real | Int | Choice]] = {
    LearnerKind.DECISION_TREE: {
        "min_samples_split": Real(0.0, 1.0),
        "criterion": Choice(("gini", "entropy")),
        "splitter": Choice(("best", "random")),
    },
    LearnerKind.RANDOM_FOREST: {
        "n_estimators": Int(50, 150),
        "criterion": Choice(("gini", "entropy")),
        "min_samples_split": Real(0.0, 1.0),
    },
    LearnerKind.LOGISTIC_REGRESSION: {
        "penalty": Choice(("l1", "l2")),
        "tol": Real(0.0, 0.1),
        "C": Int(1, 500),
    },
    LearnerKind.MULTINOMIAL_NB: {
        "alpha": Real(0.0, 0.1),
    },
    LearnerKind.KNN: {
        "n_neighbors": Int(2, 25),
        "weights": Choice(("uniform", "distance")),
        "metric": Choice(("minkowski", "chebyshev")),
        "p": Int(1, 15),
    },
    LearnerKind.LINEAR_SVM: {
        "C": Real(1.0, 1.0),
        "epochs": Int(200, 200),
    },
}

# Untuned settings; every value sits inside its range above.
DEFAULTS: dict[LearnerKind, dict[str, Any]] = {
    LearnerKind.DECISION_TREE: {"min_samples_split": 0.0, "criterion": "gini", "splitter": "best"},
    LearnerKind.RANDOM_FOREST: {"n_estimators": 100, "criterion": "gini", "min_samples_split": 0.0},
    LearnerKind.LOGISTIC_REGRESSION: {"penalty": "l2", "tol": 1e-4, "C": 1},
    LearnerKind.MULTINOMIAL_NB: {"alpha": 0.1},
    LearnerKind.KNN: {"n_neighbors": 5, "weights": "uniform", "metric": "minkowski", "p": 2},
    LearnerKind.LINEAR_SVM: {"C": 1.0, "epochs": 200},
}


class InvalidParams(ValueError):
    pass


@dataclass(frozen=True)
class LearnerSpec:
    kind: LearnerKind
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        kind = LearnerKind(self.kind)
        object.__setattr__(self, "kind", kind)
        ranges = PARAM_RANGES[kind]
        merged = dict(DEFAULTS[kind])
        for name, v in dict(self.params).items():
            if name not in ranges:
                raise InvalidParams(f"{kind.value}: unknown parameter {name!r}")
            if isinstance(v, np.generic):
                v = v.item()
            if not ranges[name].contains(v):
                raise InvalidParams(f"{kind.value}: {name}={v!r} outside {ranges[name]}")
            merged[name] = v
        object.__setattr__(self, "params", merged)

    @classmethod
    def default(cls, kind) -> "LearnerSpec":
        return cls(LearnerKind(kind))

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "params": dict(self.params)}


class DimensionMismatch(ValueError):
    pass


class TrainedModel:
    """A fitted classifier. Subclasses implement ``_proba`` on a checked matrix."""

    spec: LearnerSpec
    training_feature_count: int

    def _check(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.ndim != 2 or X.shape[1] != self.training_feature_count:
            raise DimensionMismatch(
                f"expected {self.training_feature_count} features, got {X.shape[-1]}"
            )
        return X

    def predict_proba(self, X) -> np.ndarray:
        """Probability of the positive class for each row."""
        return self._proba(self._check(X))

    def predict(self, X) -> np.ndarray:
        return self.predict_proba(X) > 0.5

    def predict_one(self, row) -> bool:
        return bool(self.predict(np.asarray(row, dtype=float).reshape(1, -1))[0])

    def _proba(self, X: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError


class ConstantModel(TrainedModel):
    def __init__(self, spec: LearnerSpec, n_features: int, label: bool):
        self.spec = spec
        self.training_feature_count = n_features
        self.label = bool(label)

    def _proba(self, X):
        return np.full(X.shape[0], 1.0 if self.label else 0.0)
