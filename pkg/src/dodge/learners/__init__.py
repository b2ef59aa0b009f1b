"""Classifier zoo behind one train/predict contract."""
from __future__ import annotations

import numpy as np

from ..data import Dataset
from .base import (
    DEFAULTS,
    PARAM_RANGES,
    Choice,
    ConstantModel,
    DimensionMismatch,
    Int,
    InvalidParams,
    LearnerKind,
    LearnerSpec,
    Real,
    TrainedModel,
)
from .bayes import MultinomialNB
from .linear import LinearSVM, LogisticRegression
from .neighbors import KNN
from .trees import DecisionTree, RandomForest, fit_tree

_FITTERS = {
    LearnerKind.DECISION_TREE: DecisionTree,
    LearnerKind.RANDOM_FOREST: RandomForest,
    LearnerKind.LOGISTIC_REGRESSION: LogisticRegression,
    LearnerKind.MULTINOMIAL_NB: MultinomialNB,
    LearnerKind.KNN: KNN,
    LearnerKind.LINEAR_SVM: LinearSVM,
}


def train(spec: LearnerSpec, data: Dataset, seed: int = 0) -> TrainedModel:
    """Fit ``spec`` on ``data``; deterministic in ``(spec, data, seed)``.

    Single-class data yields a constant predictor.
    """
    if len(data) == 0:
        raise ValueError("cannot train on empty data")
    X = np.asarray(data.rows, dtype=float)
    y = np.asarray(data.labels, dtype=bool)
    if y.all() or not y.any():
        return ConstantModel(spec, X.shape[1], bool(y[0]))
    return _FITTERS[spec.kind](spec, X, y, seed)


def predict(model: TrainedModel, row) -> bool:
    return model.predict_one(row)


__all__ = [
    "DEFAULTS", "PARAM_RANGES", "Choice", "ConstantModel", "DimensionMismatch", "Int",
    "InvalidParams", "LearnerKind", "LearnerSpec", "Real", "TrainedModel", "DecisionTree",
    "RandomForest", "LogisticRegression", "MultinomialNB", "KNN", "LinearSVM", "train",
    "predict", "fit_tree",
]
