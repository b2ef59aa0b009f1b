"""The per-evaluation trainer shared by every optimizer.

One evaluation = fit the pre-processor on the training data, fit the learner
on its output, predict the (transformed, never oversampled) training rows and
score them. DODGE, random search, DE and the harness all go through
:class:`Evaluator`, so their evaluation counts are directly comparable.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Protocol

import numpy as np

from . import learners, preprocess
from .data import Dataset, Split, TextCorpus
from .learners import LearnerSpec
from .metrics import ConfusionCounts, Goal, GoalScore, d2h, false_positive_rate, popt20, recall
from .preprocess import PreprocSpec, TokenizedCorpus, tokenize_and_stem

log = logging.getLogger(__name__)


class Configured(Protocol):
    preproc: PreprocSpec
    learner: LearnerSpec


@dataclass(frozen=True)
class Pipeline:
    preproc: PreprocSpec
    learner: LearnerSpec

    def to_json(self) -> dict:
        return {"preproc": self.preproc.to_json(), "learner": self.learner.to_json()}


@dataclass(frozen=True)
class Evaluation:
    score: GoalScore
    metrics: dict[str, float]
    failed: bool = False
    error: str | None = None


def eval_seed(seed: int, index: int) -> int:
    """Seed handed to the pre-processor and learner of evaluation ``index``."""
    return int(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, index]).generate_state(1)[0])


def all_metrics(predicted, actual, loc=None) -> dict[str, float]:
    cc = ConfusionCounts.from_predictions(predicted, actual)
    out = {"recall": recall(cc), "fpr": false_positive_rate(cc), "d2h": d2h(cc).value}
    if loc is not None:
        out["popt20"] = popt20(predicted, actual, loc).value
    return out


def _prepare(data):
    return tokenize_and_stem(data) if isinstance(data, TextCorpus) else data


class Evaluator:
    """Scores configurations on one split; counts every training-set evaluation.

    ``holdout`` > 0 switches to internal validation: that fraction of the
    training rows is held back and scored instead of the rows fitted on.
    """

    def __init__(self, split: Split, goal, seed: int = 0, holdout: float = 0.0):
        self.goal = Goal.parse(goal)
        self.seed = seed
        self.train = _prepare(split.train)
        self.test_data = _prepare(split.test)
        self.fit_data, self.score_data = self.train, self.train
        if holdout > 0:
            n = len(self.train)
            perm = np.random.default_rng([seed, 7]).permutation(n)
            cut = max(1, int(round(holdout * n)))
            self.score_data = self.train.subset(np.sort(perm[:cut]))
            self.fit_data = self.train.subset(np.sort(perm[cut:]))
        if self.goal is Goal.POPT20 and getattr(self.train, "loc", None) is None:
            raise ValueError("popt20 needs lines of code in the training data")
        self.calls = 0

    def _fit_predict(self, config: Configured, fit_on, score_on, seed):
        ft = preprocess.fit(config.preproc, fit_on, seed)
        model = learners.train(config.learner, ft.train_output, seed)
        target = preprocess.apply(ft, score_on)
        return model.predict(target.rows), target

    def _score(self, predicted, target) -> tuple[GoalScore, dict]:
        loc = getattr(target, "loc", None)
        metrics = all_metrics(predicted, target.labels, loc)
        if self.goal is Goal.D2H:
            return GoalScore(Goal.D2H, metrics["d2h"]), metrics
        return popt20(predicted, target.labels, loc), metrics

    def evaluate(self, config: Configured, index: int) -> Evaluation:
        """Training-set score of ``config``; failures score the worst value."""
        self.calls += 1
        try:
            pred, target = self._fit_predict(config, self.fit_data, self.score_data, eval_seed(self.seed, index))
            score, metrics = self._score(pred, target)
            return Evaluation(score, metrics)
        except Exception as exc:  # a random configuration may simply not be trainable
            log.debug("evaluation %d failed: %s", index, exc)
            return Evaluation(GoalScore(self.goal, self.goal.worst), {}, failed=True, error=f"{type(exc).__name__}: {exc}")

    def test(self, config: Configured, index: int) -> Evaluation:
        """Refit ``config`` on all training data (same seed as evaluation ``index``) and score the test split."""
        try:
            pred, target = self._fit_predict(config, self.train, self.test_data, eval_seed(self.seed, index))
            score, metrics = self._score(pred, target)
            return Evaluation(score, metrics)
        except Exception as exc:
            return Evaluation(GoalScore(self.goal, self.goal.worst), {}, failed=True, error=f"{type(exc).__name__}: {exc}")


@dataclass
class EvalRecord:
    index: int
    choice: Any
    train_score: GoalScore
    redundant: bool = False
    phase: str = "RANDOM"
    metrics: dict = field(default_factory=dict)
    failed: bool = False

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "phase": self.phase,
            "choice": self.choice.to_json(),
            "train_score": self.train_score.value,
            "redundant": self.redundant,
            "failed": self.failed,
            "metrics": self.metrics,
        }


@dataclass
class TuningResult:
    best_choice: Any
    best_train_score: GoalScore
    test_score: GoalScore
    history: list[EvalRecord]
    evaluations_used: int
    test_metrics: dict = field(default_factory=dict)
    best_index: int = 1

    def summary(self) -> dict:
        return {
            "best_choice": self.best_choice.to_json(),
            "best_train_score": self.best_train_score.value,
            "test_score": self.test_score.value,
            "test_metrics": self.test_metrics,
            "evaluations": self.evaluations_used,
        }


def best_record(history: list[EvalRecord], goal: Goal) -> EvalRecord:
    """Best training score; the earliest record wins ties."""
    best = history[0]
    for rec in history[1:]:
        if goal.better(rec.train_score.value, best.train_score.value):
            best = rec
    return best


def finish(evaluator: Evaluator, history: list[EvalRecord]) -> TuningResult:
    best = best_record(history, evaluator.goal)
    test = evaluator.test(best.choice, best.index)
    return TuningResult(best.choice, best.train_score, test.score, history, len(history), test.metrics, best.index)
