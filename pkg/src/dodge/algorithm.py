"""DODGE: tuning by deprecating options whose scores land within epsilon of earlier ones.

The first ``n1`` evaluations sample the option tree at random; the next
``n2`` follow the highest-weight branch, drawing numerics from ranges
narrowed towards the best value seen. After every evaluation the branch is
endorsed (+1) if its score is at least ``epsilon`` away from every retained
score, and deprecated (-1) otherwise. The best configuration on training data
is finally scored once on the test split.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Split
from .evaluate import EvalRecord, Evaluator, TuningResult, finish
from .metrics import Goal
from .space import OptionTree, TuningChoice, narrow_range, reweight, sample_random, weighted_descent


@dataclass(frozen=True)
class DodgeConfig:
    epsilon: float = 0.2
    n1: int = 12
    n2: int = 18
    goal: Goal = Goal.D2H
    seed: int = 0
    holdout: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "goal", Goal.parse(self.goal))
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.n1 < 1 or self.n2 < 0:
            raise ValueError("need n1 >= 1 and n2 >= 0")

    @property
    def maximize(self) -> bool:
        return self.goal.maximize

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @classmethod
    def with_budget(cls, n: int = 30, n1: int = 12, **kw) -> "DodgeConfig":
        return cls(n1=min(n1, n), n2=max(0, n - n1), **kw)


DodgeResult = TuningResult


def is_redundant(score: float, prior_scores, epsilon: float) -> bool:
    """True iff some prior score lies strictly within ``epsilon`` of ``score``."""
    return any(abs(score - s) < epsilon for s in prior_scores)


def _observe_numerics(tree: OptionTree, choice: TuningChoice, score: float, maximize: bool):
    for node_id, value in choice.numeric_values:
        tree.node(node_id).observe(value, score, maximize)


def _narrow_all(tree: OptionTree):
    # only leaves with two distinct observed values have a best/worst to narrow between
    for leaf in tree.numeric_leaves():
        if leaf.best_value is not None and leaf.best_value != leaf.worst_value:
            narrow_range(leaf, leaf.best_value, leaf.worst_value)


def run_dodge(config: DodgeConfig, split: Split | None, tree: OptionTree, evaluator: Evaluator | None = None) -> DodgeResult:
    """Run DODGE on ``split`` over ``tree`` (mutated in place: weights and ranges).

    Pass ``evaluator`` to share or instrument the trainer; otherwise one is
    built from ``split``.
    """
    if evaluator is None:
        evaluator = Evaluator(split, config.goal, config.seed, config.holdout)
    if split is not None and tree.task.value == "text" and not hasattr(evaluator.train, "tokens"):
        raise ValueError("text option tree needs a text split")
    rng = np.random.default_rng([config.seed, 1])
    retained: list[float] = []
    history: list[EvalRecord] = []
    for i in range(1, config.n + 1):
        if i <= config.n1:
            phase, choice = "RANDOM", sample_random(tree, rng)
        else:
            _narrow_all(tree)
            phase, choice = "DESCENT", weighted_descent(tree, rng)
        ev = evaluator.evaluate(choice, i)
        s = ev.score.value
        redundant = ev.failed or is_redundant(s, retained, config.epsilon)
        if not redundant:
            retained.append(s)
        reweight(tree, choice, -1 if redundant else +1)
        _observe_numerics(tree, choice, s, config.maximize)
        history.append(EvalRecord(i, choice, ev.score, redundant, phase, ev.metrics, ev.failed))
    return finish(evaluator, history)
