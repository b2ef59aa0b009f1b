"""Comparison optimizers: random search and differential evolution (SMOTUNED, DE+RF)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .data import DataError, Dataset, Split
from .evaluate import EvalRecord, Evaluator, Pipeline, TuningResult, finish
from .learners import LearnerKind, LearnerSpec
from .metrics import Goal
from .preprocess import PreprocKind, PreprocSpec, minority_label
from .space import OptionTree, sample_random


def random_search(tree: OptionTree, n: int = 30, split: Split | None = None, goal=Goal.D2H, seed: int = 0,
                  evaluator: Evaluator | None = None) -> TuningResult:
    """``n`` independent random draws from ``tree``; best on train is scored on test."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if evaluator is None:
        evaluator = Evaluator(split, goal, seed)
    rng = np.random.default_rng([seed, 1])
    history = []
    for i in range(1, n + 1):
        choice = sample_random(tree, rng)
        ev = evaluator.evaluate(choice, i)
        history.append(EvalRecord(i, choice, ev.score, False, "RANDOM", ev.metrics, ev.failed))
    return finish(evaluator, history)


# differential evolution ------------------------------------------------------


@dataclass(frozen=True)
class Decision:
    """One tunable: a real or integer range, or a set of categories."""

    name: str
    lo: float = 0.0
    hi: float = 0.0
    integer: bool = False
    choices: tuple | None = None

    @property
    def discrete(self) -> bool:
        return self.choices is not None

    @property
    def degenerate(self) -> bool:
        return len(self.choices) == 1 if self.discrete else self.lo == self.hi

    def sample(self, rng):
        if self.discrete:
            return self.choices[int(rng.integers(len(self.choices)))]
        if self.integer:
            return int(rng.integers(int(self.lo), int(self.hi) + 1))
        return float(rng.uniform(self.lo, self.hi))

    def clip(self, v):
        v = min(max(v, self.lo), self.hi)
        return int(round(v)) if self.integer else float(v)


@dataclass(frozen=True)
class DEConfig:
    np: int = 10
    f: float = 0.75
    cr: float = 0.3
    lives: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.np < 1 or self.lives < 1 or not 0.0 <= self.cr <= 1.0:
            raise ValueError("need np >= 1, lives >= 1 and cr in [0, 1]")


@dataclass
class Candidate:
    values: dict[str, Any]
    score: float


@dataclass
class DEResult:
    best: Candidate
    population: list[Candidate]
    evaluations: int
    events: list[tuple[str, int]] = field(default_factory=list)   # ("init" | "mutant", generation)
    best_per_generation: list[float] = field(default_factory=list)


def mutate(a, b, c, decisions: Sequence[Decision], f: float, cr: float, rng, target=None) -> dict:
    """Mutant of ``target`` (default ``a``): each decision is crossed with probability ``cr``.

    Crossed continuous: ``a + f * (b - c)``, clipped and rounded to the bound.
    Crossed discrete: b's or c's category (uniformly). Uncrossed decisions
    keep the target's value (binomial crossover).
    """
    keep = a if target is None else target
    m = {}
    for d in decisions:
        if rng.random() >= cr:
            m[d.name] = keep[d.name]
        elif d.discrete:
            m[d.name] = b[d.name] if rng.random() < 0.5 else c[d.name]
        else:
            m[d.name] = d.clip(a[d.name] + f * (b[d.name] - c[d.name]))
    return m


def de_optimize(decisions: Sequence[Decision], objective: Callable[[dict], float], config: DEConfig = DEConfig(),
                maximize: bool = False) -> DEResult:
    """Storn-style DE with a lives budget.

    The population holds ``len(decisions) * np`` candidates. Each generation
    visits members in order and replaces a member as soon as its mutant
    scores strictly better (steady state). A generation with no replacement
    costs one life; the run stops when lives reach zero.
    """
    rng = np.random.default_rng([config.seed, 2])

    def better(x, y):
        return x > y if maximize else x < y

    events: list[tuple[str, int]] = []
    if all(d.degenerate for d in decisions):
        vals = {d.name: d.sample(rng) for d in decisions}
        cand = Candidate(vals, objective(vals))
        return DEResult(cand, [cand], 1, [("init", 0)], [cand.score])

    size = max(4, len(decisions) * config.np)
    pop = []
    for _ in range(size):
        vals = {d.name: d.sample(rng) for d in decisions}
        pop.append(Candidate(vals, objective(vals)))
        events.append(("init", 0))

    def best_of(pop):
        b = pop[0]
        for c in pop[1:]:
            if better(c.score, b.score):
                b = c
        return b

    trace = [best_of(pop).score]
    lives = config.lives
    gen = 0
    while lives > 0:
        gen += 1
        delta = -1
        for i in range(size):
            others = [j for j in range(size) if j != i]
            a, b, c = (pop[j].values for j in rng.choice(others, 3, replace=False))
            m = mutate(a, b, c, decisions, config.f, config.cr, rng, target=pop[i].values)
            s = objective(m)
            events.append(("mutant", gen))
            if better(s, pop[i].score):
                pop[i] = Candidate(m, s)
                delta = 0
        lives += delta
        trace.append(best_of(pop).score)
    return DEResult(best_of(pop), pop, len(events), events, trace)


def _de_tune(split: Split, goal, de: DEConfig, seed: int, decisions, to_pipeline, evaluator=None) -> TuningResult:
    goal = Goal.parse(goal)
    if evaluator is None:
        evaluator = Evaluator(split, goal, seed)
    history: list[EvalRecord] = []

    def objective(values):
        pipe = to_pipeline(values)
        i = len(history) + 1
        ev = evaluator.evaluate(pipe, i)
        history.append(EvalRecord(i, pipe, ev.score, False, "DE", ev.metrics, ev.failed))
        return ev.score.value

    de_optimize(decisions, objective, DEConfig(de.np, de.f, de.cr, de.lives, seed), goal.maximize)
    return finish(evaluator, history)


SMOTE_DECISIONS = (
    Decision("k", 1, 20, integer=True),
    Decision("m", choices=(50, 100, 200, 400)),
    Decision("r", 0.1, 5.0),
)

RF_DECISIONS = (
    Decision("n_estimators", 50, 150, integer=True),
    Decision("criterion", choices=("gini", "entropy")),
    Decision("min_samples_split", 0.0, 1.0),
)


def smotuned(split: Split, learner_spec: LearnerSpec | None = None, goal=Goal.D2H, de: DEConfig = DEConfig(),
             seed: int = 0, evaluator: Evaluator | None = None) -> TuningResult:
    """DE over SMOTE's (k, m, r); the learner is fixed (random forest defaults unless given)."""
    train = split.train
    if not isinstance(train, Dataset):
        raise DataError("SMOTUNED needs tabular data")
    target = minority_label(train.labels)
    if int(np.sum(train.labels == target)) < 2:
        raise DataError("SMOTUNED needs at least 2 minority rows in the training data")
    learner_spec = learner_spec or LearnerSpec.default(LearnerKind.RANDOM_FOREST)

    def to_pipeline(v):
        return Pipeline(PreprocSpec(PreprocKind.SMOTE, v), learner_spec)

    return _de_tune(split, goal, de, seed, SMOTE_DECISIONS, to_pipeline, evaluator)


def de_rf(split: Split, goal=Goal.D2H, de: DEConfig = DEConfig(), seed: int = 0,
          evaluator: Evaluator | None = None) -> TuningResult:
    """DE over random forest's (n_estimators, criterion, min_samples_split), no pre-processing."""

    def to_pipeline(v):
        return Pipeline(PreprocSpec(PreprocKind.NO_PREPROC), LearnerSpec(LearnerKind.RANDOM_FOREST, v))

    return _de_tune(split, goal, de, seed, RF_DECISIONS, to_pipeline, evaluator)
