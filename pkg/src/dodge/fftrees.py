"""Fast-and-frugal trees.

Each level tests one attribute against its median (over the rows still
unclassified) and exits a fixed label on one side. For depth ``d`` there
are ``2**d`` exit plans: a plan bit of 1 exits ``True`` at that level (the
range that most selects the target), 0 exits ``False`` (the range that
least does). A tree is grown greedily for every plan and the plan with the
best training score wins.

A candidate exit is scored by treating the level as a one-rule classifier on
the rows that reach it: rows in the range get the exit label, the rest its
opposite. An empty range scores the goal's worst value.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .metrics import Goal, GoalScore, score as goal_score


class Direction(str, enum.Enum):
    LEQ = "<="
    GT = ">"


@dataclass(frozen=True)
class FFtreeLevel:
    attribute_index: int
    threshold: float
    direction: Direction
    exit_label: bool
    exit_side_is_most: bool

    def matches(self, X: np.ndarray) -> np.ndarray:
        col = X[:, self.attribute_index]
        return col <= self.threshold if self.direction is Direction.LEQ else col > self.threshold


@dataclass(frozen=True)
class FFtree:
    levels: tuple[FFtreeLevel, ...]
    final_label: bool
    train_goal: GoalScore
    feature_names: tuple[str, ...] = ()
    plan: tuple[int, ...] = ()

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        out = np.full(X.shape[0], self.final_label)
        undecided = np.ones(X.shape[0], dtype=bool)
        for lv in self.levels:
            hit = undecided & lv.matches(X)
            out[hit] = lv.exit_label
            undecided &= ~hit
        return out

    def attributes(self) -> set[int]:
        return {lv.attribute_index for lv in self.levels}

    def pretty(self) -> str:
        lines = []
        for i, lv in enumerate(self.levels):
            kw = "if     " if i == 0 else "else if"
            name = self.feature_names[lv.attribute_index]
            lines.append(f"{kw} {name} {lv.direction.value} {lv.threshold:g} then {str(lv.exit_label).lower()}")
        lines.append(f"else {str(self.final_label).lower()}")
        return "\n".join(lines)


def predict_fftree(tree: FFtree, row) -> bool:
    return bool(tree.predict(np.asarray(row, dtype=float).reshape(1, -1))[0])


def _goal_value(goal: Goal, predicted, actual, loc) -> float:
    return goal_score(goal, predicted, actual, loc).value


def _best_exit(X, y, loc, goal: Goal, exit_label: bool):
    """The (attribute, threshold, direction) whose exit best serves ``exit_label`` on these rows."""
    best = None
    best_val = None
    for j in range(X.shape[1]):
        thr = float(np.median(X[:, j]))
        for direction in (Direction.LEQ, Direction.GT):
            hit = X[:, j] <= thr if direction is Direction.LEQ else X[:, j] > thr
            if not hit.any():
                val = goal.worst
            else:
                pred = np.where(hit, exit_label, not exit_label)
                val = _goal_value(goal, pred, y, loc)
            if best is None or goal.better(val, best_val):
                best, best_val = (j, thr, direction, hit), val
    return best


def grow(train: Dataset, goal, plan, loc=None) -> FFtree:
    """Grow the tree for one exit plan (a tuple of 0/1 bits, one per level)."""
    goal = Goal.parse(goal)
    X, y = train.rows, train.labels
    if loc is None:
        loc = train.loc
    if goal is Goal.POPT20 and loc is None:
        raise ValueError("popt20 needs lines of code")
    remaining = np.arange(len(train))
    levels = []
    for bit in plan:
        if remaining.size == 0:
            break
        exit_label = bool(bit)
        sub_loc = None if loc is None else np.asarray(loc)[remaining]
        j, thr, direction, hit = _best_exit(X[remaining], y[remaining], sub_loc, goal, exit_label)
        levels.append(FFtreeLevel(j, thr, direction, exit_label, exit_side_is_most=exit_label))
        remaining = remaining[~hit]
    final = not levels[-1].exit_label
    tree = FFtree(tuple(levels), final, GoalScore(goal, goal.worst), train.feature_names, tuple(plan))
    pred = tree.predict(X)
    sc = goal_score(goal, pred, y, loc)
    return FFtree(tree.levels, final, sc, train.feature_names, tuple(plan))


def build_candidates(train: Dataset, goal, d: int = 4, loc=None) -> list[FFtree]:
    """All ``2**d`` trees, one per exit plan, in lexicographic plan order."""
    if len(train) == 0 or train.n_features < 1:
        raise ValueError("need at least one row and one feature")
    return [grow(train, goal, plan, loc) for plan in itertools.product((0, 1), repeat=d)]


def select(candidates: list[FFtree], goal) -> FFtree:
    goal = Goal.parse(goal)
    best = candidates[0]
    for t in candidates[1:]:
        if goal.better(t.train_goal.value, best.train_goal.value):
            best = t
    return best


def train_fftree(train: Dataset, goal, d: int = 4, loc=None) -> FFtree:
    """Best (on training data) of the ``2**d`` candidate trees; the earliest plan wins ties."""
    return select(build_candidates(train, goal, d, loc), goal)
