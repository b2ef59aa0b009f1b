"""Goal predicates: recall, false alarm rate, d2h and Popt(20)."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class Goal(str, enum.Enum):
    D2H = "d2h"
    POPT20 = "popt20"

    @property
    def maximize(self) -> bool:
        return self is Goal.POPT20

    @property
    def worst(self) -> float:
        return 0.0 if self.maximize else 1.0

    def better(self, a: float, b: float) -> bool:
        """True if score ``a`` is strictly better than ``b``."""
        return a > b if self.maximize else a < b

    @classmethod
    def parse(cls, value) -> "Goal":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")
        if self.tp + self.fp + self.tn + self.fn < 1:
            raise ValueError("confusion counts must not all be zero")

    @classmethod
    def from_predictions(cls, predicted, actual) -> "ConfusionCounts":
        p = np.asarray(predicted, dtype=bool)
        a = np.asarray(actual, dtype=bool)
        if p.shape != a.shape:
            raise ValueError(f"shape mismatch: {p.shape} vs {a.shape}")
        return cls(
            tp=int(np.sum(p & a)),
            fp=int(np.sum(p & ~a)),
            tn=int(np.sum(~p & ~a)),
            fn=int(np.sum(~p & a)),
        )


@dataclass(frozen=True)
class GoalScore:
    metric: Goal
    value: float
    degenerate: bool = False

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"{self.metric.value} score {self.value} outside [0, 1]")


@dataclass(frozen=True)
class LiftCurve:
    """Areas under the recall-vs-effort curves, truncated at ``effort_cutoff``."""

    area_model: float
    area_optimal: float
    area_worst: float
    effort_cutoff: float = 0.2


def recall(cc: ConfusionCounts) -> float:
    denom = cc.tp + cc.fn
    return cc.tp / denom if denom else 0.0


def false_positive_rate(cc: ConfusionCounts) -> float:
    denom = cc.fp + cc.tn
    return cc.fp / denom if denom else 0.0


def d2h(cc: ConfusionCounts) -> GoalScore:
    """Distance from (recall, false alarms) to the ideal (1, 0), scaled to [0, 1]."""
    r, f = recall(cc), false_positive_rate(cc)
    value = math.sqrt((1.0 - r) ** 2 + f**2) / math.sqrt(2.0)
    return GoalScore(Goal.D2H, min(1.0, value))


def _area(order: np.ndarray, loc: np.ndarray, bugs: np.ndarray, cutoff: float) -> float:
    # Recall accrues linearly while reading each module; the area is integrated
    # exactly up to `cutoff` of total LOC, splitting the module that crosses it.
    x = np.concatenate([[0.0], np.cumsum(loc[order]) / loc.sum()])
    y = np.concatenate([[0.0], np.cumsum(bugs[order]) / bugs.sum()])
    # segments [x[i-1], x[i]] starting before the cutoff
    m = int(np.searchsorted(x, cutoff, side="left"))
    if m == 0:
        return 0.0
    m = min(m, len(x) - 1)
    x0, x1, y0, y1 = x[: m], x[1 : m + 1].copy(), y[: m], y[1 : m + 1].copy()
    if x1[-1] > cutoff:
        y1[-1] = y0[-1] + (y1[-1] - y0[-1]) * (cutoff - x0[-1]) / (x1[-1] - x0[-1])
        x1[-1] = cutoff
    return float(np.sum(0.5 * (x1 - x0) * (y0 + y1)))


def lift_orders(predicted, actual, loc):
    """Index orders for the model, optimal and worst lift charts (ties keep input order)."""
    p = np.asarray(predicted, dtype=bool)
    a = np.asarray(actual, dtype=bool)
    loc = np.asarray(loc, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        density = np.where(a, np.where(loc > 0, 1.0 / loc, np.inf), 0.0)
    model = np.lexsort((loc, ~p))
    optimal = np.argsort(-density, kind="stable")
    worst = np.argsort(density, kind="stable")
    return model, optimal, worst


def lift_curve(predicted, actual, loc, cutoff: float = 0.2) -> LiftCurve:
    a = np.asarray(actual, dtype=float)
    locf = np.asarray(loc, dtype=float)
    model, optimal, worst = lift_orders(predicted, actual, loc)
    return LiftCurve(
        area_model=_area(model, locf, a, cutoff),
        area_optimal=_area(optimal, locf, a, cutoff),
        area_worst=_area(worst, locf, a, cutoff),
        effort_cutoff=cutoff,
    )


def popt20(predicted, actual, loc, cutoff: float = 0.2) -> GoalScore:
    """Effort-aware Popt at ``cutoff`` of inspected LOC; larger is better.

    Modules predicted defective are read first, each group in ascending LOC.
    When the optimal and worst curves coincide (no defects, or every module of
    equal density) the score is 1.0 and flagged ``degenerate``.
    """
    p = np.asarray(predicted, dtype=bool)
    a = np.asarray(actual, dtype=bool)
    loc = np.asarray(loc)
    if not (p.shape == a.shape == loc.shape) or p.ndim != 1 or p.size == 0:
        raise ValueError("predicted, actual and loc must be equal-length non-empty vectors")
    if np.any(loc < 0) or loc.sum() <= 0:
        raise ValueError("loc must be non-negative with a positive total")
    if not 0.0 < cutoff <= 1.0:
        raise ValueError(f"cutoff must lie in (0, 1], got {cutoff}")
    if not a.any():
        return GoalScore(Goal.POPT20, 1.0, degenerate=True)
    curve = lift_curve(p, a, loc, cutoff)
    span = curve.area_optimal - curve.area_worst
    if span <= 1e-15:
        return GoalScore(Goal.POPT20, 1.0, degenerate=True)
    value = 1.0 - (curve.area_optimal - curve.area_model) / span
    return GoalScore(Goal.POPT20, float(min(1.0, max(0.0, value))))


def score(goal: Goal, predicted, actual, loc=None) -> GoalScore:
    goal = Goal.parse(goal)
    if goal is Goal.D2H:
        return d2h(ConfusionCounts.from_predictions(predicted, actual))
    if loc is None:
        raise ValueError("popt20 needs lines of code")
    return popt20(predicted, actual, loc)
