import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dodge.metrics import ConfusionCounts, Goal, GoalScore, d2h, false_positive_rate, lift_orders, popt20, recall


def cc(tp=0, fp=0, tn=0, fn=0):
    return ConfusionCounts(tp, fp, tn, fn)


def test_recall_and_fpr_examples():
    assert recall(cc(tp=1, tn=1)) == 1.0
    assert recall(cc(fn=1, tn=1)) == 0.0
    assert recall(cc(tp=3, fn=1)) == 0.75
    assert false_positive_rate(cc(tn=1)) == 0.0
    assert false_positive_rate(cc(fp=1)) == 1.0
    assert false_positive_rate(cc(fp=1, tn=3)) == 0.25
    assert recall(cc(tn=2)) == 0.0 and false_positive_rate(cc(tp=2)) == 0.0


def test_d2h_examples():
    assert d2h(cc(tp=1, tn=1)).value == 0.0
    assert d2h(cc(fn=1, fp=1)).value == pytest.approx(1.0)
    assert d2h(cc(tp=1, fn=1, fp=1, tn=1)).value == pytest.approx(0.5)


def test_confusion_counts_validation():
    with pytest.raises(ValueError):
        cc()
    with pytest.raises(ValueError):
        cc(tp=-1, tn=2)
    with pytest.raises(ValueError):
        GoalScore(Goal.D2H, 1.5)
    c = ConfusionCounts.from_predictions([1, 1, 0, 0], [1, 0, 1, 0])
    assert (c.tp, c.fp, c.fn, c.tn) == (1, 1, 1, 1)


def d2h_oracle(c):
    r = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
    f = c.fp / (c.fp + c.tn) if c.fp + c.tn else 0.0
    return math.hypot(1 - r, f) / math.sqrt(2)


counts = st.tuples(*[st.integers(0, 50)] * 4).filter(lambda t: sum(t) > 0)


@given(counts)
def test_d2h_in_unit_interval_and_matches_formula(t):
    c = cc(*t)
    v = d2h(c).value
    assert 0.0 <= v <= 1.0
    assert abs(v - d2h_oracle(c)) < 1e-12


@given(st.integers(0, 20), st.integers(1, 20), st.integers(0, 20), st.integers(1, 20))
def test_d2h_monotone(tp, pos_extra, fp, neg_extra):
    # more false alarms at fixed recall never helps; more recall at fixed fpr never hurts
    fn, tn = pos_extra, neg_extra
    base = d2h(cc(tp, fp, tn, fn)).value
    assert d2h(cc(tp, fp + 1, tn - 1, fn)).value >= base - 1e-15 if tn >= 1 else True
    assert d2h(cc(tp + 1, fp, tn, fn - 1)).value <= base + 1e-15


# Popt oracle: exact rational arithmetic over explicit orderings -------------


def order_by(keys):
    return sorted(range(len(keys)), key=lambda i: (keys[i], i))


def area_oracle(order, loc, bugs, cutoff):
    """Walk modules one by one; recall rises linearly across each module's LOC."""
    total_loc = sum(loc)
    total_bugs = sum(bugs)
    cut = Fraction(cutoff).limit_denominator(10**6)
    x = Fraction(0)
    y = Fraction(0)
    area = Fraction(0)
    for i in order:
        dx = Fraction(loc[i], total_loc)
        dy = Fraction(bugs[i], total_bugs)
        if x >= cut:
            break
        if x + dx > cut:
            frac = (cut - x) / dx
            area += (cut - x) * (y + (y + dy * frac)) / 2
            break
        area += dx * (2 * y + dy) / 2
        x += dx
        y += dy
    return area


def popt_oracle(pred, act, loc, cutoff=0.2):
    n = len(loc)
    bugs = [int(a) for a in act]
    if sum(bugs) == 0:
        return 1.0
    model = order_by([(0 if pred[i] else 1, loc[i]) for i in range(n)])
    dens = [Fraction(bugs[i], loc[i]) if loc[i] > 0 else Fraction(10**12) * bugs[i] for i in range(n)]
    optimal = order_by([-d for d in dens])
    worst = order_by(dens)
    s_m = area_oracle(model, loc, bugs, cutoff)
    s_o = area_oracle(optimal, loc, bugs, cutoff)
    s_w = area_oracle(worst, loc, bugs, cutoff)
    if s_o == s_w:
        return 1.0
    return float(max(0, min(1, 1 - (s_o - s_m) / (s_o - s_w))))


def test_popt_four_module_instance():
    loc, act, pred = [10, 20, 30, 40], [True, False, True, False], [True, True, False, False]
    assert popt20(pred, act, loc).value == pytest.approx(popt_oracle(pred, act, loc), abs=1e-12)


def test_popt_optimal_and_worst_orderings():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(2, 12))
        loc = rng.permutation(np.arange(1, n + 1) * 7)      # distinct, so densities are distinct
        act = rng.random(n) < 0.5
        act[0], act[1] = True, False
        # predicting exactly the defective modules reads them first, smallest first
        assert popt20(act, act, loc).value == pytest.approx(1.0, abs=1e-12)


def test_popt_degenerate_flag():
    s = popt20([True, False], [False, False], [10, 20])
    assert s.value == 1.0 and s.degenerate
    s = popt20([True, False], [True, True], [10, 10])
    assert s.value == 1.0 and s.degenerate


def test_popt_errors():
    with pytest.raises(ValueError):
        popt20([True], [True], [0])
    with pytest.raises(ValueError):
        popt20([True], [True, False], [1, 2])


modules = st.integers(1, 12).flatmap(lambda n: st.tuples(
    st.lists(st.booleans(), min_size=n, max_size=n),
    st.lists(st.booleans(), min_size=n, max_size=n),
    st.lists(st.integers(1, 1000), min_size=n, max_size=n)))


@given(modules)
def test_popt_matches_oracle(m):
    pred, act, loc = m
    v = popt20(pred, act, loc).value
    assert 0.0 <= v <= 1.0
    assert abs(v - popt_oracle(pred, act, loc)) < 1e-9


def test_lift_orders_tie_break_is_stable():
    model, optimal, worst = lift_orders([True, True, False], [True, True, False], [5, 5, 5])
    assert model.tolist() == [0, 1, 2]
    assert optimal.tolist() == [0, 1, 2]
    assert worst.tolist() == [2, 0, 1]
