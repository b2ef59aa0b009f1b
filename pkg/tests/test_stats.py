import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dodge.stats import SampleSet, a12, bootstrap_significant, compare, small_effect


def a12_oracle(xs, ys):
    gt = sum(1 for x in xs for y in ys if x > y)
    eq = sum(1 for x in xs for y in ys if x == y)
    return (gt + 0.5 * eq) / (len(xs) * len(ys))


def test_small_effect_examples():
    assert small_effect([5, 5, 5]) == 0.0
    assert small_effect([0, 2]) == pytest.approx(0.2 * math.sqrt(2), abs=1e-12)
    assert small_effect([0, -6]) == pytest.approx(3 * small_effect([0, 2]))
    with pytest.raises(ValueError):
        small_effect([1.0])


def test_a12_examples():
    assert a12([1, 2], [2, 3]) == 0.125
    assert a12([4, 5, 6], [4, 5, 6]) == 0.5
    assert a12([10, 11], [1, 2, 3]) == 1.0
    with pytest.raises(ValueError):
        a12([], [1])


samples = st.lists(st.integers(0, 6).map(float), min_size=1, max_size=15)


@given(samples, samples)
def test_a12_equals_pair_count_and_is_symmetric(xs, ys):
    assert a12(xs, ys) == a12_oracle(xs, ys)
    assert a12(xs, ys) + a12(ys, xs) == 1.0


@given(samples, samples)
def test_a12_monotone_invariance(xs, ys):
    f = lambda v: [math.exp(0.3 * x) - 7 for x in v]
    assert a12(f(xs), f(ys)) == a12(xs, ys)


def test_bootstrap_examples():
    rng = np.random.default_rng(0)
    near0, near1 = rng.normal(0, 0.05, 30), rng.normal(1, 0.05, 30)
    assert bootstrap_significant(near0, near1, seed=1)
    assert not bootstrap_significant(near0, near0, seed=1)
    same = [bootstrap_significant(near0, near0 + 0.01, seed=5) for _ in range(2)]
    assert same[0] == same[1]
    with pytest.raises(ValueError):
        bootstrap_significant([1.0], [1.0, 2.0])


def test_compare_identical():
    v = compare([SampleSet("a", [0.1, 0.2, 0.3]), SampleSet("b", [0.1, 0.2, 0.3])], maximize=False)
    assert not any(x.worse for x in v)


def test_compare_dominated():
    v = compare([SampleSet("lo", [0.1] * 25), SampleSet("hi", [0.9] * 25)], maximize=False)
    assert [x.worse for x in v] == [False, True]
    v = compare([SampleSet("lo", [0.1] * 25), SampleSet("hi", [0.9] * 25)], maximize=True)
    assert [x.worse for x in v] == [True, False]
    assert v[0].effect_a12 == 1.0


def test_compare_tiny_difference_not_worse():
    rng = np.random.default_rng(3)
    base = rng.normal(0.5, 0.1, 25)
    v = compare([SampleSet("a", base), SampleSet("b", base + 0.001), SampleSet("c", rng.normal(0.5, 0.1, 25))],
                maximize=False)
    assert not v[1].worse


@given(st.lists(st.lists(st.floats(0, 1), min_size=2, max_size=8), min_size=2, max_size=4), st.booleans())
def test_best_never_worse(groups, maximize):
    v = compare([SampleSet(str(i), g) for i, g in enumerate(groups)], maximize=maximize, resamples=200)
    means = [np.mean(g) for g in groups]
    best = int(np.argmax(means) if maximize else np.argmin(means))
    assert not v[best].worse
    for x in v:
        assert not x.worse or (x.significant and x.effect_a12 > 0.6)


def test_sample_set_rejects_empty():
    with pytest.raises(ValueError):
        SampleSet("e", [])
