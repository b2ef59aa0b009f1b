import collections

import numpy as np
import pytest

from dodge.baselines import (
    RF_DECISIONS,
    SMOTE_DECISIONS,
    DEConfig,
    Decision,
    de_optimize,
    de_rf,
    mutate,
    random_search,
    smotuned,
)
from dodge.algorithm import DodgeConfig, run_dodge
from dodge.data import DataError, Dataset, Split
from dodge.evaluate import Evaluator
from dodge.metrics import Goal
from dodge.space import Task, build_table1_tree

from conftest import make_blobs


def sphere(v):
    return v["x"] ** 2 + v["y"] ** 2


XY = (Decision("x", -5, 5), Decision("y", -5, 5))


def test_defaults_and_validation():
    c = DEConfig()
    assert (c.np, c.f, c.cr, c.lives) == (10, 0.75, 0.3, 5)
    with pytest.raises(ValueError):
        DEConfig(cr=1.5)
    with pytest.raises(ValueError):
        DEConfig(lives=0)


def test_initial_population_size():
    d = XY + (Decision("z", 0, 1),)
    res = de_optimize(d, lambda v: 0.0, DEConfig(lives=1))
    assert sum(1 for e in res.events if e[0] == "init") == 30
    assert len(res.population) == 30


def test_continuous_mutation_example():
    rng = np.random.default_rng(0)
    m = mutate({"x": 1.0}, {"x": 2.0}, {"x": 0.0}, (Decision("x", -10, 10),), 0.75, 1.0, rng)
    assert m["x"] == pytest.approx(2.5)


def test_mutation_clips_and_rounds():
    rng = np.random.default_rng(0)
    d = (Decision("k", 1, 20, integer=True), Decision("r", 0.1, 5.0))
    m = mutate({"k": 19, "r": 4.0}, {"k": 20, "r": 5.0}, {"k": 1, "r": 0.1}, d, 0.75, 1.0, rng)
    assert m == {"k": 20, "r": 5.0}
    m = mutate({"k": 3, "r": 1.0}, {"k": 4, "r": 1.0}, {"k": 3, "r": 1.0}, d, 0.75, 1.0, rng)
    assert m["k"] == 4 and isinstance(m["k"], int)


def test_discrete_mutation_takes_b_or_c():
    rng = np.random.default_rng(1)
    d = (Decision("m", choices=(50, 100, 200, 400)),)
    seen = collections.Counter(mutate({"m": 50}, {"m": 200}, {"m": 400}, d, 0.75, 1.0, rng)["m"] for _ in range(400))
    assert set(seen) == {200, 400}
    assert {mutate({"m": 50}, {"m": 200}, {"m": 400}, d, 0.75, 0.0, rng)["m"] for _ in range(50)} == {50}


def test_uncrossed_decisions_keep_target():
    rng = np.random.default_rng(2)
    d = (Decision("x", -10, 10), Decision("m", choices=(50, 100)))
    m = mutate({"x": 1.0, "m": 50}, {"x": 2.0, "m": 50}, {"x": 0.0, "m": 50}, d, 0.75, 0.0, rng,
               target={"x": -3.0, "m": 100})
    assert m == {"x": -3.0, "m": 100}


def test_sphere_convergence():
    wins = 0
    for seed in range(25):
        res = de_optimize(XY, sphere, DEConfig(seed=seed))
        wins += max(abs(res.best.values["x"]), abs(res.best.values["y"])) < 0.1
    assert wins >= 24


def test_bounds_monotone_and_accounting():
    calls = []

    def obj(v):
        calls.append(v)
        return sphere(v)

    res = de_optimize(XY, obj, DEConfig(seed=3))
    assert all(-5 <= c.values["x"] <= 5 and -5 <= c.values["y"] <= 5 for c in res.population)
    trace = res.best_per_generation
    assert all(b <= a for a, b in zip(trace, trace[1:]))
    n_init = sum(e[0] == "init" for e in res.events)
    n_mut = sum(e[0] == "mutant" for e in res.events)
    gens = max(g for _, g in res.events)
    assert res.evaluations == len(calls) == n_init + n_mut == n_init * (1 + gens)
    assert len(trace) == gens + 1


def test_maximize():
    res = de_optimize(XY, sphere, DEConfig(seed=0), maximize=True)
    assert res.best.score > 40


def test_degenerate_bounds_return_immediately():
    res = de_optimize((Decision("x", 2, 2), Decision("c", choices=("a",))), lambda v: 1.0)
    assert res.evaluations == 1 and res.best.values == {"x": 2.0, "c": "a"}


def test_decision_vectors():
    assert [d.name for d in SMOTE_DECISIONS] == ["k", "m", "r"]
    assert [d.name for d in RF_DECISIONS] == ["n_estimators", "criterion", "min_samples_split"]


def small_split():
    return Split(make_blobs(n=60, seed=1, name="a"), make_blobs(n=60, seed=2, name="b"))


def test_smotuned_in_bounds_and_counts():
    split = small_split()
    ev = Evaluator(split, Goal.D2H, 0)
    res = smotuned(split, de=DEConfig(np=2, lives=1), evaluator=ev)
    p = res.best_choice.preproc.params
    assert 1 <= p["k"] <= 20 and p["m"] in (50, 100, 200, 400) and 0.1 <= p["r"] <= 5.0
    assert res.evaluations_used == len(res.history) == ev.calls
    assert {h.phase for h in res.history} == {"DE"}


def test_de_rf_in_bounds():
    res = de_rf(small_split(), de=DEConfig(np=2, lives=1))
    p = res.best_choice.learner.params
    assert 50 <= p["n_estimators"] <= 150 and 0.0 <= p["min_samples_split"] <= 1.0
    assert p["criterion"] in ("gini", "entropy")


def test_smotuned_needs_minority():
    d = make_blobs(n=20, seed=0)
    allpos = Dataset("p", d.feature_names, d.rows, np.ones(20, bool), d.loc)
    one = Dataset("q", d.feature_names, d.rows, np.arange(20) == 0, d.loc)
    for train in (allpos, one):
        with pytest.raises(DataError):
            smotuned(Split(train, d))


def test_random_search_budget_and_determinism():
    split = small_split()
    r = random_search(build_table1_tree(Task.DEFECT), 7, split, seed=4)
    assert len(r.history) == 7 and r.evaluations_used == 7
    r2 = random_search(build_table1_tree(Task.DEFECT), 7, split, seed=4)
    assert [h.to_json() for h in r.history] == [h.to_json() for h in r2.history]
    one = random_search(build_table1_tree(Task.DEFECT), 1, split, seed=4)
    assert one.best_choice == one.history[0].choice
    with pytest.raises(ValueError):
        random_search(build_table1_tree(Task.DEFECT), 0, split)


def test_shared_trainer_instrumentation():
    split = small_split()
    counts = {}
    for name, fn in {
        "dodge": lambda ev: run_dodge(DodgeConfig(), split, build_table1_tree(Task.DEFECT), ev),
        "random": lambda ev: random_search(build_table1_tree(Task.DEFECT), 30, split, evaluator=ev),
        "de": lambda ev: de_rf(split, de=DEConfig(np=2, lives=1), evaluator=ev),
    }.items():
        ev = Evaluator(split, Goal.D2H, 0)
        res = fn(ev)
        counts[name] = (ev.calls, res.evaluations_used)
    assert counts["dodge"] == (30, 30) and counts["random"] == (30, 30)
    assert counts["de"][0] == counts["de"][1]
