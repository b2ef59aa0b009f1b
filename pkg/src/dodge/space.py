"""The tuning option space as a weighted tree.

Node types:

* ``choice``    pick exactly one child (tree roots, categorical parameters)
* ``component`` a pre-processor or learner; every child parameter is set
* ``value``     one categorical value; may carry conditional parameters
* ``numeric``   a real or integer range

Every node except the two roots carries an integer weight, moved by +1/-1
whenever an evaluated choice's path runs through it.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Iterator

import numpy as np

from .learners import LearnerKind, LearnerSpec
from .preprocess import PreprocKind, PreprocSpec

_tree_ids = itertools.count()


class Task(str, enum.Enum):
    DEFECT = "defect"
    TEXT = "text"


class StalePath(ValueError):
    """A choice sampled from a different tree than the one being updated."""


@dataclass(eq=False)
class OptionNode:
    label: str
    node_type: str
    children: list["OptionNode"] = field(default_factory=list)
    weight: int = 0
    key: str | None = None          # parameter name (numeric / categorical param nodes)
    value: Any = None               # categorical value, or component kind
    lo: float = 0.0
    hi: float = 0.0
    integer: bool = False
    orig_lo: float = 0.0
    orig_hi: float = 0.0
    observations: list[tuple[float, float]] = field(default_factory=list)
    best_value: float | None = None
    worst_value: float | None = None
    best_score: float | None = None
    worst_score: float | None = None
    node_id: str = ""

    @property
    def is_numeric(self) -> bool:
        return self.node_type == "numeric"

    def walk(self) -> Iterator["OptionNode"]:
        yield self
        for c in self.children:
            yield from c.walk()

    def observe(self, value: float, score: float, maximize: bool) -> bool:
        """Record that ``value`` scored ``score``; returns True if best or worst changed."""
        self.observations.append((float(value), float(score)))
        changed = False
        if self.best_score is None or (score > self.best_score if maximize else score < self.best_score):
            self.best_value, self.best_score = float(value), float(score)
            changed = True
        if self.worst_score is None or (score < self.worst_score if maximize else score > self.worst_score):
            self.worst_value, self.worst_score = float(value), float(score)
            changed = True
        return changed

    def to_json(self) -> dict:
        d: dict[str, Any] = {"id": self.node_id, "label": self.label, "type": self.node_type, "weight": self.weight}
        if self.is_numeric:
            d.update(lo=self.lo, hi=self.hi, integer=self.integer, orig_lo=self.orig_lo, orig_hi=self.orig_hi,
                     best=self.best_value, worst=self.worst_value)
        if self.children:
            d["children"] = [c.to_json() for c in self.children]
        return d


def numeric(key: str, lo: float, hi: float, integer: bool = False) -> OptionNode:
    return OptionNode(label=key, node_type="numeric", key=key, lo=lo, hi=hi, integer=integer, orig_lo=lo, orig_hi=hi)


def categorical(key: str, values, conditional: dict | None = None) -> OptionNode:
    """A categorical parameter; ``conditional[v]`` lists parameters that only exist when ``v`` is chosen."""
    conditional = conditional or {}
    leaves = [
        OptionNode(label=f"{key}={v}", node_type="value", key=key, value=v, children=list(conditional.get(v, [])))
        for v in values
    ]
    return OptionNode(label=key, node_type="choice", key=key, children=leaves)


def component(kind, *params: OptionNode) -> OptionNode:
    return OptionNode(label=kind.value, node_type="component", value=kind, children=list(params))


@dataclass(frozen=True)
class TuningChoice:
    preproc: PreprocSpec
    learner: LearnerSpec
    path: tuple[str, ...]
    numeric_values: tuple[tuple[str, float], ...]
    tree_uid: int

    def to_json(self) -> dict:
        return {"preproc": self.preproc.to_json(), "learner": self.learner.to_json()}

    def describe(self) -> str:
        def fmt(spec):
            args = ", ".join(f"{k}={_short(v)}" for k, v in spec.params.items())
            return f"{spec.kind.value}({args})"
        return f"{fmt(self.preproc)} -> {fmt(self.learner)}"


def _short(v):
    return f"{v:.4g}" if isinstance(v, float) else repr(v) if isinstance(v, str) else v


class OptionTree:
    def __init__(self, task: Task, preproc_root: OptionNode, learner_root: OptionNode):
        self.task = Task(task)
        self.preproc_root = preproc_root
        self.learner_root = learner_root
        self.uid = next(_tree_ids)
        self._index: dict[str, OptionNode] = {}
        for prefix, root in (("preproc", preproc_root), ("learner", learner_root)):
            self._assign_ids(root, prefix)

    def _assign_ids(self, node: OptionNode, node_id: str):
        node.node_id = node_id
        if node_id in self._index:
            raise ValueError(f"duplicate node id {node_id}")
        self._index[node_id] = node
        for c in node.children:
            self._assign_ids(c, f"{node_id}/{c.label}")

    def node(self, node_id: str) -> OptionNode:
        return self._index[node_id]

    def nodes(self) -> Iterator[OptionNode]:
        yield from self.preproc_root.walk()
        yield from self.learner_root.walk()

    def numeric_leaves(self) -> list[OptionNode]:
        return [n for n in self.nodes() if n.is_numeric]

    def weights(self) -> dict[str, int]:
        return {n.node_id: n.weight for n in self.nodes() if n not in (self.preproc_root, self.learner_root)}

    def to_json(self) -> dict:
        return {"task": self.task.value, "preproc": self.preproc_root.to_json(), "learner": self.learner_root.to_json()}

    # sampling ------------------------------------------------------------

    def _pick(self, node: OptionNode, rng, greedy: bool) -> OptionNode:
        kids = node.children
        if greedy:
            top = max(c.weight for c in kids)
            kids = [c for c in kids if c.weight == top]
        return kids[int(rng.integers(len(kids)))] if len(kids) > 1 else kids[0]

    def _descend(self, node, rng, greedy, path, params, numerics):
        t = node.node_type
        if t == "numeric":
            lo, hi = node.lo, node.hi
            v = lo if hi <= lo else float(rng.uniform(lo, hi))
            if node.integer:
                v = int(min(max(round(v), math.ceil(node.orig_lo)), math.floor(node.orig_hi)))
            params[node.key] = v
            numerics.append((node.node_id, float(v)))
            path.append(node.node_id)
            return
        if t == "choice":
            if node.key is not None:
                path.append(node.node_id)
            self._descend(self._pick(node, rng, greedy), rng, greedy, path, params, numerics)
            return
        path.append(node.node_id)
        if t == "value":
            params[node.key] = node.value
        for c in node.children:
            self._descend(c, rng, greedy, path, params, numerics)

    def _sample(self, rng, greedy: bool) -> TuningChoice:
        path: list[str] = []
        numerics: list[tuple[str, float]] = []
        pp: dict = {}
        pnode = self._pick(self.preproc_root, rng, greedy)
        self._descend(pnode, rng, greedy, path, pp, numerics)
        lp: dict = {}
        lnode = self._pick(self.learner_root, rng, greedy)
        self._descend(lnode, rng, greedy, path, lp, numerics)
        return TuningChoice(
            PreprocSpec(pnode.value, pp),
            LearnerSpec(lnode.value, lp),
            tuple(path),
            tuple(numerics),
            self.uid,
        )

    def validate(self, choice: TuningChoice):
        if choice.tree_uid != self.uid:
            raise StalePath(f"choice was sampled from tree {choice.tree_uid}, not {self.uid}")
        for nid in choice.path:
            if nid not in self._index:
                raise StalePath(f"unknown node {nid}")


def sample_random(tree: OptionTree, rng) -> TuningChoice:
    """Uniform choice at every level; numerics uniform in their current range."""
    return tree._sample(rng, greedy=False)


def weighted_descent(tree: OptionTree, rng) -> TuningChoice:
    """Highest-weight child at every level (ties uniform); numerics uniform in their current range."""
    return tree._sample(rng, greedy=True)


def reweight(tree: OptionTree, choice: TuningChoice, delta: int):
    """Add ``delta`` (+1 endorse, -1 deprecate) to every node on the choice's path."""
    if delta not in (-1, 1):
        raise ValueError("delta must be +1 or -1")
    tree.validate(choice)
    for nid in choice.path:
        tree.node(nid).weight += delta


def narrow_range(leaf: OptionNode, best: float, worst: float):
    """Restrict the leaf to the span from ``best`` to the best/worst midpoint.

    The interval is ordered (the midpoint can lie below ``best``) and clipped
    to the leaf's original range.
    """
    mid = 0.5 * (best + worst)
    lo, hi = min(best, mid), max(best, mid)
    leaf.lo = max(lo, leaf.orig_lo)
    leaf.hi = min(hi, leaf.orig_hi)
    if leaf.lo > leaf.hi:
        leaf.lo = leaf.hi = min(max(best, leaf.orig_lo), leaf.orig_hi)


def build_table1_tree(task, include_svm: bool = False) -> OptionTree:
    """The pre-processor and learner options for ``task`` (fresh weights and ranges)."""
    task = Task(task)
    P, L = PreprocKind, LearnerKind
    if task is Task.DEFECT:
        pre = [
            component(P.STANDARD_SCALER),
            component(P.MINMAX),
            component(P.MAXABS),
            component(P.ROBUST, numeric("q_lo", 0, 50, True), numeric("q_hi", 51, 100, True)),
            component(P.KERNEL_CENTERER),
            component(
                P.QUANTILE_TRANSFORMER,
                numeric("n_quantiles", 100, 1000, True),
                numeric("subsample", 1000, 100000, True),
                categorical("output_distribution", ("normal", "uniform")),
            ),
            component(P.NORMALIZER, categorical("norm", ("l1", "l2", "max"))),
            component(P.BINARIZER, numeric("threshold", 0.0, 100.0)),
            component(P.SMOTE, numeric("k", 1, 20, True), categorical("m", (50, 100, 200, 400)), numeric("r", 0.1, 5.0)),
            component(P.NO_PREPROC),
        ]
    else:
        norms = ("l1", "l2", None)
        pre = [
            component(P.COUNT_VEC, numeric("max_df", 100, 1000, True), numeric("min_df", 1, 10, True)),
            component(P.TFIDF_VEC, numeric("max_df", 100, 1000, True), numeric("min_df", 1, 10, True),
                      categorical("norm", norms)),
            component(P.HASHING_VEC, categorical("n_features", (1000, 2000, 4000, 6000, 8000, 10000)),
                      categorical("norm", norms)),
            component(
                P.LDA,
                numeric("n_components", 10, 50, True),
                numeric("doc_topic_prior", 0.0, 1.0),
                numeric("topic_word_prior", 0.0, 1.0),
                numeric("learning_decay", 0.51, 1.0),
                numeric("learning_offset", 1.0, 50.0),
                categorical("batch_size", (150, 180, 210, 250, 300)),
            ),
        ]
    learners = [
        component(L.DECISION_TREE, numeric("min_samples_split", 0.0, 1.0),
                  categorical("criterion", ("gini", "entropy")), categorical("splitter", ("best", "random"))),
        component(L.RANDOM_FOREST, numeric("n_estimators", 50, 150, True),
                  categorical("criterion", ("gini", "entropy")), numeric("min_samples_split", 0.0, 1.0)),
        component(L.LOGISTIC_REGRESSION, categorical("penalty", ("l1", "l2")), numeric("tol", 0.0, 0.1),
                  numeric("C", 1, 500, True)),
        component(L.MULTINOMIAL_NB, numeric("alpha", 0.0, 0.1)),
        component(
            L.KNN,
            numeric("n_neighbors", 2, 25, True),
            categorical("weights", ("uniform", "distance")),
            categorical("metric", ("minkowski", "chebyshev"), conditional={"minkowski": [numeric("p", 1, 15, True)]}),
        ),
    ]
    if include_svm:
        learners.append(component(L.LINEAR_SVM))
    return OptionTree(
        task,
        OptionNode(label="preprocessors", node_type="choice", children=pre),
        OptionNode(label="learners", node_type="choice", children=learners),
    )
