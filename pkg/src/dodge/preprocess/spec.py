from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from ..learners.base import Choice, Int, Real


class PreprocKind(str, enum.Enum):
    STANDARD_SCALER = "STANDARD_SCALER"
    MINMAX = "MINMAX"
    MAXABS = "MAXABS"
    ROBUST = "ROBUST"
    KERNEL_CENTERER = "KERNEL_CENTERER"
    QUANTILE_TRANSFORMER = "QUANTILE_TRANSFORMER"
    NORMALIZER = "NORMALIZER"
    BINARIZER = "BINARIZER"
    SMOTE = "SMOTE"
    COUNT_VEC = "COUNT_VEC"
    TFIDF_VEC = "TFIDF_VEC"
    HASHING_VEC = "HASHING_VEC"
    LDA = "LDA"
    NO_PREPROC = "NO_PREPROC"

    @property
    def is_text(self) -> bool:
        return self in TEXT_KINDS


TEXT_KINDS = frozenset(
    {PreprocKind.COUNT_VEC, PreprocKind.TFIDF_VEC, PreprocKind.HASHING_VEC, PreprocKind.LDA}
)

_NORMS = ("l1", "l2", None)

PARAM_RANGES: dict[PreprocKind, dict[str, Real | Int | Choice]] = {
    PreprocKind.STANDARD_SCALER: {},
    PreprocKind.MINMAX: {},
    PreprocKind.MAXABS: {},
    PreprocKind.ROBUST: {"q_lo": Int(0, 50), "q_hi": Int(51, 100)},
    PreprocKind.KERNEL_CENTERER: {},
    PreprocKind.QUANTILE_TRANSFORMER: {
        "n_quantiles": Int(100, 1000),
        "subsample": Int(1000, 100000),
        "output_distribution": Choice(("normal", "uniform")),
    },
    PreprocKind.NORMALIZER: {"norm": Choice(("l1", "l2", "max"))},
    PreprocKind.BINARIZER: {"threshold": Real(0.0, 100.0)},
    PreprocKind.SMOTE: {
        "k": Int(1, 20),
        "m": Choice((50, 100, 200, 400)),
        "r": Real(0.1, 5.0),
    },
    PreprocKind.COUNT_VEC: {"max_df": Int(100, 1000), "min_df": Int(1, 10)},
    PreprocKind.TFIDF_VEC: {"max_df": Int(100, 1000), "min_df": Int(1, 10), "norm": Choice(_NORMS)},
    PreprocKind.HASHING_VEC: {
        "n_features": Choice((1000, 2000, 4000, 6000, 8000, 10000)),
        "norm": Choice(_NORMS),
    },
    PreprocKind.LDA: {
        "n_components": Int(10, 50),
        "doc_topic_prior": Real(0.0, 1.0),
        "topic_word_prior": Real(0.0, 1.0),
        "learning_decay": Real(0.51, 1.0),
        "learning_offset": Real(1.0, 50.0),
        "batch_size": Choice((150, 180, 210, 250, 300)),
        # not tuned: which inference engine and how many Gibbs sweeps
        "method": Choice(("gibbs", "online")),
        "iterations": Int(1, 100000),
    },
    PreprocKind.NO_PREPROC: {},
}

DEFAULTS: dict[PreprocKind, dict[str, Any]] = {
    PreprocKind.ROBUST: {"q_lo": 25, "q_hi": 75},
    PreprocKind.QUANTILE_TRANSFORMER: {"n_quantiles": 1000, "subsample": 100000, "output_distribution": "uniform"},
    PreprocKind.NORMALIZER: {"norm": "l2"},
    PreprocKind.BINARIZER: {"threshold": 0.0},
    PreprocKind.SMOTE: {"k": 5, "m": 100, "r": 2.0},
    PreprocKind.COUNT_VEC: {"max_df": 1000, "min_df": 1},
    PreprocKind.TFIDF_VEC: {"max_df": 1000, "min_df": 1, "norm": "l2"},
    PreprocKind.HASHING_VEC: {"n_features": 1000, "norm": "l2"},
    PreprocKind.LDA: {
        "n_components": 10,
        "doc_topic_prior": 0.1,
        "topic_word_prior": 0.01,
        "learning_decay": 0.7,
        "learning_offset": 10.0,
        "batch_size": 150,
        "method": "gibbs",
        "iterations": 200,
    },
}


@dataclass(frozen=True)
class PreprocSpec:
    kind: PreprocKind
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        kind = PreprocKind(self.kind)
        object.__setattr__(self, "kind", kind)
        ranges = PARAM_RANGES[kind]
        merged = dict(DEFAULTS.get(kind, {}))
        for name, v in dict(self.params).items():
            if name not in ranges:
                raise ValueError(f"{kind.value}: unknown parameter {name!r}")
            if isinstance(v, np.generic):
                v = v.item()
            if not ranges[name].contains(v):
                raise ValueError(f"{kind.value}: {name}={v!r} outside {ranges[name]}")
            merged[name] = v
        object.__setattr__(self, "params", merged)

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "params": dict(self.params)}
