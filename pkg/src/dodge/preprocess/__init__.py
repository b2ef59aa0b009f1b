"""Data pre-processors: numeric transforms and SMOTE for tabular data, vectorizers for text.

``fit`` learns statistics from training data only and also returns the
transformed training set (for SMOTE, the oversampled one). ``apply`` maps
any other data with those frozen statistics; for SMOTE it is the identity.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..data import DataError, Dataset, TextCorpus
from . import lda as _lda
from . import text as _text
from .numeric import apply_numeric, fit_numeric, minkowski_distances, minority_label, smote
from .spec import DEFAULTS, PARAM_RANGES, TEXT_KINDS, PreprocKind, PreprocSpec
from .text import TokenizedCorpus, as_dataset, stop_words, tokenize, tokenize_and_stem


class IncompatibleData(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FittedTransform:
    spec: PreprocSpec
    stats: dict[str, Any]
    train_output: Dataset = field(repr=False)
    n_inputs: int | None = None


def _as_tokens(data) -> TokenizedCorpus:
    if isinstance(data, TokenizedCorpus):
        return data
    if isinstance(data, TextCorpus):
        return tokenize_and_stem(data)
    raise IncompatibleData(f"text pre-processor needs a text corpus, got {type(data).__name__}")


def _text_transform(spec: PreprocSpec, stats: dict, toks: TokenizedCorpus) -> Dataset:
    p = spec.params
    kind = spec.kind
    if kind is PreprocKind.HASHING_VEC:
        M = _text.hashing_matrix(toks, p["n_features"], p["norm"])
        return as_dataset(toks, M, [f"h{i}" for i in range(p["n_features"])])
    vocab = stats["vocabulary"]
    names = sorted(vocab, key=vocab.get)
    M = _text.count_matrix(toks, vocab)
    if kind is PreprocKind.COUNT_VEC:
        return as_dataset(toks, M, names)
    if kind is PreprocKind.TFIDF_VEC:
        return as_dataset(toks, _text._normalize(M * stats["idf"], p["norm"]), names)
    theta = stats["model"].transform(M)
    return as_dataset(toks, theta, [f"topic{i}" for i in range(theta.shape[1])])


def _fit_text(spec: PreprocSpec, toks: TokenizedCorpus, seed: int) -> FittedTransform:
    p = spec.params
    kind = spec.kind
    if kind is PreprocKind.HASHING_VEC:
        stats: dict = {}
        return FittedTransform(spec, stats, _text_transform(spec, stats, toks))
    if kind is PreprocKind.LDA:
        vocab = _text.build_vocabulary(toks)
        M = _text.count_matrix(toks, vocab)
        if p["method"] == "gibbs":
            model = _lda.GibbsLDA(p["n_components"], p["doc_topic_prior"], p["topic_word_prior"], p["iterations"], seed)
        else:
            model = _lda.OnlineLDA(p["n_components"], p["doc_topic_prior"], p["topic_word_prior"],
                                   p["learning_decay"], p["learning_offset"], p["batch_size"], seed)
        theta = model.fit_transform(M)
        stats = {"vocabulary": vocab, "model": model}
        return FittedTransform(spec, stats, as_dataset(toks, theta, [f"topic{i}" for i in range(theta.shape[1])]))
    vocab = _text.build_vocabulary(toks, p["min_df"], p["max_df"])
    stats = {"vocabulary": vocab}
    if kind is PreprocKind.TFIDF_VEC:
        stats["idf"] = _text.smooth_idf(_text.document_frequency(toks, vocab), len(toks))
    return FittedTransform(spec, stats, _text_transform(spec, stats, toks))


def fit(spec: PreprocSpec, train, seed: int = 0) -> FittedTransform:
    if len(train) == 0:
        raise DataError("cannot fit a pre-processor on empty data")
    if spec.kind.is_text:
        return _fit_text(spec, _as_tokens(train), seed)
    if not isinstance(train, Dataset):
        raise IncompatibleData(f"{spec.kind.value} needs tabular data, got {type(train).__name__}")
    if spec.kind is PreprocKind.SMOTE:
        p = spec.params
        return FittedTransform(spec, {}, smote(train, p["k"], p["m"], p["r"], seed), train.n_features)
    stats = fit_numeric(spec.kind, spec.params, train.rows, seed)
    out = train.with_rows(apply_numeric(spec.kind, spec.params, stats, train.rows))
    return FittedTransform(spec, stats, out, train.n_features)


def apply(ft: FittedTransform, data) -> Dataset:
    if ft.spec.kind.is_text:
        return _text_transform(ft.spec, ft.stats, _as_tokens(data))
    if not isinstance(data, Dataset):
        raise IncompatibleData(f"{ft.spec.kind.value} needs tabular data, got {type(data).__name__}")
    if data.n_features != ft.n_inputs:
        raise DataError(f"fitted on {ft.n_inputs} features, got {data.n_features}")
    if ft.spec.kind is PreprocKind.SMOTE:
        return data
    return data.with_rows(apply_numeric(ft.spec.kind, ft.spec.params, ft.stats, data.rows))


def lda_fit_transform(corpus, n_topics: int, doc_topic_prior: float, topic_word_prior: float,
                      iterations: int = 200, seed: int = 0) -> Dataset:
    """Doc-topic distributions of ``corpus`` (rows sum to one); labels pass through."""
    toks = _as_tokens(corpus)
    vocab = _text.build_vocabulary(toks)
    theta = _lda.lda_fit_transform(_text.count_matrix(toks, vocab), n_topics, doc_topic_prior,
                                   topic_word_prior, iterations, seed)
    return as_dataset(toks, theta, [f"topic{i}" for i in range(n_topics)])


__all__ = [
    "DEFAULTS", "PARAM_RANGES", "TEXT_KINDS", "FittedTransform", "IncompatibleData", "PreprocKind",
    "PreprocSpec", "TokenizedCorpus", "apply", "fit", "lda_fit_transform", "minkowski_distances",
    "minority_label", "smote", "stop_words", "tokenize", "tokenize_and_stem",
]
