"""Tokenizing, stemming and bag-of-words vectorizers for bug-report text."""
from __future__ import annotations

import re
import zlib
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np
from nltk.stem.porter import PorterStemmer

from ..data import DataError, Dataset, TextCorpus

_TOKEN = re.compile(r"[a-z0-9]+")


@lru_cache(maxsize=1)
def stop_words() -> frozenset[str]:
    text = resources.files(__package__).joinpath("stopwords.txt").read_text(encoding="utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


@lru_cache(maxsize=1)
def _stemmer() -> PorterStemmer:
    return PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)


@dataclass(frozen=True, eq=False)
class TokenizedCorpus:
    name: str
    tokens: tuple[tuple[str, ...], ...]
    labels: np.ndarray

    def __len__(self) -> int:
        return len(self.tokens)

    def subset(self, index) -> "TokenizedCorpus":
        index = np.asarray(index)
        return TokenizedCorpus(self.name, tuple(self.tokens[i] for i in index), self.labels[index])


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop stop words, Porter-stem."""
    stops = stop_words()
    stem = _stemmer().stem
    return [stem(t) for t in _TOKEN.findall(text.lower()) if t not in stops]


def tokenize_and_stem(corpus: TextCorpus) -> TokenizedCorpus:
    cache: dict[str, tuple[str, ...]] = {}
    out = []
    for doc in corpus.documents:
        if doc not in cache:
            cache[doc] = tuple(tokenize(doc))
        out.append(cache[doc])
    return TokenizedCorpus(corpus.name, tuple(out), corpus.labels)


def _normalize(M: np.ndarray, norm) -> np.ndarray:
    if norm is None:
        return M
    if norm == "l1":
        s = np.abs(M).sum(axis=1)
    else:
        s = np.sqrt((M * M).sum(axis=1))
    s[s == 0] = 1.0
    return M / s[:, None]


def build_vocabulary(corpus: TokenizedCorpus, min_df: int = 1, max_df: int | None = None) -> dict[str, int]:
    """Terms whose document frequency lies in ``[min_df, max_df]`` (absolute counts), sorted."""
    df: dict[str, int] = {}
    for toks in corpus.tokens:
        for t in set(toks):
            df[t] = df.get(t, 0) + 1
    keep = sorted(t for t, c in df.items() if c >= min_df and (max_df is None or c <= max_df))
    if not keep:
        raise DataError(f"{corpus.name}: empty vocabulary after document-frequency filtering")
    return {t: i for i, t in enumerate(keep)}


def count_matrix(corpus: TokenizedCorpus, vocabulary: dict[str, int]) -> np.ndarray:
    M = np.zeros((len(corpus), len(vocabulary)))
    for i, toks in enumerate(corpus.tokens):
        for t in toks:
            j = vocabulary.get(t)
            if j is not None:
                M[i, j] += 1.0
    return M


def document_frequency(corpus: TokenizedCorpus, vocabulary: dict[str, int]) -> np.ndarray:
    return (count_matrix(corpus, vocabulary) > 0).sum(axis=0)


def smooth_idf(df: np.ndarray, n_docs: int) -> np.ndarray:
    return np.log((1.0 + n_docs) / (1.0 + df)) + 1.0


def hashing_matrix(corpus: TokenizedCorpus, n_features: int, norm) -> np.ndarray:
    M = np.zeros((len(corpus), n_features))
    for i, toks in enumerate(corpus.tokens):
        for t in toks:
            M[i, zlib.crc32(t.encode("utf-8")) % n_features] += 1.0
    return _normalize(M, norm)


def as_dataset(corpus: TokenizedCorpus, M: np.ndarray, names) -> Dataset:
    return Dataset(corpus.name, tuple(names), M, corpus.labels)
