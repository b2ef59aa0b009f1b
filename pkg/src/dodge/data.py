"""Datasets, CSV ingestion and the two train/test protocols.

Defect data arrives as one CSV per project version; the newest version is
held out for testing. Text data has no versions, so it is evaluated with
repeated shuffled k-fold splits.
"""
from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np


class DataError(ValueError):
    """Raised for malformed or inconsistent input data."""


_TRUE = {"1", "true"}
_FALSE = {"0", "false"}


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    name: str
    feature_names: tuple[str, ...]
    rows: np.ndarray
    labels: np.ndarray
    loc: np.ndarray | None = None

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim == 1 and rows.size == 0:
            rows = rows.reshape(0, len(self.feature_names))
        if rows.ndim != 2 or rows.shape[1] != len(self.feature_names):
            raise DataError(
                f"{self.name}: rows must be 2-D with {len(self.feature_names)} columns, got shape {rows.shape}"
            )
        labels = np.asarray(self.labels, dtype=bool).reshape(-1)
        if labels.shape[0] != rows.shape[0]:
            raise DataError(f"{self.name}: {labels.shape[0]} labels for {rows.shape[0]} rows")
        if not np.all(np.isfinite(rows)):
            raise DataError(f"{self.name}: non-finite feature values")
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "rows", _frozen(rows))
        object.__setattr__(self, "labels", _frozen(labels))
        if self.loc is not None:
            loc = np.asarray(self.loc)
            if loc.shape != (rows.shape[0],):
                raise DataError(f"{self.name}: {loc.shape} loc values for {rows.shape[0]} rows")
            if np.any(loc < 0):
                raise DataError(f"{self.name}: negative lines of code")
            object.__setattr__(self, "loc", _frozen(loc.astype(np.int64)))

    def __len__(self) -> int:
        return self.rows.shape[0]

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    @property
    def defect_ratio(self) -> float:
        return float(self.labels.mean()) if len(self) else 0.0

    def subset(self, index) -> "Dataset":
        index = np.asarray(index)
        return Dataset(
            self.name,
            self.feature_names,
            self.rows[index],
            self.labels[index],
            None if self.loc is None else self.loc[index],
        )

    def renamed(self, name: str) -> "Dataset":
        return Dataset(name, self.feature_names, self.rows, self.labels, self.loc)

    def with_rows(self, rows: np.ndarray, feature_names: Sequence[str] | None = None) -> "Dataset":
        """Same labels and loc, new feature matrix."""
        names = self.feature_names if feature_names is None else tuple(feature_names)
        return Dataset(self.name, names, rows, self.labels, self.loc)


@dataclass(frozen=True, eq=False)
class TextCorpus:
    name: str
    documents: tuple[str, ...]
    labels: np.ndarray

    def __post_init__(self):
        docs = tuple(self.documents)
        labels = np.asarray(self.labels, dtype=bool).reshape(-1)
        if len(docs) != labels.shape[0]:
            raise DataError(f"{self.name}: {len(docs)} documents for {labels.shape[0]} labels")
        if not docs:
            raise DataError(f"{self.name}: empty corpus")
        object.__setattr__(self, "documents", docs)
        object.__setattr__(self, "labels", _frozen(labels))

    def __len__(self) -> int:
        return len(self.documents)

    def subset(self, index) -> "TextCorpus":
        index = np.asarray(index)
        return TextCorpus(self.name, tuple(self.documents[i] for i in index), self.labels[index])


Data = Union[Dataset, TextCorpus]


@dataclass(frozen=True)
class Split:
    train: Data
    test: Data

    def __post_init__(self):
        if len(self.train) == 0 or len(self.test) == 0:
            raise DataError("train and test must both be non-empty")
        if isinstance(self.train, Dataset) and isinstance(self.test, Dataset):
            if self.train.feature_names != self.test.feature_names:
                raise DataError("train and test have different feature names")


@dataclass(frozen=True)
class CrossValPlan:
    x: int = 5
    y: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.x < 1 or self.y < 2:
            raise ValueError(f"need x >= 1 and y >= 2, got x={self.x}, y={self.y}")


def _parse_label(cell: str, where: str, counts: bool = False) -> bool:
    v = cell.strip().lower()
    if counts and v.isdigit():
        return int(v) > 0
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise DataError(f"{where}: label {cell!r} is not one of 0, 1, true, false")


def _parse_number(cell: str, where: str) -> float:
    s = cell.strip()
    if not s:
        raise DataError(f"{where}: blank cell")
    try:
        v = float(s)
    except ValueError:
        raise DataError(f"{where}: non-numeric value {cell!r}") from None
    if not math.isfinite(v):
        raise DataError(f"{where}: non-finite value {cell!r}")
    return v


def load_tabular_csv(
    path,
    label_column: str = "defects",
    loc_column: str | None = None,
    drop_columns: Sequence[str] = (),
    name: str | None = None,
    loc_as_feature: bool = False,
    count_labels: bool = False,
) -> Dataset:
    """Read a header-first CSV of numeric metrics plus one boolean label column.

    Every column other than the label, the optional ``loc_column`` and any
    ``drop_columns`` becomes a feature, in header order. ``loc_as_feature``
    keeps the loc column among the features as well (public defect data
    lists loc as an ordinary metric). ``count_labels`` accepts non-negative
    integer defect counts, read as defective when positive. Rows are numbered
    from 2 in error messages (the header is row 1).
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if label_column not in header:
            raise DataError(f"{path}: missing label column {label_column!r}")
        if loc_column is not None and loc_column not in header:
            raise DataError(f"{path}: missing loc column {loc_column!r}")
        dropped = set(drop_columns)
        li = header.index(label_column)
        ci = header.index(loc_column) if loc_column is not None else None
        feat_idx = [
            i for i, h in enumerate(header) if i != li and (i != ci or loc_as_feature) and h not in dropped
        ]
        rows, labels, loc = [], [], []
        for lineno, record in enumerate(reader, start=2):
            if not record or all(not c.strip() for c in record):
                continue
            if len(record) != len(header):
                raise DataError(
                    f"{path}: row {lineno} has {len(record)} cells, header has {len(header)}"
                )
            rows.append([_parse_number(record[i], f"{path}: row {lineno}, column {header[i]!r}") for i in feat_idx])
            labels.append(_parse_label(record[li], f"{path}: row {lineno}", count_labels))
            if ci is not None:
                v = _parse_number(record[ci], f"{path}: row {lineno}, column {loc_column!r}")
                if v < 0 or v != int(v):
                    raise DataError(f"{path}: row {lineno}: loc must be a non-negative integer")
                loc.append(int(v))
    names = tuple(header[i] for i in feat_idx)
    return Dataset(
        name or path.stem,
        names,
        np.array(rows, dtype=float).reshape(len(rows), len(names)),
        np.array(labels, dtype=bool),
        np.array(loc, dtype=np.int64) if ci is not None else None,
    )


def write_tabular_csv(data: Dataset, path, label_column: str = "defects", loc_column: str | None = None):
    """Inverse of :func:`load_tabular_csv`; floats are written with ``repr`` so they round-trip."""
    header = list(data.feature_names)
    if loc_column is not None and data.loc is not None:
        header.append(loc_column)
    header.append(label_column)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(len(data)):
            rec = [repr(float(v)) for v in data.rows[i]]
            if loc_column is not None and data.loc is not None:
                rec.append(str(int(data.loc[i])))
            rec.append("1" if data.labels[i] else "0")
            w.writerow(rec)


def load_text_csv(path, text_column: str = "text", label_column: str = "severe", name: str | None = None) -> TextCorpus:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    docs, labels = [], []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        for col in (text_column, label_column):
            if col not in fields:
                raise DataError(f"{path}: missing column {col!r}")
        for lineno, rec in enumerate(reader, start=2):
            docs.append(rec[text_column] or "")
            labels.append(_parse_label(rec[label_column] or "", f"{path}: row {lineno}"))
    return TextCorpus(name or path.stem, tuple(docs), np.array(labels, dtype=bool))


def _version_key(path: Path):
    # natural sort: "poi-10.0" after "poi-2.5"
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", path.stem)]


def load_versions(directory, **kwargs) -> list[Dataset]:
    """Load every ``*.csv`` in ``directory``, oldest version first (natural filename order)."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"no such directory: {directory}")
    files = sorted(directory.glob("*.csv"), key=_version_key)
    if not files:
        raise DataError(f"{directory}: no CSV files")
    return [load_tabular_csv(f, **kwargs) for f in files]


def concat(datasets: Sequence[Dataset], name: str | None = None) -> Dataset:
    first = datasets[0]
    for d in datasets[1:]:
        if d.feature_names != first.feature_names:
            raise DataError(f"feature names of {d.name} differ from {first.name}")
    has_loc = all(d.loc is not None for d in datasets)
    return Dataset(
        name or first.name,
        first.feature_names,
        np.vstack([d.rows for d in datasets]),
        np.concatenate([d.labels for d in datasets]),
        np.concatenate([d.loc for d in datasets]) if has_loc else None,
    )


def version_split(ordered_versions: Sequence[Dataset]) -> Split:
    """Train on every version but the newest; test on the newest."""
    if len(ordered_versions) < 2:
        raise DataError(f"need at least 2 versions, got {len(ordered_versions)}")
    *older, latest = ordered_versions
    for d in ordered_versions[1:]:
        if d.feature_names != ordered_versions[0].feature_names:
            raise DataError(f"feature names of {d.name} differ from {ordered_versions[0].name}")
    return Split(concat(older, name=older[0].name), latest)


def cross_val_splits(corpus: Data, plan: CrossValPlan) -> list[Split]:
    """``plan.x`` shuffled repeats of ``plan.y``-fold cross-validation.

    Repeat ``r`` is shuffled with ``default_rng([plan.seed, r])``, so adding
    repeats never changes earlier ones.
    """
    n = len(corpus)
    if n < plan.y:
        raise DataError(f"corpus of {n} items is smaller than {plan.y} bins")
    splits = []
    for r in range(plan.x):
        perm = np.random.default_rng([plan.seed, r]).permutation(n)
        for test_idx in np.array_split(perm, plan.y):
            mask = np.ones(n, dtype=bool)
            mask[test_idx] = False
            train_idx = np.flatnonzero(mask)
            splits.append(Split(corpus.subset(train_idx), corpus.subset(np.sort(test_idx))))
    return splits
