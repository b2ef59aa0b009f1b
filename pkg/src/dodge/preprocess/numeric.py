"""Numeric feature transforms and SMOTE for tabular (defect) data."""
from __future__ import annotations

import numpy as np
from scipy.special import ndtri

from ..data import DataError, Dataset
from .spec import PreprocKind

# clip the uniform quantiles before the inverse normal so outputs stay finite
_QT_EPS = 1e-7


def _safe(scale):
    scale = np.asarray(scale, dtype=float).copy()
    scale[scale == 0] = 1.0
    return scale


def fit_numeric(kind: PreprocKind, params: dict, X: np.ndarray, seed: int) -> dict:
    """Statistics of ``X`` needed to apply ``kind`` later."""
    if kind is PreprocKind.STANDARD_SCALER:
        return {"center": X.mean(axis=0), "scale": _safe(X.std(axis=0))}
    if kind is PreprocKind.MINMAX:
        lo, hi = X.min(axis=0), X.max(axis=0)
        return {"min": lo, "max": hi, "center": lo, "scale": _safe(hi - lo)}
    if kind is PreprocKind.MAXABS:
        return {"center": np.zeros(X.shape[1]), "scale": _safe(np.abs(X).max(axis=0))}
    if kind is PreprocKind.ROBUST:
        q = np.percentile(X, [params["q_lo"], 50, params["q_hi"]], axis=0)
        return {"center": q[1], "scale": _safe(q[2] - q[0])}
    if kind is PreprocKind.KERNEL_CENTERER:
        # Centering the linear kernel K = X X^T (K - 1K - K1 + 1K1) is the Gram
        # matrix of column-centred X, so centring columns is the feature-space form.
        return {"center": X.mean(axis=0), "scale": np.ones(X.shape[1])}
    if kind is PreprocKind.QUANTILE_TRANSFORMER:
        n = X.shape[0]
        sample = X
        if n > params["subsample"]:
            pick = np.random.default_rng(seed).choice(n, params["subsample"], replace=False)
            sample = X[np.sort(pick)]
        n_q = max(2, min(params["n_quantiles"], sample.shape[0]))
        refs = np.linspace(0.0, 1.0, n_q)
        return {"references": refs, "quantiles": np.quantile(sample, refs, axis=0)}
    if kind in (PreprocKind.NORMALIZER, PreprocKind.BINARIZER, PreprocKind.NO_PREPROC, PreprocKind.SMOTE):
        return {}
    raise ValueError(f"{kind.value} is not a numeric transform")


def _quantile_map(col, quantiles, refs):
    # average of left/right interpolation so runs of equal quantiles map to their midpoint
    fwd = np.interp(col, quantiles, refs)
    bwd = -np.interp(-col, -quantiles[::-1], -refs[::-1])
    return 0.5 * (fwd + bwd)


def apply_numeric(kind: PreprocKind, params: dict, stats: dict, X: np.ndarray) -> np.ndarray:
    if "center" in stats:
        return (X - stats["center"]) / stats["scale"]
    if kind is PreprocKind.QUANTILE_TRANSFORMER:
        out = np.empty_like(X, dtype=float)
        for j in range(X.shape[1]):
            out[:, j] = _quantile_map(X[:, j], stats["quantiles"][:, j], stats["references"])
        if params["output_distribution"] == "normal":
            out = ndtri(np.clip(out, _QT_EPS, 1.0 - _QT_EPS))
        return out
    if kind is PreprocKind.NORMALIZER:
        norm = params["norm"]
        if norm == "l1":
            scale = np.abs(X).sum(axis=1)
        elif norm == "l2":
            scale = np.sqrt((X * X).sum(axis=1))
        else:
            scale = np.abs(X).max(axis=1) if X.shape[1] else np.zeros(X.shape[0])
        return X / _safe(scale)[:, None]
    if kind is PreprocKind.BINARIZER:
        return (X > params["threshold"]).astype(float)
    return np.array(X, dtype=float)


def minkowski_distances(A: np.ndarray, B: np.ndarray, r: float) -> np.ndarray:
    """All-pairs ``(sum |a - b|^r)^(1/r)``; also defined for ``0 < r < 1``."""
    diff = np.abs(A[:, None, :] - B[None, :, :])
    return (diff**r).sum(axis=2) ** (1.0 / r)


def minority_label(labels: np.ndarray) -> bool:
    """The rarer class; ``True`` on a tie."""
    return bool(labels.sum() * 2 <= labels.size)


def smote(data: Dataset, k: int, m: int, r: float, seed: int) -> Dataset:
    """Append ``m`` synthetic minority rows to ``data``.

    Each synthetic row lies on the segment between a random minority row and
    one of its ``k`` nearest minority neighbours under Minkowski-``r``
    distance. The original rows are kept, unchanged, as a prefix.
    """
    y = data.labels
    target = minority_label(y)
    minority = np.flatnonzero(y == target)
    if minority.size < 2:
        raise DataError(f"SMOTE needs at least 2 minority rows, found {minority.size}")
    k = min(int(k), minority.size - 1)
    P = data.rows[minority]
    dist = minkowski_distances(P, P, r)
    np.fill_diagonal(dist, np.inf)
    nn = np.argsort(dist, axis=1, kind="stable")[:, :k]

    rng = np.random.default_rng(seed)
    base = rng.integers(0, minority.size, m)
    mate = nn[base, rng.integers(0, k, m)]
    gap = rng.random(m)[:, None]
    synth = P[base] + gap * (P[mate] - P[base])

    loc = None
    if data.loc is not None:
        L = data.loc[minority].astype(float)
        extra = np.rint(L[base] + gap[:, 0] * (L[mate] - L[base])).astype(np.int64)
        loc = np.concatenate([data.loc, extra])
    return Dataset(
        data.name,
        data.feature_names,
        np.vstack([data.rows, synth]),
        np.concatenate([y, np.full(m, target)]),
        loc,
    )
