"""Effect sizes and significance tests for comparing treatments over repeats."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

A12_SMALL = 0.6   # Vargha-Delaney boundary above which an effect is more than small


@dataclass(frozen=True)
class SampleSet:
    label: str
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValueError(f"{self.label}: empty sample")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))


@dataclass(frozen=True)
class Verdict:
    label: str
    worse: bool
    significant: bool
    effect_a12: float
    small_effect_threshold: float
    mean: float


def small_effect(values) -> float:
    """20% of the sample standard deviation (n - 1 denominator)."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise ValueError("small_effect needs at least 2 values")
    return 0.2 * float(np.std(v, ddof=1))


def a12(xs, ys) -> float:
    """P(x > y) + P(x = y) / 2 for random draws x from ``xs`` and y from ``ys``.

    Computed from mid-ranks of the pooled sample; equal to pair counting.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size == 0 or y.size == 0:
        raise ValueError("a12 needs non-empty samples")
    n, m = x.size, y.size
    ranks = rankdata(np.concatenate([x, y]))   # average ranks for ties
    # rank-sum of xs minus its minimum equals (#x>y + ties/2); times 2 keeps it integral
    twice = 2.0 * ranks[:n].sum() - n * (n + 1)
    return float(round(twice) / (2.0 * n * m))


def bootstrap_significant(xs, ys, resamples: int = 1000, confidence: float = 0.95, seed: int = 0) -> bool:
    """Pooled-null bootstrap of the absolute mean difference.

    Both samples are redrawn (with replacement, original sizes) from the
    pooled values; the difference is significant when the observed
    ``|mean(xs) - mean(ys)|`` exceeds the ``confidence`` quantile of the
    resampled differences.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size < 2 or y.size < 2:
        raise ValueError("bootstrap needs at least 2 values per sample")
    observed = abs(x.mean() - y.mean())
    if observed == 0.0:
        return False
    pooled = np.concatenate([x, y])
    rng = np.random.default_rng(seed)
    bx = rng.choice(pooled, size=(resamples, x.size)).mean(axis=1)
    by = rng.choice(pooled, size=(resamples, y.size)).mean(axis=1)
    null = np.abs(bx - by)
    return bool(observed > np.quantile(null, confidence))


def compare(treatments: Sequence[SampleSet], maximize: bool, resamples: int = 1000, seed: int = 0) -> list[Verdict]:
    """One verdict per treatment against the best-mean treatment.

    A treatment is ``worse`` when its mean is on the bad side of the best,
    the best beats it with A12 above 0.6, and the bootstrap rejects equal
    means. The best treatment (earliest on mean ties) is never worse.
    """
    if len(treatments) < 2:
        raise ValueError("compare needs at least 2 treatments")
    means = [t.mean for t in treatments]
    best_i = int(np.argmax(means) if maximize else np.argmin(means))
    best = treatments[best_i]
    pooled = np.concatenate([t.values for t in treatments])
    threshold = small_effect(pooled) if pooled.size >= 2 else 0.0
    out = []
    for i, t in enumerate(treatments):
        if i == best_i:
            out.append(Verdict(t.label, False, False, 0.5, threshold, t.mean))
            continue
        # effect oriented so that > 0.5 means best is better
        eff = a12(best.values, t.values) if maximize else a12(t.values, best.values)
        bad_side = t.mean < best.mean if maximize else t.mean > best.mean
        sig = (len(t.values) >= 2 and len(best.values) >= 2
               and bootstrap_significant(best.values, t.values, resamples, seed=seed))
        out.append(Verdict(t.label, bool(bad_side and eff > A12_SMALL and sig), sig, eff, threshold, t.mean))
    return out
