"""Synthetic defect-style datasets with a planted signal.

Each dataset has metric-like non-negative features (log-normal), a label
drawn from a logistic model over a few informative features, and a lines
of code column loosely tied to size-like features. Rows are split into two
equal "versions" so the version-split protocol applies unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import Dataset, Split, version_split, write_tabular_csv


@dataclass(frozen=True)
class SyntheticSpec:
    name: str
    seed: int
    n_rows: int = 500
    n_features: int = 10
    n_informative: int = 3
    signal: float = 1.5       # logit scale of the informative features
    defect_rate: float = 0.35
    label_noise: float = 0.05


# ten datasets spanning weak to strong signal and low to high defect rates
SUITE = tuple(
    SyntheticSpec(f"syn{i:02d}", seed=1000 + i, n_informative=2 + i % 3,
                  signal=(0.8, 1.2, 1.6, 2.0, 2.5)[i % 5], defect_rate=(0.2, 0.3, 0.4, 0.5)[i % 4])
    for i in range(10)
)


def make_dataset(spec: SyntheticSpec) -> Dataset:
    rng = np.random.default_rng(spec.seed)
    n, p = spec.n_rows, spec.n_features
    z = rng.standard_normal((n, p))
    z[:, 1:] += 0.3 * z[:, :1]                  # a shared "size" factor, as real code metrics have
    X = np.round(np.exp(1.0 + 0.8 * z), 3)
    w = np.zeros(p)
    w[: spec.n_informative] = rng.uniform(0.5, 1.0, spec.n_informative) * spec.signal
    logit = z @ w
    # intercept chosen so the expected defect rate is roughly the target
    logit -= np.quantile(logit, 1.0 - spec.defect_rate)
    y = rng.random(n) < 1.0 / (1.0 + np.exp(-logit))
    flip = rng.random(n) < spec.label_noise
    y = np.where(flip, ~y, y)
    loc = np.maximum(1, np.round(20 * np.exp(0.9 * z[:, 0] + 0.4 * rng.standard_normal(n)))).astype(int)
    names = tuple(f"m{j}" for j in range(p))
    return Dataset(spec.name, names, X, y, loc)


def versions(spec: SyntheticSpec, n_versions: int = 2) -> list[Dataset]:
    ds = make_dataset(spec)
    parts = np.array_split(np.arange(len(ds)), n_versions)
    return [ds.subset(idx).renamed(f"{spec.name}-v{i + 1}") for i, idx in enumerate(parts)]


def suite_splits(suite=SUITE) -> dict[str, Split]:
    return {s.name: version_split(versions(s)) for s in suite}


def write_suite(out_dir, suite=SUITE):
    """One directory per dataset holding ``v1.csv``, ``v2.csv`` (with a ``loc`` column)."""
    out = Path(out_dir)
    for s in suite:
        d = out / s.name
        d.mkdir(parents=True, exist_ok=True)
        for i, v in enumerate(versions(s)):
            write_tabular_csv(v, d / f"v{i + 1}.csv", loc_column="loc")
    return out


# a stand-in for the public poi versions: same sizes and defect counts --------

POI_VERSIONS = (("1.5", 237, 141), ("2.0", 314, 37), ("2.5", 385, 248), ("3.0", 442, 281))
POI_FEATURES = ("wmc", "dit", "noc", "cbo", "rfc", "lcom", "ca", "ce", "npm", "lcom3", "loc", "dam", "moa",
                "mfa", "cam", "ic", "cbm", "amc", "max_cc", "avg_cc")


def poi_standin(seed: int = 20) -> list[Dataset]:
    """Four versions with the poi row and defect counts and 20 CK/OO-style metrics."""
    rng = np.random.default_rng(seed)
    out = []
    for ver, n, n_bad in POI_VERSIONS:
        y = np.zeros(n, dtype=bool)
        y[rng.choice(n, n_bad, replace=False)] = True
        size = rng.standard_normal(n) + 0.9 * y
        cols = {}
        cols["wmc"] = np.round(np.exp(2.0 + 0.8 * size + 0.3 * rng.standard_normal(n)))
        cols["dit"] = rng.integers(1, 6, n).astype(float)
        cols["noc"] = rng.poisson(0.5, n).astype(float)
        cols["cbo"] = np.round(np.exp(1.8 + 0.6 * size + 0.4 * rng.standard_normal(n)))
        cols["rfc"] = np.round(cols["wmc"] * rng.uniform(1.5, 3.0, n))
        cols["lcom"] = np.round(cols["wmc"] ** 2 * rng.uniform(0.0, 0.5, n))
        cols["ca"] = rng.poisson(np.exp(1.0 + 0.3 * size)).astype(float)
        cols["ce"] = np.round(cols["cbo"] * rng.uniform(0.3, 0.9, n))
        cols["npm"] = np.round(cols["wmc"] * rng.uniform(0.3, 0.9, n))
        cols["lcom3"] = np.round(rng.uniform(0, 2, n), 3)
        cols["loc"] = np.round(np.exp(4.5 + 0.9 * size + 0.3 * rng.standard_normal(n)))
        cols["dam"] = np.round(rng.uniform(0, 1, n), 3)
        cols["moa"] = rng.poisson(1.0, n).astype(float)
        cols["mfa"] = np.round(rng.uniform(0, 1, n), 3)
        cols["cam"] = np.round(np.clip(0.6 - 0.1 * size + 0.1 * rng.standard_normal(n), 0, 1), 3)
        cols["ic"] = rng.integers(0, 3, n).astype(float)
        cols["cbm"] = rng.integers(0, 5, n).astype(float)
        cols["amc"] = np.round(cols["loc"] / np.maximum(cols["wmc"], 1), 3)
        cols["max_cc"] = np.round(np.exp(1.0 + 0.5 * size + 0.3 * rng.standard_normal(n)))
        cols["avg_cc"] = np.round(cols["max_cc"] * rng.uniform(0.2, 0.8, n), 3)
        X = np.column_stack([cols[f] for f in POI_FEATURES])
        out.append(Dataset(f"poi-{ver}", POI_FEATURES, X, y, cols["loc"].astype(int)))
    return out


def write_poi_standin(out_dir, seed: int = 20):
    """Writes ``poi-<version>.csv`` files in the public layout (metrics then a ``bug`` count)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for ds in poi_standin(seed):
        write_tabular_csv(ds, out / f"{ds.name}.csv", label_column="bug")
    return out
