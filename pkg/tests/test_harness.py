import json

import numpy as np
import pytest

from dodge.data import DataError, write_tabular_csv
from dodge.harness import (
    ConfigError,
    ExperimentConfig,
    RunRecord,
    Treatment,
    canonical_hash,
    cell_occupancy,
    history_points,
    read_records,
    report,
    resolve_defect,
    run_experiment,
)

from conftest import make_blobs


@pytest.fixture()
def version_dir(tmp_path):
    d = tmp_path / "proj"
    d.mkdir()
    write_tabular_csv(make_blobs(n=50, seed=1), d / "v1.csv", loc_column="loc")
    write_tabular_csv(make_blobs(n=50, seed=2), d / "v2.csv", loc_column="loc")
    return d


def config(version_dir, out, **kw):
    base = dict(datasets=[str(version_dir)], treatments=[{"kind": "RANDOM", "n": 3}, "FFT"], repeats=25,
                output_dir=str(out))
    base.update(kw)
    return ExperimentConfig(**base)


def test_cardinality_resume_and_hash(version_dir, tmp_path):
    out = tmp_path / "run"
    recs = run_experiment(config(version_dir, out))
    assert len(recs) == 50
    assert {r.seed for r in recs} == set(range(25))
    h = canonical_hash(recs)
    # simulate an interrupted run: keep 17 records, then a torn line
    path = out / "records.jsonl"
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:17]) + "\n" + lines[17][:40])
    again = run_experiment(config(version_dir, out))
    assert len({r.key for r in again}) == len(again) == 50
    fresh = run_experiment(config(version_dir, tmp_path / "fresh"))
    assert canonical_hash(fresh) == h
    assert json.loads((out / "config.json").read_text())["repeats"] == 25


def test_dodge_records_thirty_evaluations(version_dir, tmp_path):
    cfg = config(version_dir, tmp_path / "d", treatments=["DODGE", "UNTUNED"], repeats=2, goals=["d2h", "popt20"])
    recs = run_experiment(cfg)
    assert len(recs) == 8
    for r in recs:
        assert r.evaluations == (30 if r.treatment.startswith("DODGE") else 1)
        hist = (tmp_path / "d" / r.history_ref).read_text().splitlines()
        assert len(hist) == r.evaluations
    pts = history_points(recs, tmp_path / "d")
    assert pts.shape == (sum(r.evaluations for r in recs), 2)


def test_fft_counts_sixteen(version_dir, tmp_path):
    recs = run_experiment(config(version_dir, tmp_path / "f", treatments=["FFT"], repeats=1))
    assert recs[0].evaluations == 16


def test_config_errors(version_dir, tmp_path):
    with pytest.raises(ConfigError):
        Treatment("GRID")
    with pytest.raises(ConfigError):
        Treatment("UNTUNED", learner="SVM9")
    with pytest.raises(ConfigError):
        config(version_dir, tmp_path, treatments=[])
    with pytest.raises(ConfigError):
        config(version_dir, tmp_path, task="text", goals=["popt20"], treatments=["DODGE"])
    with pytest.raises(ConfigError):
        config(version_dir, tmp_path, task="text", treatments=["FFT"])
    with pytest.raises(ConfigError):
        config(version_dir, tmp_path, repeats=0)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json({"datasets": ["x"], "treatments": ["DODGE"], "colour": 1})
    with pytest.raises(DataError):
        resolve_defect(str(tmp_path / "missing"))
    with pytest.raises(DataError):
        resolve_defect("synthetic:nope")


def test_popt_needs_loc(tmp_path):
    d = tmp_path / "noloc"
    d.mkdir()
    for i in (1, 2):
        write_tabular_csv(make_blobs(n=30, seed=i), d / f"v{i}.csv")
    with pytest.raises(ConfigError):
        run_experiment(config(d, tmp_path / "o", goals=["popt20"], repeats=1))


def record(treatment, dataset, seed, score):
    return RunRecord(treatment, dataset, seed, "d2h", score, 30, 1.0, "")


def test_report_flags():
    rng = np.random.default_rng(0)
    good = [record("A", "ds", s, float(0.2 + 0.01 * rng.random())) for s in range(25)]
    bad = [record("B", "ds", s, float(0.8 + 0.01 * rng.random())) for s in range(25)]
    same = [record("C", "ds", s, good[s].test_score) for s in range(25)]
    rep = report(good + bad + same, "d2h")
    assert rep.flags == {"ds": ["B"]}
    assert "!" in rep.text and "*" in rep.text and "evaluations per run" in rep.text
    assert rep.csv.splitlines()[0].startswith("dataset,treatment")
    assert report(good, "d2h").flags == {"ds": []}
    assert report(good + same, "d2h").flags == {"ds": []}


def test_cells():
    assert cell_occupancy([[0.5, 0.5]], 0.2).max_cells == 25
    assert cell_occupancy([[0.5, 0.5]], 0.2).occupied_cells == 1
    rng = np.random.default_rng(0)
    assert cell_occupancy(rng.random((10_000, 2)), 0.2).occupied_cells == 25
    assert cell_occupancy([[1.0, 1.0], [0.99, 0.85]], 0.2).occupied_cells == 1
    assert cell_occupancy([[0.1, 0.2, 0.3]], 0.1).max_cells == 1000
    assert cell_occupancy([[0.5]], 0.3).max_cells == 4
    with pytest.raises(ValueError):
        cell_occupancy([[1.2, 0.0]], 0.2)
    with pytest.raises(ValueError):
        cell_occupancy([[0.2, 0.0]], 1.0)


def test_read_records_missing_file(tmp_path):
    assert read_records(tmp_path / "none.jsonl") == []
