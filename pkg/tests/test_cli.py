import json

import pytest

from dodge.cli import main
from dodge.data import write_tabular_csv

from conftest import make_blobs


@pytest.fixture()
def data_dir(tmp_path):
    d = tmp_path / "proj"
    d.mkdir()
    write_tabular_csv(make_blobs(n=50, seed=1), d / "v1.csv", loc_column="loc")
    write_tabular_csv(make_blobs(n=50, seed=2), d / "v2.csv", loc_column="loc")
    return d


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_tune_json(capsys, data_dir, tmp_path):
    hist = tmp_path / "h.jsonl"
    code, out = run(capsys, "tune", "--data", str(data_dir), "--seed", "1", "--json", "--history", str(hist))
    assert code == 0
    payload = json.loads(out.out)
    assert payload["evaluations"] == 30
    assert {"d2h", "popt20"} <= set(payload["test_metrics"])
    assert len(hist.read_text().splitlines()) == 30


def test_fft_and_baselines(capsys, data_dir):
    code, out = run(capsys, "fft", "--data", str(data_dir))
    assert code == 0 and "candidates" in out.out and "else" in out.out
    code, out = run(capsys, "baseline", "--kind", "random", "--n", "4", "--data", str(data_dir), "--json")
    assert code == 0 and json.loads(out.out)["evaluations"] == 4
    code, out = run(capsys, "baseline", "--kind", "de-rf", "--np", "2", "--lives", "1", "--data", str(data_dir))
    assert code == 0


def test_run_report_cells(capsys, data_dir, tmp_path):
    cfg = tmp_path / "c.json"
    out_dir = tmp_path / "out"
    cfg.write_text(json.dumps({"datasets": [str(data_dir)], "treatments": [{"kind": "RANDOM", "n": 3}, "FFT"],
                               "repeats": 3, "output_dir": str(out_dir)}))
    code, _ = run(capsys, "run", str(cfg), "--quiet")
    assert code == 0
    csv_path = tmp_path / "r.csv"
    code, out = run(capsys, "report", str(out_dir), "--csv", str(csv_path))
    assert code == 0 and "FFT" in out.out and csv_path.exists()
    code, out = run(capsys, "cells", str(out_dir), "--epsilon", "0.2")
    assert code == 0 and "of 25 cells" in out.out


def test_exit_codes(capsys, tmp_path, data_dir):
    assert run(capsys, "tune", "--data", str(tmp_path / "nowhere"))[0] == 2
    assert run(capsys, "tune")[0] == 1
    assert run(capsys, "tune", "--data", str(data_dir), "--epsilon", "0")[0] == 1
    assert run(capsys, "report", str(tmp_path / "none.jsonl"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"datasets": ["x"], "treatments": ["NOPE"]}))
    assert run(capsys, "run", str(bad))[0] == 1
    assert run(capsys, "fft", "--task", "text", "--data", str(data_dir))[0] == 1
    assert main(["bogus"]) == 1
    assert main(["--help"]) == 0
