"""Run DODGE against the comparison treatments and print the verdict table.

Resumable: rerunning with the same output directory skips finished runs.
"""
import argparse
from pathlib import Path

from dodge.harness import ExperimentConfig, read_records, report, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", type=Path, default=Path(__file__).with_name("example_config.json"))
    ap.add_argument("--output-dir", default=None)
    ap.add_argument("--repeats", type=int, default=None)
    args = ap.parse_args()
    cfg = ExperimentConfig.load(args.config)
    overrides = {k: v for k, v in (("output_dir", args.output_dir), ("repeats", args.repeats)) if v is not None}
    if overrides:
        cfg = ExperimentConfig(**{**cfg.__dict__, **overrides})
    run_experiment(cfg, progress=lambda r: print(f"{r.dataset:8s} {r.treatment:20s} {r.goal} seed={r.seed} "
                                                 f"test={r.test_score:.3f}", flush=True))
    recs = read_records(Path(cfg.output_dir) / "records.jsonl")
    for g in cfg.goals:
        print(report(recs, g).text)


if __name__ == "__main__":
    main()
