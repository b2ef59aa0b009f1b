"""``dodge`` command line: tune, fft, baseline, run, report, cells.

Exit status: 0 on success, 1 for a configuration error, 2 for a data error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .algorithm import DodgeConfig, run_dodge
from .baselines import DEConfig, de_rf, random_search, smotuned
from .data import CrossValPlan, DataError, cross_val_splits, load_text_csv
from .evaluate import Evaluator
from .harness import (
    ConfigError,
    ExperimentConfig,
    cell_occupancy,
    history_points,
    read_records,
    report,
    resolve_defect,
    run_experiment,
    run_fft,
)
from .metrics import Goal
from .space import Task, build_table1_tree

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 1, 2


def _add_data_args(p: argparse.ArgumentParser):
    p.add_argument("--task", choices=[t.value for t in Task], default="defect")
    p.add_argument("--data", required=True,
                   help="defect: directory of version CSVs (oldest first by name), 'synthetic:<name>' or "
                        "'poi-standin'; text: a CSV with text,severe columns")
    p.add_argument("--goal", choices=[g.value for g in Goal], default="d2h")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--label-column", default=None, help="default: defects, else bug (read as counts)")
    p.add_argument("--loc-column", default=None, help="default: loc, when present")
    p.add_argument("--fold", type=int, default=0, help="text task: which of the 5x5 cross-validation splits")
    p.add_argument("--holdout", type=float, default=0.0,
                   help="score tunings on this fraction of train instead of the rows fitted on")
    p.add_argument("--history", type=Path, default=None, help="write the evaluation history here (JSON lines)")
    p.add_argument("--json", action="store_true", help="print the result as JSON")


def _split(args):
    if args.task == "text":
        if args.goal == "popt20":
            raise ConfigError("popt20 does not apply to text mining")
        splits = cross_val_splits(load_text_csv(args.data), CrossValPlan(5, 5, args.seed))
        if not 0 <= args.fold < len(splits):
            raise ConfigError(f"--fold must be in [0, {len(splits) - 1}]")
        return splits[args.fold]
    splits = resolve_defect(args.data, args.label_column, args.loc_column)
    if len(splits) != 1:
        raise ConfigError("--data must name exactly one dataset")
    split = next(iter(splits.values()))
    if args.goal == "popt20" and split.train.loc is None:
        raise ConfigError("popt20 needs a lines-of-code column (--loc-column)")
    return split


def _test_metrics(res, split, goal, seed, holdout):
    """Test d2h and (when loc is known) Popt(20) of the chosen configuration."""
    other = Goal.POPT20 if goal is Goal.D2H else Goal.D2H
    metrics = dict(res.test_metrics)
    if "popt20" not in metrics and getattr(split.test, "loc", None) is not None:
        ev = Evaluator(split, other, seed, holdout)
        metrics.update(ev.test(res.best_choice, res.best_index).metrics)
    return metrics


def _emit(args, payload: dict, history):
    if args.history is not None:
        args.history.parent.mkdir(parents=True, exist_ok=True)
        args.history.write_text("".join(json.dumps(h, sort_keys=True) + "\n" for h in history), encoding="utf-8")
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
        return
    for k, v in payload.items():
        if isinstance(v, float):
            print(f"{k:>18}: {v:.4f}")
        elif isinstance(v, dict):
            print(f"{k:>18}: " + ", ".join(f"{a}={b:.4f}" if isinstance(b, float) else f"{a}={b}" for a, b in v.items()))
        else:
            print(f"{k:>18}: {v}")


def cmd_tune(args) -> int:
    split = _split(args)
    goal = Goal.parse(args.goal)
    cfg = DodgeConfig.with_budget(args.n, n1=args.n1, epsilon=args.epsilon, goal=goal, seed=args.seed,
                                  holdout=args.holdout)
    res = run_dodge(cfg, split, build_table1_tree(args.task))
    metrics = _test_metrics(res, split, goal, args.seed, args.holdout)
    payload = {
        "best": res.best_choice.describe(),
        "train_" + goal.value: res.best_train_score.value,
        "test_" + goal.value: res.test_score.value,
        "test_metrics": metrics,
        "evaluations": res.evaluations_used,
        "redundant": sum(h.redundant for h in res.history),
    }
    _emit(args, payload, [h.to_json() for h in res.history])
    return EXIT_OK


def cmd_fft(args) -> int:
    if args.task != "defect":
        raise ConfigError("fft needs tabular defect data")
    split = _split(args)
    out = run_fft(split, Goal.parse(args.goal), args.depth)
    payload = {
        "tree": "\n" + out.best_config["fftree"],
        "train_" + args.goal: out.train_score,
        "test_" + args.goal: out.test_score,
        "test_metrics": out.test_metrics,
        "candidates": out.evaluations,
    }
    _emit(args, payload, out.history)
    return EXIT_OK


def cmd_baseline(args) -> int:
    split = _split(args)
    goal = Goal.parse(args.goal)
    ev = Evaluator(split, goal, args.seed, args.holdout)
    de = DEConfig(np=args.np, f=args.f, cr=args.cr, lives=args.lives, seed=args.seed)
    if args.kind == "random":
        res = random_search(build_table1_tree(args.task), args.n, split, goal, args.seed, evaluator=ev)
    elif args.task != "defect":
        raise ConfigError(f"{args.kind} needs tabular defect data")
    elif args.kind == "smotuned":
        res = smotuned(split, goal=goal, de=de, seed=args.seed, evaluator=ev)
    else:
        res = de_rf(split, goal=goal, de=de, seed=args.seed, evaluator=ev)
    payload = {
        "best": res.best_choice.describe() if hasattr(res.best_choice, "describe") else json.dumps(res.best_choice.to_json()),
        "train_" + goal.value: res.best_train_score.value,
        "test_" + goal.value: res.test_score.value,
        "test_metrics": _test_metrics(res, split, goal, args.seed, args.holdout),
        "evaluations": res.evaluations_used,
    }
    _emit(args, payload, [h.to_json() for h in res.history])
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    if args.output_dir is not None:
        cfg = ExperimentConfig(**{**cfg.__dict__, "output_dir": str(args.output_dir)})

    def progress(rec):
        print(f"{rec.dataset} {rec.treatment} {rec.goal} seed={rec.seed} test={rec.test_score:.4f} "
              f"evals={rec.evaluations} ({rec.wall_time:.0f} ms)", flush=True)

    recs = run_experiment(cfg, progress if not args.quiet else None)
    print(f"{len(recs)} records in {Path(cfg.output_dir) / 'records.jsonl'}")
    return EXIT_OK


def _records(path: Path):
    path = path / "records.jsonl" if path.is_dir() else path
    if not path.exists():
        raise DataError(f"no records at {path}")
    recs = read_records(path)
    if not recs:
        raise DataError(f"{path}: no records")
    return path, recs


def cmd_report(args) -> int:
    path, recs = _records(args.records)
    goals = [args.goal] if args.goal else sorted({r.goal for r in recs})
    for g in goals:
        rep = report(recs, g, seed=args.seed)
        sys.stdout.write(rep.text + "\n")
        if args.csv is not None:
            out = args.csv if len(goals) == 1 else args.csv.with_name(f"{args.csv.stem}-{g}{args.csv.suffix}")
            out.write_text(rep.csv, encoding="utf-8")
    return EXIT_OK


def cmd_cells(args) -> int:
    path, recs = _records(args.records)
    metrics = tuple(args.metrics.split(","))
    pts = history_points(recs, path.parent, metrics)
    if len(pts) == 0:
        raise DataError(f"no evaluations with metrics {metrics} in the histories")
    rep = cell_occupancy(pts, args.epsilon)
    print(f"{len(pts)} evaluations over ({', '.join(metrics)}), epsilon={args.epsilon:g}: "
          f"{rep.occupied_cells} of {rep.max_cells} cells occupied")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage mistakes are configuration errors (argparse would exit 2)
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dodge", description="Epsilon-domination tuning for SE analytics.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("tune", help="run DODGE on one dataset")
    _add_data_args(p)
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--n", type=int, default=30, help="total evaluations")
    p.add_argument("--n1", type=int, default=12, help="random evaluations before weighted descent")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("fft", help="train a fast-and-frugal tree")
    _add_data_args(p)
    p.add_argument("--depth", type=int, default=4)
    p.set_defaults(func=cmd_fft)

    p = sub.add_parser("baseline", help="run a comparison optimizer")
    _add_data_args(p)
    p.add_argument("--kind", choices=("de-rf", "smotuned", "random"), required=True)
    p.add_argument("--n", type=int, default=30, help="random: number of samples")
    p.add_argument("--np", type=int, default=10)
    p.add_argument("--f", type=float, default=0.75)
    p.add_argument("--cr", type=float, default=0.3)
    p.add_argument("--lives", type=int, default=5)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("run", help="run (or resume) an experiment from a JSON config")
    p.add_argument("config", type=Path)
    p.add_argument("--output-dir", type=Path, default=None)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="compare treatments from a records file")
    p.add_argument("records", type=Path, help="records.jsonl or its experiment directory")
    p.add_argument("--goal", choices=[g.value for g in Goal], default=None)
    p.add_argument("--csv", type=Path, default=None)
    p.add_argument("--seed", type=int, default=0, help="bootstrap seed")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("cells", help="count occupied epsilon-cells over evaluated configurations")
    p.add_argument("records", type=Path)
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--metrics", default="recall,fpr")
    p.set_defaults(func=cmd_cells)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:      # usage errors and --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
