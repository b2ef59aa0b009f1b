"""Experiment orchestration: treatments x datasets x repeats, records, reports, cells.

An experiment directory holds ``records.jsonl`` (one :class:`RunRecord` per
line, append-only) and ``histories/`` (one JSON-lines file per run). Runs
already present in ``records.jsonl`` are skipped, so an interrupted
experiment resumes where it stopped.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import synthetic
from .algorithm import DodgeConfig, run_dodge
from .baselines import DEConfig, de_rf, random_search, smotuned
from .data import CrossValPlan, DataError, Split, cross_val_splits, load_text_csv, load_versions, version_split
from .evaluate import Evaluator, Pipeline, TuningResult
from .fftrees import build_candidates, select
from .learners import LearnerKind, LearnerSpec
from .metrics import Goal
from .preprocess import PreprocKind, PreprocSpec
from .space import Task, build_table1_tree
from .stats import SampleSet, compare


class ConfigError(ValueError):
    """An experiment or command line that cannot be run as given."""


# treatments -------------------------------------------------------------------

TREATMENT_KINDS = ("DODGE", "FFT", "RANDOM", "SMOTUNED", "DE_RF", "UNTUNED")


@dataclass(frozen=True)
class Treatment:
    kind: str
    epsilon: float = 0.2
    n: int = 30
    learner: str = "RANDOM_FOREST"

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in TREATMENT_KINDS:
            raise ConfigError(f"unknown treatment {self.kind!r}; expected one of {', '.join(TREATMENT_KINDS)}")
        object.__setattr__(self, "kind", kind)
        if kind == "UNTUNED":
            try:
                LearnerKind(self.learner)
            except ValueError:
                raise ConfigError(f"unknown learner {self.learner!r}") from None
        if self.n < 1 or self.epsilon <= 0:
            raise ConfigError(f"{kind}: need n >= 1 and epsilon > 0")

    @property
    def label(self) -> str:
        if self.kind == "DODGE":
            return f"DODGE(e={self.epsilon:g},N={self.n})"
        if self.kind == "RANDOM":
            return f"RANDOM({self.n})"
        if self.kind == "UNTUNED":
            return f"UNTUNED({self.learner})"
        return self.kind

    @classmethod
    def from_json(cls, d) -> "Treatment":
        if isinstance(d, str):
            return cls(d)
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(f"bad treatment {d!r}: {exc}") from None


# configuration --------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    """JSON schema (all keys but ``datasets`` and ``treatments`` optional)::

        {"task": "defect" | "text",
         "datasets": ["path/to/versions_dir", "synthetic:syn00", "synthetic:all", "poi-standin"],
         "treatments": [{"kind": "DODGE", "epsilon": 0.2, "n": 30}, {"kind": "RANDOM", "n": 30},
                        "FFT", "SMOTUNED", "DE_RF", {"kind": "UNTUNED", "learner": "KNN"}],
         "goals": ["d2h", "popt20"], "repeats": 25, "base_seed": 0,
         "output_dir": "runs/exp1", "label_column": "defects", "loc_column": null,
         "holdout": 0.0}
    """

    datasets: tuple[str, ...]
    treatments: tuple[Treatment, ...]
    task: Task = Task.DEFECT
    goals: tuple[Goal, ...] = (Goal.D2H,)
    repeats: int = 25
    base_seed: int = 0
    output_dir: str = "runs"
    label_column: str | None = None
    loc_column: str | None = None
    holdout: float = 0.0

    def __post_init__(self):
        try:
            object.__setattr__(self, "task", Task(self.task))
            object.__setattr__(self, "goals", tuple(Goal.parse(g) for g in self.goals))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        object.__setattr__(self, "datasets", tuple(self.datasets))
        object.__setattr__(self, "treatments", tuple(
            t if isinstance(t, Treatment) else Treatment.from_json(t) for t in self.treatments))
        if not self.datasets or not self.treatments or not self.goals:
            raise ConfigError("need at least one dataset, treatment and goal")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if self.task is Task.TEXT:
            if Goal.POPT20 in self.goals:
                raise ConfigError("popt20 is a code-review metric; it does not apply to text mining")
            bad = [t.label for t in self.treatments if t.kind in ("FFT", "SMOTUNED", "DE_RF", "UNTUNED")]
            if bad:
                raise ConfigError(f"treatments {bad} need tabular data; use DODGE or RANDOM for text")

    @classmethod
    def from_json(cls, d: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "datasets" not in d or "treatments" not in d:
            raise ConfigError("config needs 'datasets' and 'treatments'")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None


# dataset resolution -----------------------------------------------------------


def resolve_defect(ref: str, label_column: str | None = None, loc_column: str | None = None) -> dict[str, Split]:
    """Named splits for a dataset reference (see :class:`ExperimentConfig`)."""
    if ref.startswith("synthetic:"):
        which = ref.split(":", 1)[1]
        suite = synthetic.SUITE if which == "all" else [s for s in synthetic.SUITE if s.name == which]
        if not suite:
            raise DataError(f"no synthetic dataset {which!r}")
        return synthetic.suite_splits(suite)
    if ref == "poi-standin":
        return {"poi": version_split(synthetic.poi_standin())}
    path = Path(ref)
    if not path.is_dir():
        raise DataError(f"dataset {ref!r} is neither a directory nor a known name")
    return {path.name: version_split(load_versions(path, **_csv_options(path, label_column, loc_column)))}


def _csv_options(directory: Path, label_column, loc_column) -> dict:
    """Column roles for a version directory; ``None`` means detect from the first header."""
    first = min(directory.glob("*.csv"), default=None)
    header = []
    if first is not None:
        with first.open(newline="", encoding="utf-8") as fh:
            header = [h.strip() for h in next(csv.reader(fh), [])]
    opts: dict = {}
    if label_column is None:
        label_column = next((c for c in ("defects", "bug", "bugs") if c in header), "defects")
    opts["label_column"] = label_column
    if label_column in ("bug", "bugs"):
        # public defect tables store counts; ids and names are not metrics
        opts["count_labels"] = True
        opts["drop_columns"] = tuple(c for c in ("name", "version", "name.1") if c in header)
    if loc_column is None and "loc" in header:
        loc_column = "loc"
        opts["loc_as_feature"] = label_column in ("bug", "bugs")
    opts["loc_column"] = loc_column
    return opts


def resolve_text(ref: str, repeats: int, seed: int) -> dict[str, list[Split]]:
    corpus = load_text_csv(ref)
    return {corpus.name: cross_val_splits(corpus, CrossValPlan(5, 5, seed))}


# records --------------------------------------------------------------------


@dataclass
class RunRecord:
    treatment: str
    dataset: str
    seed: int
    goal: str
    test_score: float
    evaluations: int
    wall_time: float                # milliseconds
    history_ref: str
    train_score: float = 0.0
    best_config: dict = field(default_factory=dict)
    test_metrics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.evaluations < 1:
            raise ValueError("a run needs at least one evaluation")

    @property
    def key(self) -> tuple:
        return (self.dataset, self.treatment, self.goal, self.seed)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "RunRecord":
        return cls(**d)


def read_records(path) -> list[RunRecord]:
    """Records in file order; a torn final line (interrupted write) is ignored."""
    path = Path(path)
    if not path.exists():
        return []
    out = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        try:
            out.append(RunRecord.from_json(json.loads(line)))
        except (json.JSONDecodeError, TypeError):
            continue
    return out


def canonical_hash(records: Iterable[RunRecord]) -> str:
    """Digest of the records with ``wall_time`` removed."""
    h = hashlib.sha256()
    for r in records:
        d = r.to_json()
        d.pop("wall_time")
        h.update(json.dumps(d, sort_keys=True).encode())
        h.update(b"\n")
    return h.hexdigest()


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _drop_torn_tail(path: Path):
    # an interrupted append leaves a partial last line; appending after it would corrupt the next record
    if not path.exists():
        return
    data = path.read_bytes()
    if data and not data.endswith(b"\n"):
        _atomic_write(path, data[: data.rfind(b"\n") + 1].decode("utf-8"))


def _append_line(path: Path, obj: dict):
    with path.open("a", encoding="utf-8") as fh:
        fh.write(json.dumps(obj, sort_keys=True) + "\n")
        fh.flush()
        os.fsync(fh.fileno())


# running one treatment -----------------------------------------------------------


@dataclass
class RunOutcome:
    test_score: float
    train_score: float
    evaluations: int
    history: list[dict]
    best_config: dict
    test_metrics: dict


def _from_tuning(res: TuningResult) -> RunOutcome:
    return RunOutcome(res.test_score.value, res.best_train_score.value, res.evaluations_used,
                      [h.to_json() for h in res.history], res.best_choice.to_json(), res.test_metrics)


def run_treatment(t: Treatment, split: Split, task: Task, goal: Goal, seed: int, holdout: float = 0.0) -> RunOutcome:
    """One run of one treatment; every treatment scores through the shared :class:`Evaluator`."""
    if t.kind == "DODGE":
        cfg = DodgeConfig.with_budget(t.n, epsilon=t.epsilon, goal=goal, seed=seed, holdout=holdout)
        return _from_tuning(run_dodge(cfg, split, build_table1_tree(task)))
    if t.kind == "RANDOM":
        ev = Evaluator(split, goal, seed, holdout)
        return _from_tuning(random_search(build_table1_tree(task), t.n, split, goal, seed, evaluator=ev))
    if t.kind == "SMOTUNED":
        return _from_tuning(smotuned(split, goal=goal, de=DEConfig(seed=seed), seed=seed,
                                     evaluator=Evaluator(split, goal, seed, holdout)))
    if t.kind == "DE_RF":
        return _from_tuning(de_rf(split, goal=goal, de=DEConfig(seed=seed), seed=seed,
                                  evaluator=Evaluator(split, goal, seed, holdout)))
    if t.kind == "FFT":
        return run_fft(split, goal)
    if t.kind == "UNTUNED":
        ev = Evaluator(split, goal, seed, holdout)
        pipe = Pipeline(PreprocSpec(PreprocKind.NO_PREPROC), LearnerSpec.default(LearnerKind(t.learner)))
        train = ev.evaluate(pipe, 1)
        test = ev.test(pipe, 1)
        hist = [{"index": 1, "phase": "UNTUNED", "choice": pipe.to_json(), "train_score": train.score.value,
                 "failed": train.failed, "metrics": train.metrics}]
        return RunOutcome(test.score.value, train.score.value, 1, hist, pipe.to_json(), test.metrics)
    raise ConfigError(t.kind)


def run_fft(split: Split, goal: Goal, depth: int = 4) -> RunOutcome:
    from .evaluate import all_metrics
    from .metrics import score as goal_score

    cands = build_candidates(split.train, goal, depth)
    best = select(cands, goal)
    pred = best.predict(split.test.rows)
    test = goal_score(goal, pred, split.test.labels, split.test.loc)
    hist = [{"index": i + 1, "phase": "FFT", "plan": list(c.plan), "train_score": c.train_goal.value,
             "tree": c.pretty()} for i, c in enumerate(cands)]
    return RunOutcome(test.value, best.train_goal.value, len(cands), hist,
                      {"fftree": best.pretty(), "plan": list(best.plan)},
                      all_metrics(pred, split.test.labels, split.test.loc))


# experiments ----------------------------------------------------------------


def _jobs(config: ExperimentConfig):
    """(dataset name, split, treatment, goal, seed) in a fixed order."""
    for ref in config.datasets:
        if config.task is Task.DEFECT:
            for name, split in resolve_defect(ref, config.label_column, config.loc_column).items():
                for goal in config.goals:
                    if goal is Goal.POPT20 and split.train.loc is None:
                        raise ConfigError(f"{name}: popt20 needs a lines-of-code column")
                    for t in config.treatments:
                        for i in range(config.repeats):
                            yield name, split, t, goal, config.base_seed + i
        else:
            for name, splits in resolve_text(ref, config.repeats, config.base_seed).items():
                for goal in config.goals:
                    for t in config.treatments:
                        for i in range(config.repeats):
                            # repeat i uses cross-validation fold i
                            yield name, splits[i % len(splits)], t, goal, config.base_seed + i


def history_name(dataset: str, treatment: str, goal: str, seed: int) -> str:
    safe = "".join(c if c.isalnum() or c in "-_.=," else "_" for c in treatment)
    return f"histories/{dataset}__{safe}__{goal}__{seed}.jsonl"


def run_experiment(config: ExperimentConfig, progress=None) -> list[RunRecord]:
    """Run every (dataset, treatment, goal, repeat) not yet recorded; returns all records."""
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rec_path = out / "records.jsonl"
    _drop_torn_tail(rec_path)
    done = {r.key for r in read_records(rec_path)}
    _atomic_write(out / "config.json", json.dumps(_config_json(config), indent=2, sort_keys=True) + "\n")
    for name, split, t, goal, seed in _jobs(config):
        key = (name, t.label, goal.value, seed)
        if key in done:
            continue
        t0 = time.perf_counter()
        res = run_treatment(t, split, config.task, goal, seed, config.holdout)
        wall = (time.perf_counter() - t0) * 1000.0
        ref = history_name(name, t.label, goal.value, seed)
        _atomic_write(out / ref, "".join(json.dumps(h, sort_keys=True) + "\n" for h in res.history))
        rec = RunRecord(t.label, name, seed, goal.value, res.test_score, res.evaluations, round(wall, 3), ref,
                        res.train_score, res.best_config, res.test_metrics)
        _append_line(rec_path, rec.to_json())
        done.add(key)
        if progress is not None:
            progress(rec)
    return read_records(rec_path)


def _config_json(c: ExperimentConfig) -> dict:
    d = asdict(c)
    d["task"] = c.task.value
    d["goals"] = [g.value for g in c.goals]
    d["treatments"] = [asdict(t) for t in c.treatments]
    d["datasets"] = list(c.datasets)
    return d


# reporting ---------------------------------------------------------------------


def _group(records: Sequence[RunRecord], goal: Goal):
    table: dict[str, dict[str, list[float]]] = {}
    for r in records:
        if r.goal != goal.value:
            continue
        table.setdefault(r.dataset, {}).setdefault(r.treatment, []).append(r.test_score)
    return table


@dataclass
class Report:
    text: str
    csv: str
    flags: dict[str, list[str]]          # dataset -> treatments flagged worse


def report(records: Sequence[RunRecord], goal, seed: int = 0) -> Report:
    """Per dataset: mean test score per treatment, the best marked ``*`` and
    treatments that are worse than the best marked ``!``; then mean
    evaluations per treatment."""
    goal = Goal.parse(goal)
    table = _group(records, goal)
    treatments = sorted({t for row in table.values() for t in row})
    flags: dict[str, list[str]] = {}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["dataset", "treatment", "n", "mean", "median", "best", "worse", "a12", "significant"])
    width = max([len(t) for t in treatments] + [8]) + 3
    lines = [f"goal: {goal.value} ({'higher' if goal.maximize else 'lower'} is better)", ""]
    lines.append("dataset".ljust(14) + "".join(t.rjust(width) for t in treatments))
    for ds in sorted(table):
        row = table[ds]
        present = [t for t in treatments if t in row]
        samples = [SampleSet(t, row[t]) for t in present]
        if len(samples) >= 2:
            verdicts = {v.label: v for v in compare(samples, goal.maximize, seed=seed)}
        else:
            verdicts = {}
        means = {s.label: s.mean for s in samples}
        best = (max if goal.maximize else min)(present, key=lambda t: means[t])
        flags[ds] = [t for t in present if t in verdicts and verdicts[t].worse]
        cells = []
        for t in treatments:
            if t not in row:
                cells.append("-".rjust(width))
                continue
            mark = "*" if t == best else "!" if t in flags[ds] else " "
            cells.append(f"{means[t]:.3f}{mark}".rjust(width))
            v = verdicts.get(t)
            w.writerow([ds, t, len(row[t]), f"{means[t]:.6f}", f"{float(np.median(row[t])):.6f}",
                        int(t == best), int(bool(v and v.worse)),
                        "" if v is None else f"{v.effect_a12:.4f}", "" if v is None else int(v.significant)])
        lines.append(ds.ljust(14) + "".join(cells))
    lines += ["", "* best mean   ! worse than the best (mean, A12 > 0.6 and bootstrap)", ""]
    lines.append("evaluations per run")
    evals: dict[str, list[int]] = {}
    for r in records:
        if r.goal == goal.value:
            evals.setdefault(r.treatment, []).append(r.evaluations)
    for t in sorted(evals, key=lambda t: (float(np.mean(evals[t])), t)):
        lines.append(f"  {t.ljust(width)} {np.mean(evals[t]):10.1f}")
    return Report("\n".join(lines) + "\n", buf.getvalue(), flags)


# output-space cells -----------------------------------------------------------------


@dataclass(frozen=True)
class CellReport:
    epsilon: float
    p: int
    occupied_cells: int
    max_cells: int


def cells_per_axis(epsilon: float) -> int:
    # guards 1/epsilon landing a hair above an integer
    return max(1, math.ceil(1.0 / epsilon - 1e-9))


def cell_occupancy(points, epsilon: float) -> CellReport:
    """Distinct ``epsilon``-cells hit by ``points`` (each coordinate in [0, 1]).

    A coordinate maps to ``floor(x / epsilon)``, with the top edge (and, when
    ``1/epsilon`` is not whole, the short last cell) clamped into the last cell.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P.reshape(1, -1)
    if P.size and (np.any(P < 0) or np.any(P > 1) or not np.all(np.isfinite(P))):
        raise ValueError("cell coordinates must lie in [0, 1]")
    k = cells_per_axis(epsilon)
    p = P.shape[1]
    idx = np.minimum(np.floor(P / epsilon).astype(np.int64), k - 1)
    occupied = len({tuple(r) for r in idx})
    return CellReport(epsilon, p, occupied, k**p)


def history_points(records: Sequence[RunRecord], base_dir, metrics=("recall", "fpr")) -> np.ndarray:
    """Every evaluated configuration's metric vector, read from the run histories."""
    pts = []
    for r in records:
        path = Path(base_dir) / r.history_ref
        if not path.exists():
            continue
        for line in path.read_text(encoding="utf-8").splitlines():
            m = json.loads(line).get("metrics") or {}
            if all(k in m for k in metrics):
                pts.append([m[k] for k in metrics])
    return np.array(pts, dtype=float).reshape(-1, len(metrics))
