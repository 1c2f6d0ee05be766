"""Repeated split -> scale -> PCA -> train -> evaluate runs, aggregation and report files.

Run ``i`` of every cell uses seed ``base_seed + i`` for the split, the network
initialization, the batch order and dropout, so the two models see the same
split in the same run. Every artifact is written with sorted keys and
``repr`` floats so re-emitting an identical report gives identical bytes.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from loopsight.dataset import DataSplit, apply_scaler, fit_scaler, read_dataset, sequence_lengths, split_corpus
from loopsight.neural import ModelSpec, TrainConfig, TrainingDivergence, TrainingHistory, bce_loss, predict, train_model
from loopsight.pca import LEVELS, fit_pca, select_components, transform
from loopsight.stats import (
    ClassReport,
    ConfusionMatrix,
    KSResult,
    RunStatistics,
    classification_report,
    confusion,
    fmt2,
    ks_two_sample,
    summarize_runs,
)

log = logging.getLogger(__name__)

MODELS = ("dnn", "cnn")
RETRY_OFFSET = 100_000


def level_name(level: float) -> str:
    return str(round(level * 100))


def _normalize_level(value) -> float:
    value = float(value)
    level = value / 100.0 if value > 1.0 else value
    if not any(abs(level - known) < 1e-9 for known in LEVELS):
        raise ValueError(f"variance level {value} is not one of {[level_name(l) for l in LEVELS]}")
    return min(LEVELS, key=lambda known: abs(known - level))


@dataclass(frozen=True)
class ExperimentConfig:
    corpus: str
    levels: tuple[float, ...] = LEVELS
    runs: int = 30
    base_seed: int = 0
    epochs: int = 1000
    batch_size: int = 4
    learning_rate: float = 1e-3
    models: tuple[str, ...] = MODELS
    out: str = "results"

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(_normalize_level(l) for l in self.levels))
        object.__setattr__(self, "models", tuple(m.lower() for m in self.models))
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if not self.levels:
            raise ValueError("at least one variance level is required")
        if not self.models or any(m not in MODELS for m in self.models):
            raise ValueError(f"models must be drawn from {MODELS}")

    @property
    def train_config(self) -> TrainConfig:
        return TrainConfig(epochs=self.epochs, batch_size=self.batch_size, learning_rate=self.learning_rate)

    def to_dict(self) -> dict:
        return {
            "corpus": self.corpus,
            "levels": [level_name(l) for l in self.levels],
            "runs": self.runs,
            "base_seed": self.base_seed,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "models": list(self.models),
            "out": self.out,
        }

    @classmethod
    def from_dict(cls, d: dict, base_dir: Path | None = None) -> "ExperimentConfig":
        known = {"corpus", "levels", "runs", "base_seed", "epochs", "batch_size", "learning_rate", "models", "out"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "corpus" not in d:
            raise ValueError("config needs a 'corpus' entry pointing at a dataset directory")
        kwargs = dict(d)
        for key in ("corpus", "out"):
            if key in kwargs and base_dir is not None and not Path(kwargs[key]).is_absolute():
                kwargs[key] = str(base_dir / kwargs[key])
        if "levels" in kwargs:
            kwargs["levels"] = tuple(kwargs["levels"])
        if "models" in kwargs:
            kwargs["models"] = tuple(kwargs["models"])
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text()), base_dir=path.parent)


@dataclass(frozen=True)
class RunRecord:
    run: int
    model: str
    level: float
    seed: int
    test_acc: float
    test_loss: float
    confusion: ConfusionMatrix
    report: ClassReport
    width: int
    components: int
    history: str  # file name of the training history, relative to the runs directory
    final: dict = field(default_factory=dict)

    @property
    def key(self) -> str:
        return f"{self.model}_{level_name(self.level)}_{self.run:03d}"

    def to_dict(self) -> dict:
        return {
            "run": self.run,
            "model": self.model,
            "variance": level_name(self.level),
            "seed": self.seed,
            "test_acc": self.test_acc,
            "test_loss": self.test_loss,
            "confusion": self.confusion.to_dict(),
            "report": self.report.to_dict(),
            "width": self.width,
            "components": self.components,
            "history": self.history,
            "final": self.final,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        cm = ConfusionMatrix.from_dict(d["confusion"])
        return cls(
            run=int(d["run"]),
            model=d["model"],
            level=_normalize_level(d["variance"]),
            seed=int(d["seed"]),
            test_acc=float(d["test_acc"]),
            test_loss=float(d["test_loss"]),
            confusion=cm,
            report=classification_report(cm),
            width=int(d["width"]),
            components=int(d["components"]),
            history=d["history"],
            final=d.get("final", {}),
        )


def _dumps(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def load_cache(corpus) -> tuple[np.ndarray, np.ndarray, dict]:
    path = Path(corpus)
    if not (path / "dataset.csv").exists() and not path.is_file():
        raise FileNotFoundError(f"no dataset cache at {path}; build one with `loopsight dataset`")
    return read_dataset(path)


def prepare(X: np.ndarray, y: np.ndarray, level: float, seed: int) -> tuple[DataSplit, int, int]:
    """Split, truncate to the longest training program, z-score and project.

    Scaler and PCA are fitted on the training rows only. Returns the
    projected split, the truncation width and the number of components.
    """
    split = split_corpus(X, y, rng=seed)
    width = int(sequence_lengths(split.X_train).max())
    parts = [a[:, :width] for a in (split.X_train, split.X_val, split.X_test)]
    scaler = fit_scaler(parts[0])
    parts = [apply_scaler(scaler, a) for a in parts]
    pca = fit_pca(parts[0])
    k = select_components(pca, level)
    tr, va, te = (transform(pca, a, k) for a in parts)
    projected = DataSplit(tr, split.y_train, va, split.y_val, te, split.y_test, split.indices)
    return projected, width, k


def run_once(X, y, model: str, level: float, run: int, seed: int, cfg: ExperimentConfig):
    split, width, k = prepare(X, y, level, seed)
    spec = ModelSpec.for_kind(model, k)
    tcfg = TrainConfig(cfg.epochs, cfg.batch_size, cfg.learning_rate, seed=seed)
    trained, history = train_model(spec, split, tcfg)
    prob, labels = predict(trained, split.X_test)
    loss, _ = bce_loss(prob, split.y_test)
    cm = confusion(split.y_test, labels)
    record = RunRecord(
        run=run,
        model=model,
        level=level,
        seed=seed,
        test_acc=cm.accuracy,
        test_loss=loss,
        confusion=cm,
        report=classification_report(cm),
        width=width,
        components=k,
        history=f"{model}_{level_name(level)}_{run:03d}_history.csv",
        final={
            "train_acc": history.train_acc[-1],
            "train_loss": history.train_loss[-1],
            "val_acc": history.val_acc[-1],
            "val_loss": history.val_loss[-1],
            "epochs": len(history),
        },
    )
    return record, history


def _stored_record(runs_dir, model: str, level: float, run: int, seed: int, epochs: int) -> RunRecord | None:
    """A persisted record for this run if it was produced with the same seed and epoch count."""
    path = Path(runs_dir) / f"{model}_{level_name(level)}_{run:03d}.json"
    if not path.exists():
        return None
    record = RunRecord.from_dict(json.loads(path.read_text()))
    if record.seed not in (seed, seed + RETRY_OFFSET) or record.final.get("epochs") != epochs:
        return None
    if not (Path(runs_dir) / record.history).exists():
        return None
    return record


def run_cell(cfg: ExperimentConfig, model: str, level: float, data=None, runs_dir=None, resume: bool = False) -> list[RunRecord]:
    """All ``cfg.runs`` repetitions of one (model, variance level) cell.

    A run that diverges is repeated once with ``seed + RETRY_OFFSET``; a
    second divergence aborts the cell. With ``resume`` a run whose record
    already sits in ``runs_dir`` (same seed and epochs) is loaded, not retrained.
    """
    X, y, _ = data if data is not None else load_cache(cfg.corpus)
    level = _normalize_level(level)
    records = []
    for run in range(cfg.runs):
        seed = cfg.base_seed + run
        if resume and runs_dir is not None:
            stored = _stored_record(runs_dir, model, level, run, seed, cfg.epochs)
            if stored is not None:
                records.append(stored)
                continue
        try:
            record, history = run_once(X, y, model, level, run, seed, cfg)
        except TrainingDivergence as exc:
            log.warning("%s %s run %d: %s; retrying with seed %d", model, level_name(level), run, exc, seed + RETRY_OFFSET)
            try:
                record, history = run_once(X, y, model, level, run, seed + RETRY_OFFSET, cfg)
            except TrainingDivergence as again:
                raise TrainingDivergence(f"cell {model}/{level_name(level)} run {run}: {again}") from again
        log.info("%s %s run %d: test accuracy %.4f", model, level_name(level), run, record.test_acc)
        if runs_dir is not None:
            save_record(record, history, runs_dir)
        records.append(record)
    return records


def save_record(record: RunRecord, history: TrainingHistory, runs_dir) -> None:
    runs_dir = Path(runs_dir)
    runs_dir.mkdir(parents=True, exist_ok=True)
    (runs_dir / f"{record.key}.json").write_text(_dumps(record.to_dict()))
    history.write_csv(runs_dir / record.history)


def load_records(runs_dir) -> list[RunRecord]:
    paths = sorted(Path(runs_dir).glob("*.json"))
    return [RunRecord.from_dict(json.loads(p.read_text())) for p in paths if p.name != "fitness.json"]


# -- comparison and aggregation


@dataclass(frozen=True)
class ModelComparison:
    level: float
    accuracy: KSResult
    loss: KSResult

    @staticmethod
    def verdict(result: KSResult, alpha: float = 0.05) -> str:
        return "significant" if result.significant(alpha) else "not significant"


def compare_models(records_dnn: list[RunRecord], records_cnn: list[RunRecord]) -> ModelComparison:
    """KS tests of DNN vs CNN on test accuracy and on test loss; significant iff p < 0.05."""
    if len(records_dnn) < 2 or len(records_cnn) < 2:
        raise ValueError("model comparison needs at least two runs per model")
    return ModelComparison(
        records_dnn[0].level,
        ks_two_sample([r.test_acc for r in records_dnn], [r.test_acc for r in records_cnn]),
        ks_two_sample([r.test_loss for r in records_dnn], [r.test_loss for r in records_cnn]),
    )


@dataclass(frozen=True)
class CellSummary:
    model: str
    level: float
    accuracy: RunStatistics  # percentages
    loss: RunStatistics
    best_run: int
    worst_run: int


@dataclass
class ExperimentReport:
    models: tuple[str, ...]
    levels: tuple[float, ...]
    cells: dict[tuple[str, float], list[RunRecord]]
    summaries: dict[tuple[str, float], CellSummary]
    comparisons: dict[float, ModelComparison]
    fitness: list[dict] = field(default_factory=list)


def summarize_cell(records: list[RunRecord]) -> CellSummary:
    accs = [100.0 * r.test_acc for r in records]
    acc_stats = summarize_runs(accs)
    loss_stats = summarize_runs([r.test_loss for r in records], higher_is_better=False)
    best = max(records, key=lambda r: (r.test_acc, -r.run))
    worst = min(records, key=lambda r: (r.test_acc, r.run))
    return CellSummary(records[0].model, records[0].level, acc_stats, loss_stats, best.run, worst.run)


def build_report(records: list[RunRecord], fitness: list[dict] | None = None) -> ExperimentReport:
    models = tuple(m for m in MODELS if any(r.model == m for r in records))
    levels = tuple(l for l in LEVELS if any(r.level == l for r in records))
    cells: dict[tuple[str, float], list[RunRecord]] = {}
    for r in sorted(records, key=lambda r: (MODELS.index(r.model), LEVELS.index(r.level), r.run)):
        cells.setdefault((r.model, r.level), []).append(r)
    summaries = {key: summarize_cell(rs) for key, rs in cells.items() if len(rs) >= 2}
    comparisons = {}
    for level in levels:
        dnn, cnn = cells.get(("dnn", level), []), cells.get(("cnn", level), [])
        if len(dnn) >= 2 and len(cnn) >= 2:
            comparisons[level] = compare_models(dnn, cnn)
    return ExperimentReport(models, levels, cells, summaries, comparisons, list(fitness or []))


def gather_fitness(dataset_meta: dict, dataset_dir=None) -> list[dict]:
    """Generation curves of the GA corpora a dataset was built from, where present.

    Relative corpus paths are tried as given and then next to the dataset directory.
    """
    rows = []
    for key, cls in (("pos", "independent"), ("neg", "ambiguous")):
        for d in dataset_meta.get(key, []):
            candidates = [Path(d) / "curve.csv"]
            if dataset_dir is not None:
                candidates.append(Path(dataset_dir).parent / d / "curve.csv")
            path = next((c for c in candidates if c.exists()), None)
            if path is None:
                continue
            with open(path, newline="") as fh:
                for r in csv.DictReader(fh):
                    rows.append({"class": cls, "generation": int(r["generation"]), "avg": float(r["avg"]), "max": float(r["max"]), "min": float(r["min"])})
    return rows


# -- files


def _write_csv(path: Path, header: list[str], rows) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _num(v: float) -> str:
    return repr(float(v))


SUMMARY_HEADER = [
    "variance", "n", "mean", "std", "median", "best", "worst", "ci_lo", "ci_hi", "best_run", "worst_run",
    "loss_mean", "loss_std", "loss_median", "loss_best", "loss_worst",
]


def emit_report(report: ExperimentReport, out_dir, runs_dir=None) -> list[Path]:
    """Write aggregate, summary, KS, boxplot, curve and fitness files; returns the paths written."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out}: {exc.strerror or exc}") from exc
    written = []

    def put(name, header, rows):
        path = out / name
        _write_csv(path, header, rows)
        written.append(path)

    all_records = [r for rs in report.cells.values() for r in rs]
    put(
        "aggregate.csv",
        ["run", "model", "variance", "test_acc", "test_loss"],
        [[r.run, r.model, level_name(r.level), _num(r.test_acc), _num(r.test_loss)] for r in all_records],
    )

    for model in report.models or MODELS:
        rows, rendered = [], []
        for level in report.levels:
            s = report.summaries.get((model, level))
            if s is None:
                continue
            a, l = s.accuracy, s.loss
            rows.append([
                level_name(level), a.n, _num(a.mean), _num(a.std), _num(a.median), _num(a.best), _num(a.worst),
                _num(a.ci95[0]), _num(a.ci95[1]), s.best_run, s.worst_run,
                _num(l.mean), _num(l.std), _num(l.median), _num(l.best), _num(l.worst),
            ])
            rendered.append([
                level_name(level), a.n, fmt2(a.mean), fmt2(a.std), fmt2(a.median), fmt2(a.best), fmt2(a.worst),
                f"[{fmt2(a.ci95[0])}, {fmt2(a.ci95[1])}]",
            ])
        put(f"summary_{model}.csv", SUMMARY_HEADER, rows)
        md = out / f"summary_{model}.md"
        lines = [
            "| variance (%) | runs | mean | std | median | best | worst | 95% CI |",
            "|---|---|---|---|---|---|---|---|",
        ] + ["| " + " | ".join(str(c) for c in row) + " |" for row in rendered]
        md.write_text("\n".join(lines) + "\n")
        written.append(md)

    ks_rows = []
    for level, cmp in sorted(report.comparisons.items(), key=lambda kv: -kv[0]):
        for metric, res in (("accuracy", cmp.accuracy), ("loss", cmp.loss)):
            ks_rows.append([level_name(level), metric, _num(res.statistic), _num(res.p_value), res.method, ModelComparison.verdict(res)])
    put("ks.csv", ["variance", "metric", "statistic", "p_value", "method", "verdict"], ks_rows)

    for (model, level), recs in report.cells.items():
        put(f"boxplot_{model}_{level_name(level)}.csv", ["test_acc", "test_loss"], [[_num(r.test_acc), _num(r.test_loss)] for r in recs])

    # Training curves for the highest variance level present.
    if report.levels and runs_dir is not None:
        top = report.levels[0]
        for model in report.models:
            for r in report.cells.get((model, top), []):
                hist = TrainingHistory.read_csv(Path(runs_dir) / r.history)
                path = out / f"curve_{model}_{r.run:03d}.csv"
                hist.write_csv(path)
                written.append(path)

    put(
        "fitness_curve.csv",
        ["class", "generation", "avg", "max", "min"],
        [[f["class"], f["generation"], _num(f["avg"]), _num(f["max"]), _num(f["min"])] for f in report.fitness],
    )
    return written


def run_experiment(cfg: ExperimentConfig, resume: bool = False) -> ExperimentReport:
    """Every configured cell, persisted under ``cfg.out/runs`` and reported into ``cfg.out``."""
    X, y, meta = load_cache(cfg.corpus)
    out = Path(cfg.out)
    runs_dir = out / "runs"
    runs_dir.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(_dumps(cfg.to_dict()))
    fitness = gather_fitness(meta, cfg.corpus)
    (runs_dir / "fitness.json").write_text(_dumps(fitness))
    records = []
    for model in cfg.models:
        for level in cfg.levels:
            records += run_cell(cfg, model, level, data=(X, y, meta), runs_dir=runs_dir, resume=resume)
    report = build_report(records, fitness)
    emit_report(report, out, runs_dir)
    return report


def report_from_dir(in_dir, out_dir) -> ExperimentReport:
    """Rebuild the report purely from persisted run records and histories."""
    runs_dir = Path(in_dir) / "runs"
    if not runs_dir.is_dir():
        raise FileNotFoundError(f"no run records under {runs_dir}")
    fitness_path = runs_dir / "fitness.json"
    fitness = json.loads(fitness_path.read_text()) if fitness_path.exists() else []
    report = build_report(load_records(runs_dir), fitness)
    emit_report(report, out_dir, runs_dir)
    return report
