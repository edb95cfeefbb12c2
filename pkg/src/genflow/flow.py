"""End-to-end orchestration: route the dataset (binary vs multi-class),
select the best model by cross-validated sweeps, reduce dimensionality,
decide between flat multi-class and hierarchical binary classification,
and assemble the final report structure.

Decision 3 (flat vs hierarchical) is evaluated on out-of-fold training
predictions so that the test split influences nothing before the final
scoring stage; the test metrics of the chosen route are then reported.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import Dataset, DataError, SplitPair, stratified_split
from .metrics import (
    EvalMetrics,
    averaged_metrics,
    confusion_counts,
    randomized_recall,
    roc_and_auc,
)
from .models import (
    BINARY_FAMILIES,
    MULTICLASS_FAMILIES,
    ModelSpec,
    TrainedModel,
    fit_model,
)
from .ranking import (
    RankedFeatures,
    chi_squared,
    fisher_score,
    mutual_information,
    project_top_k,
)
from .selection import (
    DEFAULT_GRIDS,
    DimSweepResult,
    FoldPlan,
    SweepResult,
    dimensionality_sweep,
    make_interleaved_folds,
    sweep_parameters,
)

__all__ = [
    "FlowConfig",
    "HierarchyLevel",
    "HierarchySpec",
    "TaskResult",
    "FlowReport",
    "decision_route",
    "select_best_model",
    "evaluate_hierarchy",
    "combine_level_metrics",
    "decision_hierarchy",
    "run_flow",
    "load_hierarchy_spec",
    "COMPLEXITY_ORDER",
]

# Simpler families win ties (equal CV accuracy to 4 decimal places).
COMPLEXITY_ORDER = {
    "logreg": 0,
    "multinomial_logreg": 0,
    "ova_logreg": 0,
    "lssvm": 1,
    "ova_svm": 1,
    "decision_forest": 2,
    "boosted_tree": 3,
    "ova_boosted_tree": 3,
    "neural_net": 4,
}


@dataclass
class FlowConfig:
    train_fraction: float = 0.30
    fold_count: int = 5
    seed: int = 0
    candidate_families: tuple[str, ...] | None = None  # None = all applicable
    grids: dict = field(default_factory=lambda: DEFAULT_GRIDS)
    ranking_methods: tuple[str, ...] = ("fisher", "mutual_info", "chi_squared")
    bin_count: int = 10
    hierarchy: "HierarchySpec | None" = None
    decision3_metric: str = "recall"  # or "accuracy"
    folds_positional: bool = False

    def to_dict(self) -> dict:
        return {
            "train_fraction": self.train_fraction,
            "fold_count": self.fold_count,
            "seed": self.seed,
            "candidate_families": list(self.candidate_families)
            if self.candidate_families else None,
            "grids": self.grids,
            "ranking_methods": list(self.ranking_methods),
            "bin_count": self.bin_count,
            "hierarchy": self.hierarchy.to_list() if self.hierarchy else None,
            "decision3_metric": self.decision3_metric,
            "folds_positional": self.folds_positional,
        }


@dataclass(frozen=True)
class HierarchyLevel:
    name: str
    positive: tuple[int, ...]
    negative: tuple[int, ...]

    def __post_init__(self):
        if not self.positive or not self.negative:
            raise DataError(f"hierarchy level {self.name!r}: empty label set")
        if set(self.positive) & set(self.negative):
            raise DataError(f"hierarchy level {self.name!r}: overlapping label sets")


@dataclass(frozen=True)
class HierarchySpec:
    levels: tuple[HierarchyLevel, ...]

    def validate_for(self, n_classes: int) -> None:
        for lv in self.levels:
            bad = [c for c in lv.positive + lv.negative if not 0 <= c < n_classes]
            if bad:
                raise DataError(
                    f"hierarchy level {lv.name!r}: labels {bad} out of range "
                    f"for C={n_classes}"
                )

    def to_list(self) -> list[dict]:
        return [
            {"name": lv.name, "positive": list(lv.positive),
             "negative": list(lv.negative)}
            for lv in self.levels
        ]


def load_hierarchy_spec(path) -> HierarchySpec:
    """Hierarchy file: a JSON list of {name, positive: [ids], negative: [ids]}."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot open hierarchy file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid hierarchy document: {exc}") from exc
    if not isinstance(doc, list) or not doc:
        raise DataError(f"{path}: hierarchy must be a nonempty list of levels")
    levels = []
    for i, rec in enumerate(doc):
        try:
            levels.append(HierarchyLevel(
                name=str(rec.get("name", f"level {i + 1}")),
                positive=tuple(int(c) for c in rec["positive"]),
                negative=tuple(int(c) for c in rec["negative"]),
            ))
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{path}: bad level record {i}: {exc}") from exc
    return HierarchySpec(tuple(levels))


@dataclass
class TaskResult:
    """Everything learned about one classification task (flat run or one
    hierarchy level)."""

    name: str
    sweep: SweepResult
    leaderboard: list[dict]
    dim: DimSweepResult
    chosen_spec: ModelSpec
    cv_metrics: EvalMetrics
    test_metrics: EvalMetrics | None = None
    model: TrainedModel | None = None
    roc: EvalMetrics | None = None


@dataclass
class FlowReport:
    route: str
    config: dict
    source_id: str
    class_names: tuple[str, ...]
    flat: TaskResult | None = None
    levels: list[TaskResult] = field(default_factory=list)
    combined: dict | None = None          # hierarchical combined test metrics
    combined_cv: dict | None = None       # combined out-of-fold metrics
    baseline: float | None = None
    decision_trail: list[dict] = field(default_factory=list)
    advisories: list[str] = field(default_factory=list)


def decision_route(data: Dataset) -> str:
    return "binary" if data.n_classes == 2 else "multiclass"


def _round4(x: float) -> float:
    return round(x, 4)


def select_best_model(candidates, train: Dataset, folds: FoldPlan, grids,
                      seed: int = 0) -> tuple[SweepResult, list[dict]]:
    """Decision 2: sweep every candidate family, keep the best.

    Families tied to 4 decimal places resolve by model complexity
    (simpler wins).
    """
    if not candidates:
        raise DataError("no candidate families")
    leaderboard = []
    best = None
    failures = 0
    for family in candidates:
        grid = grids.get(family, DEFAULT_GRIDS.get(family))
        if grid is None:
            raise DataError(f"no grid for family {family!r}")
        result = sweep_parameters(family, grid, train, folds, seed=seed)
        ok = any(not row["note"] for row in result.table)
        failures += not ok
        leaderboard.append({
            "family": family,
            "cv_accuracy": result.cv_accuracy,
            "best_point": dict(result.best_spec.hyperparameters),
            "table": result.table,
        })
        key = (_round4(result.cv_accuracy), -COMPLEXITY_ORDER[family])
        if best is None or key > best[0] or (
            key == best[0] and result.cv_accuracy > best[1].cv_accuracy
        ):
            best = (key, result)
    if failures == len(list(candidates)):
        raise DataError("every candidate family failed to fit")
    return best[1], leaderboard


def _cv_out_of_fold_metrics(spec: ModelSpec, train: Dataset, folds: FoldPlan
                            ) -> EvalMetrics:
    """Pooled out-of-fold predictions -> averaged metrics on the train split."""
    pred = np.empty(train.n_samples, dtype=int)
    for fit_rows, val_rows in folds.folds():
        model = fit_model(spec, train.restrict_rows(fit_rows))
        pred[val_rows] = model.predict_labels(train.restrict_rows(val_rows))
    counts = confusion_counts(train.labels, pred, n_classes=train.n_classes)
    return averaged_metrics(counts)


def _run_task(name: str, train: Dataset, candidates, config: FlowConfig,
              trail: list[dict]) -> TaskResult:
    """Decision 2 + dimensionality sweep + out-of-fold metrics for one task."""
    folds = make_interleaved_folds(train, config.fold_count, config.seed,
                                   positional=config.folds_positional)
    sweep, leaderboard = select_best_model(candidates, train, folds,
                                           config.grids, seed=config.seed)
    trail.append({
        "stage": f"decision2:{name}",
        "inputs": {"candidates": list(candidates),
                   "leaderboard": [
                       {"family": e["family"], "cv_accuracy": e["cv_accuracy"]}
                       for e in leaderboard
                   ]},
        "outcome": {"family": sweep.best_spec.family,
                    "hyperparameters": dict(sweep.best_spec.hyperparameters),
                    "cv_accuracy": sweep.cv_accuracy},
    })
    rankings = compute_rankings(train, config)
    dim = dimensionality_sweep(sweep.best_spec, train, folds, rankings,
                               method_order=tuple(r.method for r in rankings))
    trail.append({
        "stage": f"dimensionality:{name}",
        "inputs": {"methods": [r.method for r in rankings]},
        "outcome": {"method": dim.best_method, "k": dim.best_k,
                    "cv_accuracy": dim.cv_accuracy},
    })
    ranking = next(r for r in rankings if r.method == dim.best_method)
    reduced = project_top_k(train, ranking, dim.best_k)
    cv_metrics = _cv_out_of_fold_metrics(sweep.best_spec, reduced, folds)
    return TaskResult(
        name=name,
        sweep=sweep,
        leaderboard=leaderboard,
        dim=dim,
        chosen_spec=sweep.best_spec,
        cv_metrics=cv_metrics,
    )


def compute_rankings(train: Dataset, config: FlowConfig) -> list[RankedFeatures]:
    out = []
    for method in config.ranking_methods:
        if method == "fisher":
            out.append(fisher_score(train))
        elif method == "mutual_info":
            out.append(mutual_information(train, config.bin_count))
        elif method == "chi_squared":
            out.append(chi_squared(train, config.bin_count))
        else:
            raise DataError(f"unknown ranking method {method!r}")
    return out


def _final_score(task: TaskResult, train: Dataset, test: Dataset,
                 config: FlowConfig) -> None:
    """Fit the chosen configuration on the full training split and score
    the test split.  The only stage that reads test features."""
    rankings = compute_rankings(train, config)
    ranking = next(r for r in rankings if r.method == task.dim.best_method)
    reduced_train = project_top_k(train, ranking, task.dim.best_k)
    reduced_test = project_top_k(test, ranking, task.dim.best_k)
    model = fit_model(task.chosen_spec, reduced_train)
    scores = model.predict_scores(reduced_test)
    pred = np.argmax(scores, axis=1)
    counts = confusion_counts(test.labels, pred, n_classes=test.n_classes)
    task.test_metrics = averaged_metrics(counts)
    task.model = model
    if test.n_classes == 2:
        task.roc = roc_and_auc(scores[:, 1], test.labels)
        task.test_metrics.roc = task.roc.roc
        task.test_metrics.auc = task.roc.auc


def _binarize_level(data: Dataset, level: HierarchyLevel) -> Dataset:
    keep = np.isin(data.labels, level.positive + level.negative)
    if not keep.any():
        raise DataError(f"hierarchy level {level.name!r}: no samples")
    sub = data.restrict_rows(np.flatnonzero(keep), f"#{level.name}")
    labels = np.isin(sub.labels, level.positive).astype(int)
    if labels.min() == labels.max():
        raise DataError(f"hierarchy level {level.name!r}: one side is empty")
    neg = ",".join(str(c) for c in level.negative)
    pos = ",".join(str(c) for c in level.positive)
    return replace(sub, labels=labels, class_names=(f"classes {neg}", f"classes {pos}"))


def combine_level_metrics(per_level: list[EvalMetrics]) -> dict:
    """Unweighted mean of per-level accuracy / precision / recall.

    Per-level values are the binary (positive-class) metrics of each
    hierarchy level.
    """
    if not per_level:
        raise DataError("no hierarchy levels to combine")
    acc = [m.accuracy[1] if m.accuracy is not None else m.micro_accuracy
           for m in per_level]
    prec = [m.precision[1] for m in per_level]
    rec = [m.recall[1] for m in per_level]
    return {
        "accuracy": float(np.mean(acc)),
        "precision": float(np.mean(prec)),
        "recall": float(np.mean(rec)),
    }


def evaluate_hierarchy(spec: HierarchySpec, split: SplitPair,
                       config: FlowConfig, trail: list[dict],
                       score_test: bool = True) -> tuple[list[TaskResult], dict, dict]:
    """Run the full binary pipeline independently per hierarchy level.

    Returns (per-level task results, combined test metrics, combined
    out-of-fold metrics).  Levels are trained on ground-truth subsets;
    predictions never cascade between levels.
    """
    spec.validate_for(split.train.n_classes)
    candidates = config.candidate_families or BINARY_FAMILIES
    candidates = [f for f in candidates if f in BINARY_FAMILIES]
    tasks = []
    for level in spec.levels:
        train_lv = _binarize_level(split.train, level)
        task = _run_task(f"hierarchy:{level.name}", train_lv, candidates,
                         config, trail)
        if score_test:
            test_lv = _binarize_level(split.test, level)
            _final_score(task, train_lv, test_lv, config)
        tasks.append(task)
    combined_cv = combine_level_metrics([t.cv_metrics for t in tasks])
    combined_test = (
        combine_level_metrics([t.test_metrics for t in tasks]) if score_test else None
    )
    return tasks, combined_test, combined_cv


def decision_hierarchy(flat_metrics: EvalMetrics, baseline: float,
                       hierarchical: dict | None,
                       metric: str = "recall") -> tuple[str, dict]:
    """Decision 3: keep the flat route iff it beats the randomized
    baseline; otherwise prefer the hierarchy when it scores higher."""
    flat_value = (flat_metrics.macro_recall if metric == "recall"
                  else flat_metrics.macro_accuracy)
    detail = {"metric": metric, "flat": flat_value, "baseline": baseline}
    if flat_value >= baseline:
        detail["reason"] = "flat beats randomized baseline"
        return "multiclass_flat", detail
    if hierarchical is None:
        detail["reason"] = "flat below baseline but no hierarchy supplied"
        detail["advisory"] = "hierarchy recommended"
        return "multiclass_flat", detail
    hier_value = hierarchical[metric]
    detail["hierarchical"] = hier_value
    if hier_value > flat_value:
        detail["reason"] = "hierarchical route scores higher"
        return "multiclass_hierarchical", detail
    detail["reason"] = "flat route scores higher than hierarchy"
    return "multiclass_flat", detail


def run_flow(data: Dataset, config: FlowConfig) -> FlowReport:
    """Execute the whole pipeline on one dataset."""
    trail: list[dict] = []
    split = stratified_split(data, config.train_fraction, config.seed)
    trail.append({
        "stage": "split",
        "inputs": {"train_fraction": config.train_fraction, "seed": config.seed},
        "outcome": {"train_rows": split.train.n_samples,
                    "test_rows": split.test.n_samples},
    })
    route = decision_route(data)
    trail.append({
        "stage": "decision1",
        "inputs": {"n_classes": data.n_classes},
        "outcome": {"route": route},
    })
    report = FlowReport(
        route=route,
        config=config.to_dict(),
        source_id=data.source_id,
        class_names=data.class_names,
        decision_trail=trail,
    )

    if route == "binary":
        candidates = config.candidate_families or BINARY_FAMILIES
        candidates = [f for f in candidates if f in BINARY_FAMILIES]
        task = _run_task("binary", split.train, candidates, config, trail)
        _final_score(task, split.train, split.test, config)
        report.flat = task
        report.route = "binary"
        return report

    candidates = config.candidate_families or MULTICLASS_FAMILIES
    candidates = [f for f in candidates
                  if f in MULTICLASS_FAMILIES or f == "ova_logreg"]
    flat = _run_task("multiclass_flat", split.train, candidates, config, trail)
    baseline = randomized_recall(split.train.class_counts())
    report.baseline = baseline

    hierarchy_cv = None
    level_tasks: list[TaskResult] = []
    flat_value = (flat.cv_metrics.macro_recall if config.decision3_metric == "recall"
                  else flat.cv_metrics.macro_accuracy)
    if flat_value < baseline and config.hierarchy is not None:
        level_tasks, _, hierarchy_cv = evaluate_hierarchy(
            config.hierarchy, split, config, trail, score_test=False
        )
    route, detail = decision_hierarchy(flat.cv_metrics, baseline,
                                       hierarchy_cv, config.decision3_metric)
    trail.append({"stage": "decision3", "inputs": {}, "outcome": detail})
    if "advisory" in detail:
        report.advisories.append(detail["advisory"])
    report.route = route

    # Final scoring of the chosen route (first stage that reads test data).
    _final_score(flat, split.train, split.test, config)
    report.flat = flat
    if route == "multiclass_hierarchical":
        for level, task in zip(config.hierarchy.levels, level_tasks):
            train_lv = _binarize_level(split.train, level)
            test_lv = _binarize_level(split.test, level)
            _final_score(task, train_lv, test_lv, config)
        report.levels = level_tasks
        report.combined = combine_level_metrics(
            [t.test_metrics for t in level_tasks]
        )
        report.combined_cv = hierarchy_cv
    return report
