"""Interleaved k-fold construction, hyperparameter grid sweeps, and the
top-k dimensionality sweep.

Fold rule: after one seeded shuffle of the training rows, the sample at
shuffled position j validates in fold j mod fold_count, so every fifth
sample (for the default 5 folds) lands in the same validation set.  The
positional variant (no shuffle) is available for strict fidelity to
pre-shuffled inputs.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, DataError
from .models import ModelSpec, fit_model
from .ranking import RankedFeatures, project_top_k

__all__ = [
    "FoldPlan",
    "SweepResult",
    "DimSweepResult",
    "make_interleaved_folds",
    "sweep_parameters",
    "dimensionality_sweep",
    "cv_accuracy",
    "DEFAULT_GRIDS",
    "THIN_GRIDS",
]

# Default grids include every winning value reported for these model
# families, so the sweep can land on the published optima.
DEFAULT_GRIDS: dict[str, dict[str, list]] = {
    "boosted_tree": {
        "leaves": [10, 20, 40],
        "learning_rate": [0.04, 0.1, 0.2],
        "trees": [50, 100, 200],
    },
    "lssvm": {
        "lambda": [1e-6, 1e-4, 1e-2],
        "kernel_gamma_scale": [0.1, 1.0, 10.0],  # multiplied by 1/d at fit time
    },
    "neural_net": {
        "learning_rate": [0.01, 0.04, 0.1],
        "hidden_nodes": [25, 100],
    },
    "decision_forest": {
        "split_count": [128, 1024],
        "depth": [16, 64],
        "ensemble_count": [8, 32],
    },
    "logreg": {"l2": [1e-6]},
    "multinomial_logreg": {"l2": [1e-6]},
    "ova_logreg": {"l2": [1e-6]},
}
DEFAULT_GRIDS["ova_boosted_tree"] = DEFAULT_GRIDS["boosted_tree"]
DEFAULT_GRIDS["ova_svm"] = DEFAULT_GRIDS["lssvm"]

# Thinned grids for large datasets / quick runs (single mid point each).
THIN_GRIDS: dict[str, dict[str, list]] = {
    "boosted_tree": {"leaves": [20], "learning_rate": [0.2], "trees": [100]},
    "lssvm": {"lambda": [1e-6], "kernel_gamma_scale": [1.0]},
    "neural_net": {"learning_rate": [0.04], "hidden_nodes": [25]},
    "decision_forest": {"split_count": [128], "depth": [16], "ensemble_count": [8]},
    "logreg": {"l2": [1e-6]},
    "multinomial_logreg": {"l2": [1e-6]},
    "ova_logreg": {"l2": [1e-6]},
}
THIN_GRIDS["ova_boosted_tree"] = THIN_GRIDS["boosted_tree"]
THIN_GRIDS["ova_svm"] = THIN_GRIDS["lssvm"]


@dataclass(frozen=True)
class FoldPlan:
    """Validation-fold id per training row (in original row order)."""

    fold_count: int
    assignments: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.assignments, dtype=int)
        if self.fold_count < 2:
            raise DataError(f"fold_count must be >= 2, got {self.fold_count}")
        sizes = np.bincount(a, minlength=self.fold_count)
        if len(sizes) != self.fold_count or (sizes == 0).any():
            raise DataError("every fold must be nonempty")
        object.__setattr__(self, "assignments", a)

    def folds(self):
        for k in range(self.fold_count):
            val = np.flatnonzero(self.assignments == k)
            fit = np.flatnonzero(self.assignments != k)
            yield fit, val


@dataclass
class SweepResult:
    best_spec: ModelSpec
    cv_accuracy: float
    table: list[dict] = field(default_factory=list)  # one row per grid point


@dataclass
class DimSweepResult:
    best_method: str
    best_k: int
    cv_accuracy: float
    curves: dict[str, list[float]] = field(default_factory=dict)


def make_interleaved_folds(train: Dataset, fold_count: int = 5, seed: int = 0,
                           positional: bool = False) -> FoldPlan:
    """Fold id = shuffled position mod fold_count."""
    n = train.n_samples
    if fold_count > n:
        raise DataError(f"fold_count {fold_count} exceeds {n} training rows")
    positions = np.arange(n) if positional else np.random.default_rng(seed).permutation(n)
    assignments = np.empty(n, dtype=int)
    assignments[positions] = np.arange(n) % fold_count
    return FoldPlan(fold_count, assignments)


def _resolve_spec(family: str, point: dict, d: int, seed: int) -> ModelSpec:
    params = dict(point)
    if "kernel_gamma_scale" in params:
        params["kernel_gamma"] = params.pop("kernel_gamma_scale") / d
    return ModelSpec(family, params, seed=seed)


def cv_accuracy(spec: ModelSpec, train: Dataset, folds: FoldPlan
                ) -> tuple[float, list[float]]:
    """Mean held-out accuracy over folds; argmax labels at threshold 0.5."""
    accs = []
    for fit_rows, val_rows in folds.folds():
        model = fit_model(spec, train.restrict_rows(fit_rows))
        pred = model.predict_labels(train.restrict_rows(val_rows))
        accs.append(float(np.mean(pred == train.labels[val_rows])))
    return float(np.mean(accs)), accs


def sweep_parameters(family: str, grid: dict[str, list], train: Dataset,
                     folds: FoldPlan, seed: int = 0) -> SweepResult:
    """Exhaustive Cartesian sweep; best point by mean validation accuracy,
    ties resolved to the earlier grid point."""
    if not grid:
        raise DataError("empty hyperparameter grid")
    names = list(grid)
    table = []
    best = None
    for values in itertools.product(*(grid[n] for n in names)):
        point = dict(zip(names, values))
        spec = _resolve_spec(family, point, train.n_features, seed)
        try:
            mean_acc, fold_accs = cv_accuracy(spec, train, folds)
            note = ""
        except Exception as exc:  # record the failure, keep sweeping
            mean_acc, fold_accs, note = 0.0, [], f"fit failed: {exc}"
            warnings.warn(f"{family} grid point {point}: {note}")
        table.append({
            "point": point,
            "mean_accuracy": mean_acc,
            "fold_accuracies": fold_accs,
            "note": note,
        })
        if best is None or mean_acc > best[0]:
            best = (mean_acc, spec)
    return SweepResult(best_spec=best[1], cv_accuracy=best[0], table=table)


def dimensionality_sweep(best_spec: ModelSpec, train: Dataset, folds: FoldPlan,
                         rankings: list[RankedFeatures],
                         method_order: tuple[str, ...] | None = None
                         ) -> DimSweepResult:
    """Refit the selected spec on top-k subsets for k = 1..d per ranking.

    Best (method, k) maximizes mean CV accuracy; ties prefer smaller k,
    then the earlier-listed method.
    """
    d = train.n_features
    if method_order is None:
        method_order = tuple(r.method for r in rankings)
    by_method = {r.method: r for r in rankings}
    curves: dict[str, list[float]] = {}
    best = None  # (acc, k, method_pos)
    for pos, method in enumerate(method_order):
        ranking = by_method[method]
        curve = []
        for k in range(1, d + 1):
            acc, _ = cv_accuracy(best_spec, project_top_k(train, ranking, k), folds)
            curve.append(acc)
            cand = (acc, -k, -pos)
            if best is None or cand > best:
                best = cand
        curves[method] = curve
    acc, neg_k, neg_pos = best
    return DimSweepResult(
        best_method=method_order[-neg_pos],
        best_k=-neg_k,
        cv_accuracy=acc,
        curves=curves,
    )
