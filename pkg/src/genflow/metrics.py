"""Confusion counting, binary/micro/macro metrics, ROC curves, and the
majority-class randomized baseline."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ConfusionCounts",
    "EvalMetrics",
    "confusion_counts",
    "binary_metrics",
    "averaged_metrics",
    "roc_and_auc",
    "randomized_recall",
    "DEFAULT_THRESHOLDS",
]

DEFAULT_THRESHOLDS = np.linspace(0.0, 1.0, 101)


@dataclass(frozen=True)
class ConfusionCounts:
    """C x C matrix; entry (i, j) counts true class i predicted as j."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=int)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("confusion matrix must be square")
        if (m < 0).any():
            raise ValueError("negative confusion counts")
        object.__setattr__(self, "matrix", m)

    @property
    def n_classes(self) -> int:
        return self.matrix.shape[0]

    @property
    def total(self) -> int:
        return int(self.matrix.sum())

    # Binary convenience accessors; class 1 is positive.
    @property
    def tp(self) -> int:
        return int(self.matrix[1, 1])

    @property
    def tn(self) -> int:
        return int(self.matrix[0, 0])

    @property
    def fp(self) -> int:
        return int(self.matrix[0, 1])

    @property
    def fn(self) -> int:
        return int(self.matrix[1, 0])

    def one_vs_rest(self, i: int) -> tuple[int, int, int, int]:
        """(tp, fp, fn, tn) treating class i as positive."""
        m = self.matrix
        tp = int(m[i, i])
        fp = int(m[:, i].sum() - m[i, i])
        fn = int(m[i, :].sum() - m[i, i])
        tn = self.total - tp - fp - fn
        return tp, fp, fn, tn


@dataclass
class EvalMetrics:
    """Classification metrics for one evaluated task.

    Per-class entries are one-vs-rest.  ``micro_*`` are class-frequency
    weighted means of the per-class values; ``macro_*`` are unweighted
    means.  ``overall_accuracy`` is trace/total, which differs from
    micro accuracy for C > 2 (both are reported).
    """

    precision: np.ndarray = None
    recall: np.ndarray = None
    accuracy: np.ndarray = None
    micro_precision: float = None
    micro_recall: float = None
    micro_accuracy: float = None
    macro_precision: float = None
    macro_recall: float = None
    macro_accuracy: float = None
    overall_accuracy: float = None
    roc: list[tuple[float, float, float]] = field(default_factory=list)
    auc: float = None
    degenerate_flags: list[str] = field(default_factory=list)
    confusion: ConfusionCounts = None


def confusion_counts(true_labels, predicted_labels, n_classes: int | None = None
                     ) -> ConfusionCounts:
    y = np.asarray(true_labels, dtype=int)
    p = np.asarray(predicted_labels, dtype=int)
    if y.shape != p.shape:
        raise ValueError(f"length mismatch: {y.shape} vs {p.shape}")
    if n_classes is None:
        n_classes = int(max(y.max(), p.max())) + 1
    if y.size and (y.min() < 0 or p.min() < 0 or y.max() >= n_classes or p.max() >= n_classes):
        raise ValueError("labels out of range")
    m = np.zeros((n_classes, n_classes), dtype=int)
    np.add.at(m, (y, p), 1)
    return ConfusionCounts(m)


def _safe_div(num: float, den: float, flags: list[str], what: str) -> float:
    if den == 0:
        flags.append(f"degenerate denominator: {what}")
        return 0.0
    return num / den


def binary_metrics(counts: ConfusionCounts) -> EvalMetrics:
    """Precision / recall / accuracy with class 1 positive; 0/0 -> 0 + flag."""
    if counts.n_classes != 2:
        raise ValueError(f"binary_metrics needs C=2, got {counts.n_classes}")
    flags: list[str] = []
    tp, tn, fp, fn = counts.tp, counts.tn, counts.fp, counts.fn
    prec = _safe_div(tp, tp + fp, flags, "precision tp+fp=0")
    rec = _safe_div(tp, tp + fn, flags, "recall tp+fn=0")
    acc = _safe_div(tp + tn, counts.total, flags, "accuracy N=0")
    m = averaged_metrics(counts)
    m.degenerate_flags = flags + m.degenerate_flags
    # For C=2 the class-1 entries must equal the direct formulas exactly.
    m.precision[1], m.recall[1], m.accuracy[1] = prec, rec, acc
    return m


def averaged_metrics(counts: ConfusionCounts) -> EvalMetrics:
    """Per-class one-vs-rest metrics plus their micro/macro averages.

    Micro weights are the true-class counts in the scored set.
    """
    C = counts.n_classes
    N = counts.total
    flags: list[str] = []
    prec = np.zeros(C)
    rec = np.zeros(C)
    acc = np.zeros(C)
    n_i = counts.matrix.sum(axis=1).astype(float)
    for i in range(C):
        tp, fp, fn, tn = counts.one_vs_rest(i)
        prec[i] = _safe_div(tp, tp + fp, flags, f"precision class {i}")
        rec[i] = _safe_div(tp, tp + fn, flags, f"recall class {i}")
        acc[i] = _safe_div(tp + tn, N, flags, f"accuracy class {i}")
    w = n_i / N if N else np.zeros(C)
    return EvalMetrics(
        precision=prec,
        recall=rec,
        accuracy=acc,
        micro_precision=float(w @ prec),
        micro_recall=float(w @ rec),
        micro_accuracy=float(w @ acc),
        macro_precision=float(prec.mean()),
        macro_recall=float(rec.mean()),
        macro_accuracy=float(acc.mean()),
        overall_accuracy=float(np.trace(counts.matrix) / N) if N else 0.0,
        degenerate_flags=flags,
        confusion=counts,
    )


def roc_and_auc(scores, true_labels, thresholds=None) -> EvalMetrics:
    """ROC points and trapezoidal AUC from positive-class scores.

    The threshold grid is refined with every distinct score value so
    the integration is exact for the given scores.  Predict positive
    iff score >= threshold.
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(true_labels, dtype=int)
    if s.shape != y.shape:
        raise ValueError("scores/labels length mismatch")
    if thresholds is None:
        thresholds = DEFAULT_THRESHOLDS
    grid = np.unique(np.concatenate([np.asarray(thresholds, dtype=float), s]))
    pos = int((y == 1).sum())
    neg = int((y == 0).sum())
    m = EvalMetrics()
    if pos == 0 or neg == 0:
        m.degenerate_flags.append("single-class labels: AUC undefined")
        m.auc = None
        return m
    points = []
    for t in grid:
        pred = s >= t
        tpr = float((pred & (y == 1)).sum() / pos)
        fpr = float((pred & (y == 0)).sum() / neg)
        points.append((fpr, tpr, float(t)))
    # Descending threshold runs the curve from (0,0) toward (1,1).
    points.sort(key=lambda q: -q[2])
    fprs = np.array([0.0] + [q[0] for q in points] + [1.0])
    tprs = np.array([0.0] + [q[1] for q in points] + [1.0])
    m.roc = points
    m.auc = float(np.trapezoid(tprs, fprs))
    return m


def randomized_recall(class_counts) -> float:
    """Recall of labeling everything as the most frequent class."""
    c = np.asarray(class_counts, dtype=float)
    if c.size == 0 or c.sum() == 0:
        raise ValueError("empty class counts")
    return float(c.max() / c.sum())
