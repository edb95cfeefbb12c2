"""Shared model-spec / trained-model machinery for the classifier zoo."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dataset import Dataset, DataError

__all__ = [
    "ModelSpec",
    "TrainedModel",
    "ModelError",
    "FAMILY_SCHEMAS",
    "BINARY_FAMILIES",
    "MULTICLASS_FAMILIES",
    "validate_spec",
    "encode_array",
    "decode_array",
]


class ModelError(ValueError):
    pass


# name -> (validator, human-readable constraint)
_POSITIVE = (lambda v: v > 0, "> 0")
_GE_ONE = (lambda v: v >= 1 and float(v).is_integer(), "integer >= 1")
_GE_TWO = (lambda v: v >= 2 and float(v).is_integer(), "integer >= 2")

FAMILY_SCHEMAS: dict[str, dict[str, tuple]] = {
    "lssvm": {"lambda": _POSITIVE, "kernel_gamma": _POSITIVE},
    "logreg": {"l2": _POSITIVE},
    "boosted_tree": {"leaves": _GE_TWO, "learning_rate": _POSITIVE, "trees": _GE_ONE},
    "decision_forest": {"split_count": _GE_ONE, "depth": _GE_ONE, "ensemble_count": _GE_ONE},
    "neural_net": {"learning_rate": _POSITIVE, "hidden_nodes": _GE_ONE},
    "multinomial_logreg": {"l2": _POSITIVE},
    "ova_boosted_tree": {"leaves": _GE_TWO, "learning_rate": _POSITIVE, "trees": _GE_ONE},
    "ova_svm": {"lambda": _POSITIVE, "kernel_gamma": _POSITIVE},
    "ova_logreg": {"l2": _POSITIVE},
}

# L2 ridge for the logistic families is fixed (not swept) so separable
# data still has a unique optimum.
DEFAULT_L2 = 1e-6

BINARY_FAMILIES = ("lssvm", "logreg", "boosted_tree", "decision_forest", "neural_net")
MULTICLASS_FAMILIES = (
    "multinomial_logreg",
    "neural_net",
    "decision_forest",
    "ova_boosted_tree",
    "ova_svm",
)


@dataclass(frozen=True)
class ModelSpec:
    """A classifier family plus hyperparameters and a seed."""

    family: str
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        validate_spec(self.family, self.hyperparameters)

    def param(self, name: str, default=None):
        return self.hyperparameters.get(name, default)

    def key(self) -> tuple:
        return (self.family, tuple(sorted(self.hyperparameters.items())), self.seed)


def validate_spec(family: str, hyperparameters: dict) -> None:
    if family not in FAMILY_SCHEMAS:
        raise ModelError(f"unknown model family {family!r}")
    schema = FAMILY_SCHEMAS[family]
    for name, value in hyperparameters.items():
        if name not in schema:
            raise ModelError(f"{family}: unknown hyperparameter {name!r}")
        check, desc = schema[name]
        if not check(value):
            raise ModelError(f"{family}: {name}={value!r} violates constraint {desc}")


class TrainedModel:
    """Base for all fitted predictors.

    Subclasses implement ``_positive_scores`` (binary families, P(class 1)
    per row) or override ``score_matrix`` (multi-class families).
    Instances are immutable by convention after ``fit``.
    """

    is_binary = True

    def __init__(self, spec: ModelSpec, feature_names: tuple[str, ...],
                 class_names: tuple[str, ...]):
        self.spec = spec
        self.feature_names = tuple(feature_names)
        self.class_names = tuple(class_names)
        self.converged = True

    def _check_schema(self, data: Dataset) -> None:
        if data.feature_names != self.feature_names:
            raise DataError(
                f"feature schema mismatch: model trained on {self.feature_names}, "
                f"got {data.feature_names}"
            )

    def predict_scores(self, data: Dataset) -> np.ndarray:
        """N x C matrix of class scores; every row sums to 1."""
        self._check_schema(data)
        scores = self.score_matrix(data.features)
        rows = scores.sum(axis=1, keepdims=True)
        rows[rows == 0] = 1.0
        return scores / rows

    def score_matrix(self, X: np.ndarray) -> np.ndarray:
        p = np.clip(self._positive_scores(X), 0.0, 1.0)
        return np.column_stack([1.0 - p, p])

    def _positive_scores(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict_labels(self, data: Dataset) -> np.ndarray:
        return np.argmax(self.predict_scores(data), axis=1)

    # Serialization: subclasses supply the learned-parameter payload.
    def _payload(self) -> dict:
        raise NotImplementedError

    def to_document(self) -> dict:
        return {
            "family": self.spec.family,
            "hyperparameters": dict(self.spec.hyperparameters),
            "seed": self.spec.seed,
            "feature_names": list(self.feature_names),
            "class_names": list(self.class_names),
            "converged": self.converged,
            "parameters": self._payload(),
        }


def encode_array(a: np.ndarray) -> dict:
    """Exact float round-trip via hexadecimal float strings."""
    arr = np.asarray(a, dtype=float)
    return {"shape": list(arr.shape), "hex": [v.hex() for v in arr.ravel().tolist()]}


def decode_array(doc: dict) -> np.ndarray:
    vals = np.array([float.fromhex(h) for h in doc["hex"]], dtype=float)
    return vals.reshape(doc["shape"])
