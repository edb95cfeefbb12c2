"""Classifier zoo with a uniform fit/score interface.

Binary families: lssvm, logreg, boosted_tree, decision_forest,
neural_net.  Multi-class families: multinomial_logreg, neural_net,
decision_forest, ova_boosted_tree, ova_svm (plus ova_logreg for cheap
pipelines).  Every fitted model scores a dataset into an N x C matrix
whose rows sum to 1.
"""

from __future__ import annotations

from ..dataset import Dataset, DataError
from .base import (
    BINARY_FAMILIES,
    MULTICLASS_FAMILIES,
    FAMILY_SCHEMAS,
    ModelError,
    ModelSpec,
    TrainedModel,
    validate_spec,
    encode_array,
    decode_array,
)
from .linear import LogisticRegressionModel, MultinomialLogregModel
from .lssvm import LssvmModel
from .boosting import BoostedTreeModel
from .forest import DecisionForestModel
from .neural import NeuralNetModel
from .ova import OneVsAllModel

__all__ = [
    "ModelSpec",
    "TrainedModel",
    "ModelError",
    "BINARY_FAMILIES",
    "MULTICLASS_FAMILIES",
    "FAMILY_SCHEMAS",
    "fit_model",
    "fit_one_vs_all",
    "model_from_document",
    "validate_spec",
]

_BINARY_FITTERS = {
    "lssvm": LssvmModel.fit,
    "logreg": LogisticRegressionModel.fit,
    "boosted_tree": BoostedTreeModel.fit,
    "neural_net": NeuralNetModel.fit,
    "decision_forest": DecisionForestModel.fit,
}

_OVA_BASE = {
    "ova_boosted_tree": "boosted_tree",
    "ova_svm": "lssvm",
    "ova_logreg": "logreg",
}


def fit_model(spec: ModelSpec, train: Dataset) -> TrainedModel:
    """Fit any family; deterministic given (spec, train)."""
    family = spec.family
    if family in _OVA_BASE:
        return fit_one_vs_all(_OVA_BASE[family], spec.hyperparameters, train,
                              seed=spec.seed, spec_family=family)
    if family == "multinomial_logreg":
        return MultinomialLogregModel.fit(spec, train)
    if family in ("decision_forest", "neural_net"):
        return _BINARY_FITTERS[family](spec, train)
    # Strictly binary families
    if train.n_classes != 2:
        raise ModelError(f"{family} requires a binary dataset (C=2), "
                         f"got C={train.n_classes}")
    return _BINARY_FITTERS[family](spec, train)


def fit_one_vs_all(binary_family: str, hyperparameters: dict, train: Dataset,
                   seed: int = 0, spec_family: str | None = None) -> OneVsAllModel:
    """Train C binary models (class i vs rest) and combine by argmax."""
    if binary_family not in _BINARY_FITTERS:
        raise ModelError(f"unknown binary family {binary_family!r}")
    if spec_family is None:
        spec_family = {v: k for k, v in _OVA_BASE.items()}.get(
            binary_family, "ova_" + binary_family
        )
    spec = ModelSpec(spec_family, dict(hyperparameters), seed=seed)
    return OneVsAllModel.fit(spec, train, binary_family,
                             _BINARY_FITTERS[binary_family])


_DESERIALIZERS = {
    "lssvm": LssvmModel,
    "logreg": LogisticRegressionModel,
    "boosted_tree": BoostedTreeModel,
    "neural_net": NeuralNetModel,
    "decision_forest": DecisionForestModel,
    "multinomial_logreg": MultinomialLogregModel,
}


def model_from_document(doc: dict) -> TrainedModel:
    """Inverse of ``TrainedModel.to_document`` (exact float round-trip)."""
    family = doc["family"]
    spec = ModelSpec(family, dict(doc["hyperparameters"]), seed=doc.get("seed", 0))
    names = tuple(doc["feature_names"]), tuple(doc["class_names"])
    if family in _OVA_BASE:
        members = [model_from_document(m) for m in doc["parameters"]["members"]]
        return OneVsAllModel(spec, *names, members)
    model = _DESERIALIZERS[family].from_payload(
        spec, *names, doc["parameters"], converged=doc.get("converged", True)
    )
    return model
