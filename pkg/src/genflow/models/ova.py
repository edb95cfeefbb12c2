"""One-vs-all reduction: C binary models, predict the class whose model
gives the highest positive score."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..dataset import Dataset, DataError
from .base import ModelSpec, TrainedModel

__all__ = ["OneVsAllModel"]


class OneVsAllModel(TrainedModel):
    is_binary = False

    def __init__(self, spec, feature_names, class_names, members):
        super().__init__(spec, feature_names, class_names)
        self.members = list(members)
        self.converged = all(m.converged for m in members)

    @classmethod
    def fit(cls, spec: ModelSpec, train: Dataset,
            binary_family: str, fit_binary) -> "OneVsAllModel":
        counts = train.class_counts()
        if (counts == 0).any():
            empty = int(np.argmin(counts))
            raise DataError(f"one-vs-all: class {empty} has no training samples")
        members = []
        for c in range(train.n_classes):
            view = replace(
                train,
                labels=(train.labels == c).astype(int),
                class_names=("rest", train.class_names[c]),
            )
            sub_spec = ModelSpec(binary_family, dict(spec.hyperparameters),
                                 seed=spec.seed + c)
            members.append(fit_binary(sub_spec, view))
        return cls(spec, train.feature_names, train.class_names, members)

    def score_matrix(self, X: np.ndarray) -> np.ndarray:
        cols = [m.score_matrix(X)[:, 1] for m in self.members]
        return np.column_stack(cols)

    def _payload(self) -> dict:
        return {"members": [m.to_document() for m in self.members]}
