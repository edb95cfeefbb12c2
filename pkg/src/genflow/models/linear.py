"""Binary logistic regression (Newton/IRLS) and softmax regression
(gradient descent), both with a small fixed L2 ridge."""

from __future__ import annotations

import numpy as np

from ..dataset import Dataset
from .base import DEFAULT_L2, ModelSpec, TrainedModel, encode_array, decode_array

__all__ = [
    "LogisticRegressionModel",
    "MultinomialLogregModel",
    "logistic_nll_grad",
    "softmax_nll_grad",
]

MAX_NEWTON_ITER = 100
MAX_GD_ITER = 1000
GRAD_TOL = 1e-6


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_nll_grad(w: np.ndarray, X: np.ndarray, y: np.ndarray,
                      l2: float) -> tuple[float, np.ndarray]:
    """Penalized negative log-likelihood and its gradient.

    ``w[0]`` is the intercept (unpenalized); ``X`` has no bias column.
    """
    z = w[0] + X @ w[1:]
    # log(1 + exp(z)) - y*z, computed stably
    nll = float(np.sum(np.logaddexp(0.0, z) - y * z))
    nll += 0.5 * l2 * float(w[1:] @ w[1:])
    p = _sigmoid(z)
    g = np.empty_like(w)
    g[0] = np.sum(p - y)
    g[1:] = X.T @ (p - y) + l2 * w[1:]
    return nll, g


def softmax_nll_grad(B: np.ndarray, X: np.ndarray, y: np.ndarray,
                     l2: float) -> tuple[float, np.ndarray]:
    """Penalized multinomial NLL and gradient.

    ``B`` is C x (d+1) with column 0 the intercepts (unpenalized).
    """
    Z = B[:, 0] + X @ B[:, 1:].T  # N x C
    Zmax = Z.max(axis=1, keepdims=True)
    logZ = Zmax[:, 0] + np.log(np.exp(Z - Zmax).sum(axis=1))
    nll = float(np.sum(logZ - Z[np.arange(len(y)), y]))
    nll += 0.5 * l2 * float(np.sum(B[:, 1:] ** 2))
    P = np.exp(Z - logZ[:, None])
    Y = np.zeros_like(P)
    Y[np.arange(len(y)), y] = 1.0
    D = P - Y
    G = np.empty_like(B)
    G[:, 0] = D.sum(axis=0)
    G[:, 1:] = D.T @ X + l2 * B[:, 1:]
    return nll, G


class LogisticRegressionModel(TrainedModel):
    """logit(p) = intercept + weights . x, fit by damped Newton."""

    def __init__(self, spec, feature_names, class_names, intercept, weights,
                 converged=True):
        super().__init__(spec, feature_names, class_names)
        self.intercept = float(intercept)
        self.weights = np.asarray(weights, dtype=float)
        self.converged = converged

    @classmethod
    def fit(cls, spec: ModelSpec, train: Dataset) -> "LogisticRegressionModel":
        X = train.features
        y = train.labels.astype(float)
        l2 = float(spec.param("l2", DEFAULT_L2))
        n, d = X.shape
        w = np.zeros(d + 1)
        converged = False
        nll, g = logistic_nll_grad(w, X, y, l2)
        for _ in range(MAX_NEWTON_ITER):
            if np.linalg.norm(g) <= GRAD_TOL:
                converged = True
                break
            z = w[0] + X @ w[1:]
            p = _sigmoid(z)
            r = np.maximum(p * (1 - p), 1e-12)
            Xb = np.column_stack([np.ones(n), X])
            H = (Xb * r[:, None]).T @ Xb
            H[1:, 1:] += l2 * np.eye(d)
            try:
                step = np.linalg.solve(H, g)
            except np.linalg.LinAlgError:
                step = g
            # Halve until the penalized NLL stops increasing.
            t = 1.0
            for _ in range(30):
                w_new = w - t * step
                nll_new, g_new = logistic_nll_grad(w_new, X, y, l2)
                if nll_new <= nll:
                    break
                t *= 0.5
            w, nll, g = w_new, nll_new, g_new
        else:
            converged = np.linalg.norm(g) <= GRAD_TOL
        return cls(spec, train.feature_names, train.class_names, w[0], w[1:],
                   converged)

    def _positive_scores(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(self.intercept + X @ self.weights)

    def _payload(self) -> dict:
        return {"intercept": encode_array(self.intercept),
                "weights": encode_array(self.weights)}

    @classmethod
    def from_payload(cls, spec, feature_names, class_names, payload, converged=True):
        return cls(spec, feature_names, class_names,
                   decode_array(payload["intercept"]).item(),
                   decode_array(payload["weights"]), converged)


class MultinomialLogregModel(TrainedModel):
    """Softmax regression: P(class i | x) proportional to exp(B_i . x)."""

    is_binary = False

    def __init__(self, spec, feature_names, class_names, coef, converged=True):
        super().__init__(spec, feature_names, class_names)
        self.coef = np.asarray(coef, dtype=float)  # C x (d+1), col 0 = intercepts
        self.converged = converged

    @classmethod
    def fit(cls, spec: ModelSpec, train: Dataset) -> "MultinomialLogregModel":
        l2 = float(spec.param("l2", DEFAULT_L2))
        C = train.n_classes
        # Standardize for gradient-descent conditioning, then fold the
        # scaling back into the coefficients so prediction uses raw x.
        mu = train.features.mean(axis=0)
        sd = train.features.std(axis=0)
        sd[sd == 0] = 1.0
        Xs = (train.features - mu) / sd
        y = train.labels
        B = np.zeros((C, train.n_features + 1))
        nll, G = softmax_nll_grad(B, Xs, y, l2)
        lr = 1.0 / max(len(y), 1)
        converged = False
        for _ in range(MAX_GD_ITER):
            if np.linalg.norm(G) <= GRAD_TOL:
                converged = True
                break
            # Backtracking on the fixed-direction gradient step.
            t = lr
            for _ in range(40):
                B_new = B - t * G
                nll_new, G_new = softmax_nll_grad(B_new, Xs, y, l2)
                if nll_new <= nll:
                    break
                t *= 0.5
            else:
                converged = True
                break
            if nll - nll_new > 0:
                lr = min(t * 2.0, 1.0)
            B, nll, G = B_new, nll_new, G_new
        coef = np.empty_like(B)
        coef[:, 1:] = B[:, 1:] / sd
        coef[:, 0] = B[:, 0] - coef[:, 1:] @ mu
        return cls(spec, train.feature_names, train.class_names, coef, converged)

    def score_matrix(self, X: np.ndarray) -> np.ndarray:
        Z = self.coef[:, 0] + X @ self.coef[:, 1:].T
        Z -= Z.max(axis=1, keepdims=True)
        E = np.exp(Z)
        return E / E.sum(axis=1, keepdims=True)

    def _payload(self) -> dict:
        return {"coef": encode_array(self.coef)}

    @classmethod
    def from_payload(cls, spec, feature_names, class_names, payload, converged=True):
        return cls(spec, feature_names, class_names,
                   decode_array(payload["coef"]), converged)
