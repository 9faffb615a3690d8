"""Linear logistic model."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import expit

from .exceptions import DimensionMismatch

PROB_CLIP = 1e-12


def _check(theta, X):
    theta = np.asarray(theta, dtype=float).ravel()
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.shape[1] != theta.shape[0]:
        raise DimensionMismatch(f"features have {X.shape[1]} columns, theta has {theta.shape[0]}")
    return theta, X


def decision_scores(theta, X):
    theta, X = _check(theta, X)
    return X @ theta


def predict_proba(theta, X):
    return expit(decision_scores(theta, X))


def predict(theta, X):
    # ties at probability 0.5 go to the positive class
    return (decision_scores(theta, X) >= 0).astype(np.int64)


def log_loss(theta, X, y, c=0.0):
    return loss_and_grad(theta, X, y, c)[0]


def loss_and_grad(theta, X, y, c=0.0):
    """Mean negative log-likelihood plus ``c * ||theta||^2`` and its gradient."""
    theta, X = _check(theta, X)
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != X.shape[0]:
        raise DimensionMismatch("labels and features differ in length")
    n = X.shape[0]
    prob = np.clip(expit(X @ theta), PROB_CLIP, 1.0 - PROB_CLIP)
    loss = -np.mean(y * np.log(prob) + (1.0 - y) * np.log1p(-prob)) + c * theta @ theta
    grad = X.T @ (expit(X @ theta) - y) / n + 2.0 * c * theta
    return float(loss), grad


@dataclass(frozen=True, eq=False)
class LinearClassifier:
    theta: np.ndarray
    regularization_c: float = 0.0

    def __post_init__(self):
        t = np.array(self.theta, dtype=float).ravel()
        if not np.all(np.isfinite(t)):
            raise ValueError("theta must be finite")
        t.setflags(write=False)
        object.__setattr__(self, "theta", t)

    @property
    def d(self):
        return self.theta.shape[0]

    def decision_function(self, X):
        return decision_scores(self.theta, X)

    def predict_proba(self, X):
        return predict_proba(self.theta, X)

    def predict(self, X):
        return predict(self.theta, X)

    def loss(self, dataset):
        return log_loss(self.theta, dataset.features, dataset.labels, self.regularization_c)

    def to_dict(self):
        return {"theta": self.theta.tolist(), "c": self.regularization_c}

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["theta"], dtype=float), float(d.get("c", 0.0)))

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True) + "\n")

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))
