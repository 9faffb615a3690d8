"""scikit-learn compatible wrappers around the training routines.

The protected attribute is passed to ``fit`` as ``sensitive_features`` and is
never used at prediction time.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .classifier import LinearClassifier
from .constraints import ConstraintConfig
from .data import from_arrays
from .exceptions import ConfigError, DataError
from .noise import NoiseMatrix, binary_from_etas, build_noise_matrix, identity
from .solver import SolverConfig
from .training import Surrogate, train_denoised


def _resolve_noise(noise, p):
    if noise is None:
        return identity(p)
    if isinstance(noise, NoiseMatrix):
        return noise
    arr = np.asarray(noise, dtype=float)
    if arr.ndim == 1 and arr.size == 2:
        return binary_from_etas(float(arr[0]), float(arr[1]))
    return build_noise_matrix(arr)


class _LinearBase(ClassifierMixin, BaseEstimator):
    def _design(self, X):
        X = np.asarray(X, dtype=float)
        if self.fit_intercept:
            X = np.hstack([np.ones((X.shape[0], 1)), X])
        return X

    def _solver_config(self):
        return SolverConfig(max_iterations=self.max_iter, restarts=self.n_restarts, seed=self.random_state or 0)

    def _encode_labels(self, y):
        self.classes_ = unique_labels(y)
        if len(self.classes_) > 2:
            raise DataError("only binary labels are supported")
        return (y == self.classes_[-1]).astype(np.int64) if len(self.classes_) == 2 else np.zeros(len(y), np.int64)

    def _store(self, clf, result):
        theta = clf.theta
        self.model_ = clf
        self.result_ = result
        if self.fit_intercept:
            self.intercept_ = np.array([theta[0]])
            self.coef_ = theta[1:].reshape(1, -1)
        else:
            self.intercept_ = np.zeros(1)
            self.coef_ = theta.reshape(1, -1)
        return self

    def decision_function(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return self.model_.decision_function(self._design(X))

    def predict_proba(self, X):
        p1 = 1.0 / (1.0 + np.exp(-self.decision_function(X)))
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X):
        s = self.decision_function(X)
        if len(self.classes_) == 1:
            return np.full(s.shape[0], self.classes_[0])
        return self.classes_[(s >= 0).astype(int)]


class DenoisedFairClassifier(_LinearBase):
    """Logistic regression with fairness constraints corrected for attribute noise.

    Parameters
    ----------
    metric : preset name, e.g. ``"sr"``, ``"fpr"`` or ``"fdr"``.
    tau, delta, lam : fairness target, relaxation slack and denominator floor.
    noise : ``None`` (no noise), a pair ``(eta0, eta1)``, a square matrix or a
        :class:`NoiseMatrix`. Row ``i`` gives the distribution of observed
        groups for true group ``i``.
    surrogate, temperature : how predictions are smoothed in the constraints.
    """

    def __init__(self, metric="sr", tau=0.8, delta=0.05, lam=0.1, noise=None, C=0.0, fit_intercept=True,
                 surrogate="soft", temperature=0.2, max_iter=500, n_restarts=5, random_state=0, strict=False):
        self.metric = metric
        self.tau = tau
        self.delta = delta
        self.lam = lam
        self.noise = noise
        self.C = C
        self.fit_intercept = fit_intercept
        self.surrogate = surrogate
        self.temperature = temperature
        self.max_iter = max_iter
        self.n_restarts = n_restarts
        self.random_state = random_state
        self.strict = strict

    def _noise_for(self, p):
        return _resolve_noise(self.noise, p)

    def fit(self, X, y, sensitive_features=None):
        X, y = check_X_y(X, y)
        if sensitive_features is None:
            raise ConfigError("sensitive_features is required")
        z = np.asarray(sensitive_features).reshape(-1)
        if z.shape[0] != X.shape[0]:
            raise DataError("sensitive_features length does not match X")
        self.groups_, z_idx = np.unique(z, return_inverse=True)
        self.n_features_in_ = X.shape[1]
        yb = self._encode_labels(y)
        H = self._noise_for(max(len(self.groups_), 2))
        data = from_arrays(self._design(X), yb, z_idx, n_groups=(H.p,))
        cfg = ConstraintConfig(tau=self.tau, delta=self.delta, lam=self.lam, metric=self.metric)
        clf, result = train_denoised(data, [(cfg, H)], self._solver_config(), self.C,
                                     Surrogate(self.surrogate, self.temperature), strict=self.strict)
        return self._store(clf, result)


class NaiveFairClassifier(DenoisedFairClassifier):
    """Same constraint treated as if the observed attribute were noise-free."""

    def __init__(self, metric="sr", tau=0.8, delta=0.0, lam=0.0, C=0.0, fit_intercept=True,
                 surrogate="soft", temperature=0.2, max_iter=500, n_restarts=5, random_state=0, strict=False):
        self.metric = metric
        self.tau = tau
        self.delta = delta
        self.lam = lam
        self.C = C
        self.fit_intercept = fit_intercept
        self.surrogate = surrogate
        self.temperature = temperature
        self.max_iter = max_iter
        self.n_restarts = n_restarts
        self.random_state = random_state
        self.strict = strict

    def _noise_for(self, p):
        return identity(p)


class UnconstrainedLogisticRegression(_LinearBase):
    """L2-regularized logistic regression fit by the package's own solver."""

    def __init__(self, C=0.0, fit_intercept=True, max_iter=500, n_restarts=5, random_state=0):
        self.C = C
        self.fit_intercept = fit_intercept
        self.max_iter = max_iter
        self.n_restarts = n_restarts
        self.random_state = random_state

    def fit(self, X, y, sensitive_features=None):
        X, y = check_X_y(X, y)
        self.n_features_in_ = X.shape[1]
        yb = self._encode_labels(y)
        data = from_arrays(self._design(X), yb, np.zeros(X.shape[0], dtype=int), n_groups=(1,))
        clf, result = train_denoised(data, [], self._solver_config(), self.C)
        return self._store(clf, result)


def as_linear_classifier(estimator):
    """The fitted :class:`LinearClassifier` behind an estimator (intercept first if present)."""
    check_is_fitted(estimator, "model_")
    return LinearClassifier(estimator.model_.theta, estimator.model_.regularization_c)
