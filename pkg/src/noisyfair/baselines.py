"""Comparison classifiers: plain logistic regression, fairness constraints on
the observed (noisy) attribute, and randomized labeling."""

from __future__ import annotations

import numpy as np

from .constraints import ConstraintConfig, naive_constraints
from .exceptions import ConfigError
from .training import SOFT, train_denoised


def train_unconstrained(train, cfg=None, c=0.0):
    clf, _ = train_denoised(train, [], cfg, c)
    return clf


def train_naive_fair(train, metric="sr", tau=0.9, cfg=None, c=0.0, delta=0.0, lam=0.0, attribute=0,
                     surrogate=SOFT, strict=False, return_result=False):
    """Constrain Omega on the observed attribute as if it were noise-free.

    Runs the denoised pipeline with identity noise, so the constraint reduces
    to ``Omega(noisy) >= tau - delta``.
    """
    ccfg = ConstraintConfig(tau=tau, delta=delta, lam=lam, metric=metric, attribute=attribute)
    clf, result = train_denoised(train, naive_constraints(train, [ccfg]), cfg, c, surrogate, strict=strict)
    return (clf, result) if return_result else clf


def randomized_labeling(dataset, alpha, seed=0):
    """Predict 0 with probability ``alpha`` and 1 otherwise, independently per sample."""
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError("alpha must lie in [0, 1]")
    u = np.random.default_rng(seed).random(dataset.n if hasattr(dataset, "n") else int(dataset))
    return (u >= alpha).astype(np.int64)
