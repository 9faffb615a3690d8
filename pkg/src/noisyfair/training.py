"""Denoised constrained logistic regression."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import classifier as _clf
from .constraints import ConstraintConfig, ConstraintSet
from .exceptions import ConfigError, DataError, DimensionMismatch, InfeasibleProgram
from .noise import identity
from .solver import SolverConfig, Status, minimize_constrained, with_fd_gradient


@dataclass(frozen=True)
class Surrogate:
    """How predictions enter the constraints during training.

    ``soft`` substitutes ``sigmoid(x.theta / temperature)`` and uses analytic
    Jacobians; ``hard`` keeps the 0/1 indicator and differentiates by forward
    differences with the solver's ``fd_eps``.
    """

    kind: str = "soft"
    temperature: float = 0.2

    def __post_init__(self):
        if self.kind not in ("soft", "hard"):
            raise ConfigError(f"unknown surrogate {self.kind!r}")
        if self.temperature <= 0:
            raise ConfigError("temperature must be positive")


SOFT = Surrogate("soft", 0.2)
HARD_FINITE_DIFF = Surrogate("hard")


def _objective(train, c):
    X, y = train.features, train.labels

    def fun(theta):
        return _clf.loss_and_grad(theta, X, y, c)

    return fun


def train_denoised(train, constraints, solver_cfg=None, c=0.0, surrogate=SOFT, strict=True):
    """Fit a linear classifier under denoised fairness constraints.

    ``constraints`` is a list of ``(ConstraintConfig, NoiseMatrix)`` pairs,
    one per (metric, attribute). Returns ``(classifier, solve_result)``. When
    every restart ends infeasible, raises :class:`InfeasibleProgram` carrying
    the least-violating fit, or returns it if ``strict`` is false.
    """
    if train.n == 0:
        raise DataError("cannot train on an empty dataset")
    solver_cfg = solver_cfg or SolverConfig()
    constraints = list(constraints)
    for cfg, H in constraints:
        if not isinstance(cfg, ConstraintConfig):
            raise ConfigError("constraints must be (ConstraintConfig, NoiseMatrix) pairs")
        if cfg.attribute >= train.n_attributes:
            raise ConfigError(f"attribute {cfg.attribute} not present in dataset")
        if H.p != train.n_groups[cfg.attribute]:
            raise DimensionMismatch(
                f"noise matrix is {H.p}x{H.p} but attribute {cfg.attribute} has {train.n_groups[cfg.attribute]} groups"
            )
    fun = _objective(train, c)
    cset = ConstraintSet(train, constraints) if constraints else None
    if cset is None:
        cons = None
    elif surrogate.kind == "soft":
        T = surrogate.temperature

        def cons(theta):
            return cset.smooth(theta, T)
    else:
        cons = with_fd_gradient(cset.hard_vector, solver_cfg.fd_eps)

    result = minimize_constrained(fun, cons, train.d, solver_cfg)
    clf = _clf.LinearClassifier(result.theta, c)
    if cset is not None:
        result.hard_residuals = cset.hard(result.theta)
    if strict and result.status is Status.INFEASIBLE:
        raise InfeasibleProgram(
            f"no restart satisfied the constraints (violation {result.max_constraint_violation:.3g})",
            result=result,
            classifier=clf,
        )
    return clf, result


def build_constraints(train, metric="sr", tau=0.8, delta=0.05, lam=0.1, H=None, attribute=0):
    """Single-constraint convenience wrapper."""
    cfg = ConstraintConfig(tau=tau, delta=delta, lam=lam, metric=metric, attribute=attribute)
    H = H if H is not None else identity(train.n_groups[attribute])
    return [(cfg, H)]


def hard_feasible(result):
    res = getattr(result, "hard_residuals", None)
    if res is None:
        return True
    return all(r.feasible for r in res)


def constraint_count(constraints):
    n = 0
    for cfg, H in constraints:
        p = H.p
        n += p * p + p + (p if cfg.metric.is_linear_fractional else 0)
    return n


def predictions(clf, dataset):
    return np.asarray(clf.predict(dataset.features))
