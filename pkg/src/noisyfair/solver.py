"""Inequality-constrained minimization by an augmented Lagrangian.

Solves ``min f(theta)  s.t.  g(theta) >= 0`` with an outer multiplier loop
around L-BFGS inner solves. Each restart starts from a point drawn uniformly
from ``[-init_scale, init_scale]^d``.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .exceptions import ConfigError, NonFiniteObjective

logger = logging.getLogger(__name__)

PENALTY_START = 10.0
PENALTY_GROWTH = 10.0
PENALTY_CAP = 1e6
MAX_OUTER = 50


class Status(str, enum.Enum):
    CONVERGED = "converged"
    ITERATION_LIMIT = "iteration_limit"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 500
    ftol: float = 1e-3
    fd_eps: float = 1e-3
    restarts: int = 5
    init_scale: float = 1.0
    seed: int = 0
    feasibility_tol: float = 1e-4

    def __post_init__(self):
        for name in ("max_iterations", "ftol", "fd_eps", "restarts", "init_scale", "feasibility_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"solver {name} must be positive")

    @classmethod
    def from_dict(cls, d):
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        unknown = set(d) - set(known)
        if unknown:
            raise ConfigError(f"unknown solver options {sorted(unknown)}")
        return cls(**known)


@dataclass
class SolveResult:
    theta: np.ndarray
    objective: float
    max_constraint_violation: float
    status: Status
    iterations_used: int
    restart_index: int
    restart_summaries: list = field(default_factory=list, repr=False)

    @property
    def feasible(self):
        return self.status is not Status.INFEASIBLE


def violation(g):
    g = np.asarray(g, dtype=float)
    if g.size == 0:
        return 0.0
    return float(max(0.0, -g.min()))


def with_fd_gradient(fn, eps=1e-3):
    """Wrap a value-only callable so it also returns a forward-difference derivative."""

    def wrapped(theta):
        theta = np.asarray(theta, dtype=float)
        f0 = np.asarray(fn(theta), dtype=float)
        grads = []
        for k in range(theta.shape[0]):
            t = theta.copy()
            t[k] += eps
            grads.append((np.asarray(fn(t), dtype=float) - f0) / eps)
        jac = np.stack(grads, axis=-1) if grads else np.zeros(f0.shape + (0,))
        return (float(f0) if f0.ndim == 0 else f0), jac

    return wrapped


def _checked(fun, theta):
    f, g = fun(theta)
    if not np.isfinite(f) or not np.all(np.isfinite(g)):
        raise NonFiniteObjective(f"objective is not finite at theta={theta}")
    return float(f), np.asarray(g, dtype=float)


def _solve_once(fun, cons, theta0, cfg):
    theta = theta0.copy()
    if cons is None:
        res = minimize(lambda t: _checked(fun, t), theta, jac=True, method="L-BFGS-B",
                       options={"maxiter": cfg.max_iterations})
        status = Status.CONVERGED if res.success else Status.ITERATION_LIMIT
        return res.x, float(res.fun), 0.0, status, int(res.nit)

    g0, _ = cons(theta)
    mult = np.zeros(np.asarray(g0).shape[0])
    rho = PENALTY_START
    used = 0
    f_prev = None
    v_prev = np.inf
    status = Status.ITERATION_LIMIT
    for _ in range(MAX_OUTER):
        def lagrangian(t, mult=mult, rho=rho):
            f, df = _checked(fun, t)
            g, jac = cons(t)
            shifted = np.maximum(0.0, mult - rho * g)
            val = f + (shifted @ shifted - mult @ mult) / (2.0 * rho)
            return val, df - jac.T @ shifted

        budget = cfg.max_iterations - used
        if budget <= 0:
            break
        res = minimize(lagrangian, theta, jac=True, method="L-BFGS-B", options={"maxiter": budget})
        used += max(int(res.nit), 1)
        theta = res.x
        f, _ = _checked(fun, theta)
        g, _ = cons(theta)
        v = violation(g)
        mult = np.maximum(0.0, mult - rho * g)
        if f_prev is not None and abs(f - f_prev) < cfg.ftol and v < cfg.feasibility_tol:
            status = Status.CONVERGED
            break
        if v > 0.5 * v_prev:
            rho = min(rho * PENALTY_GROWTH, PENALTY_CAP)
        f_prev, v_prev = f, v
    f, _ = _checked(fun, theta)
    v = violation(cons(theta)[0])
    if v > cfg.feasibility_tol:
        status = Status.INFEASIBLE
    return theta, f, v, status, used


def minimize_constrained(fun, cons, d, cfg=None, x0=None):
    """Minimize ``fun`` subject to ``cons(theta) >= 0`` componentwise.

    ``fun(theta) -> (value, gradient)`` and ``cons(theta) -> (values,
    jacobian)``; ``cons`` may be None. Returns the best restart, preferring
    feasible results and then lower objective; ties keep the earlier restart.
    """
    cfg = cfg or SolverConfig()
    rng = np.random.default_rng(cfg.seed)
    best = None
    summaries = []
    for r in range(cfg.restarts):
        theta0 = rng.uniform(-cfg.init_scale, cfg.init_scale, size=d)
        if x0 is not None and r == 0:
            theta0 = np.asarray(x0, dtype=float).copy()
        theta, f, v, status, used = _solve_once(fun, cons, theta0, cfg)
        result = SolveResult(theta, f, v, status, used, r)
        summaries.append({"restart": r, "objective": f, "violation": v, "status": status.value, "iterations": used})
        logger.debug("restart %d: objective %.6g violation %.3g %s", r, f, v, status.value)
        if best is None or _better(result, best):
            best = result
    best.restart_summaries = summaries
    return best


def _better(a, b):
    fa, fb = a.feasible, b.feasible
    if fa != fb:
        return fa
    if fa:
        return a.objective < b.objective
    return a.max_constraint_violation < b.max_constraint_violation
