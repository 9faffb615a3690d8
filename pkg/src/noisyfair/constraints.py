"""Denoised fairness constraints.

Rates measured on the noisy attribute are mapped back through ``(H^T)^{-1}``
to estimate the joint and conditioning masses on the true attribute. The
ratio of the two estimates stands in for the true group performance, and
constraints are enforced on every ordered pair of groups.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from . import metrics as _metrics
from .exceptions import ConfigError, DimensionMismatch
from .noise import identity


@dataclass(frozen=True)
class ConstraintConfig:
    tau: float
    delta: float = 0.05
    lam: float = 0.1
    metric: object = "sr"
    attribute: int = 0
    denominator_floor: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "metric", _metrics.get_metric(self.metric))
        if not 0.0 <= self.tau <= 1.0:
            raise ConfigError(f"tau = {self.tau} must lie in [0, 1]")
        if not 0.0 <= self.delta < 1.0:
            raise ConfigError(f"delta = {self.delta} must lie in [0, 1)")
        if not 0.0 <= self.lam < 0.5:
            raise ConfigError(f"lambda = {self.lam} must lie in [0, 0.5)")
        if self.denominator_floor <= 0:
            raise ConfigError("denominator_floor must be positive")

    @property
    def ratio_threshold(self):
        return self.tau - self.delta

    def floor_threshold(self, m_const):
        return self.lam - m_const * self.delta


@dataclass(frozen=True)
class DenoisedEstimates:
    num: np.ndarray
    den: np.ndarray
    gamma: np.ndarray
    m_const: float
    floor: float = 1e-8

    @property
    def undefined(self):
        return self.den <= self.floor


def denoised_estimates(rates, H, floor=1e-8):
    if rates.p != H.p:
        raise DimensionMismatch(f"rates have {rates.p} groups, noise matrix has {H.p}")
    num = H.transpose_inverse @ np.asarray(rates.u, float)
    den = H.transpose_inverse @ np.asarray(rates.w, float)
    gamma = np.full(num.shape, np.nan)
    ok = den > floor
    gamma[ok] = num[ok] / den[ok]
    return DenoisedEstimates(num, den, gamma, H.m_const, floor)


@dataclass(frozen=True)
class ConstraintResiduals:
    ratio_residuals: np.ndarray
    floor_residuals: np.ndarray
    denominator_residuals: np.ndarray
    feasible: bool
    reason: str = ""
    include_denominators: bool = field(default=False, repr=False)

    def vector(self):
        parts = [self.ratio_residuals.ravel(), self.floor_residuals]
        if self.include_denominators:
            parts.append(self.denominator_residuals)
        return np.concatenate(parts)

    @property
    def min_residual(self):
        return float(self.vector().min())


def _assemble(num, den, cfg, m_const, include_denominators):
    floor = cfg.denominator_floor
    undefined = den <= floor
    gamma = num / np.where(undefined, floor, den)
    c = cfg.ratio_threshold
    ratio = gamma[:, None] - c * gamma[None, :]
    floor_res = num - cfg.floor_threshold(m_const)
    den_res = den - floor
    reasons = []
    if np.any(undefined):
        reasons.append("undefined_gamma")
    if ratio.min() < 0:
        reasons.append("ratio")
    if floor_res.min() < 0:
        reasons.append("floor")
    return ConstraintResiduals(ratio, floor_res, den_res, not reasons, ",".join(reasons), include_denominators)


def residuals(est, cfg):
    return _assemble(est.num, est.den, cfg, est.m_const, cfg.metric.is_linear_fractional)


def hard_residuals(theta, dataset, H, cfg):
    pred = (dataset.features @ np.asarray(theta, float) >= 0).astype(np.int64)
    rates = _metrics.empirical_rates(pred, dataset, cfg.metric, cfg.attribute)
    return residuals(denoised_estimates(rates, H, cfg.denominator_floor), cfg)


class DenoisedConstraint:
    """Residuals of one (metric, attribute) constraint as a function of theta.

    Precomputes the per-sample event coefficients so repeated evaluation is a
    few matrix products; :meth:`smooth` also returns the Jacobian.
    """

    def __init__(self, dataset, H, cfg):
        p = dataset.n_groups[cfg.attribute]
        if H.p != p:
            raise DimensionMismatch(f"attribute {cfg.attribute} has {p} groups, noise matrix has {H.p}")
        self.dataset, self.H, self.cfg = dataset, H, cfg
        self.X = dataset.features
        n = dataset.n
        z = dataset.protected[:, cfg.attribute]
        onehot = np.zeros((n, p))
        onehot[np.arange(n), z] = 1.0
        (ja, jb), (ca, cb) = cfg.metric.affine_indicators()
        y = dataset.labels
        # rows of (H^T)^{-1} G^T / n, applied to per-sample event values
        self._proj = H.transpose_inverse @ onehot.T / max(n, 1)
        self._joint = (ja[y], jb[y])
        self._cond = (ca[y], cb[y])
        self.include_denominators = cfg.metric.is_linear_fractional

    @property
    def size(self):
        p = self.H.p
        return p * p + p + (p if self.include_denominators else 0)

    def _from_soft(self, s):
        num = self._proj @ (self._joint[0] + self._joint[1] * s)
        den = self._proj @ (self._cond[0] + self._cond[1] * s)
        return num, den

    def hard(self, theta):
        s = (self.X @ theta >= 0).astype(float)
        num, den = self._from_soft(s)
        return _assemble(num, den, self.cfg, self.H.m_const, self.include_denominators)

    def smooth(self, theta, temperature=1.0):
        """Residual vector and Jacobian with ``sigmoid(x.theta / T)`` as the prediction."""
        if temperature <= 0:
            raise ConfigError("temperature must be positive")
        s = expit(self.X @ theta / temperature)
        ds = s * (1.0 - s) / temperature
        num, den = self._from_soft(s)
        dnum = self._proj @ ((self._joint[1] * ds)[:, None] * self.X)
        dden = self._proj @ ((self._cond[1] * ds)[:, None] * self.X)
        res = _assemble(num, den, self.cfg, self.H.m_const, self.include_denominators)

        floor = self.cfg.denominator_floor
        under = den <= floor
        den_c = np.where(under, floor, den)
        dden_c = np.where(under[:, None], 0.0, dden)
        gamma = num / den_c
        dgamma = (dnum * den_c[:, None] - num[:, None] * dden_c) / (den_c**2)[:, None]
        c = self.cfg.ratio_threshold
        p = num.shape[0]
        jac_ratio = (dgamma[:, None, :] - c * dgamma[None, :, :]).reshape(p * p, -1)
        jacs = [jac_ratio, dnum]
        if self.include_denominators:
            jacs.append(dden)
        return res, np.vstack(jacs)


def smooth_residuals(theta, dataset, H, cfg, temperature=1.0):
    return DenoisedConstraint(dataset, H, cfg).smooth(np.asarray(theta, float), temperature)[0]


class ConstraintSet:
    """Several denoised constraints evaluated as one concatenated vector."""

    def __init__(self, dataset, constraints):
        self.parts = [DenoisedConstraint(dataset, H, cfg) for cfg, H in constraints]

    @property
    def size(self):
        return sum(c.size for c in self.parts)

    def smooth(self, theta, temperature=1.0):
        vals, jacs = [], []
        for c in self.parts:
            r, j = c.smooth(theta, temperature)
            vals.append(r.vector())
            jacs.append(j)
        return np.concatenate(vals), np.vstack(jacs)

    def hard_vector(self, theta):
        return np.concatenate([c.hard(theta).vector() for c in self.parts])

    def hard(self, theta):
        return [c.hard(theta) for c in self.parts]


def naive_constraints(dataset, configs):
    """Pair each config with the identity matrix: constraints on the attribute as observed."""
    return [(cfg, identity(dataset.n_groups[cfg.attribute])) for cfg in configs]
