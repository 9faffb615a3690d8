"""Closed-form population analyses for binary attributes and statistical rate.

These quantify how far fairness measured on the noisy attribute can drift
from fairness on the true one. Each exact formula has a finite-sample replica
for Monte Carlo checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exceptions import ConfigError, NonPositiveDenominator


@dataclass(frozen=True)
class BinaryPopulation:
    """``mu0`` is the mass of group 0, ``eta`` the symmetric flip probability and
    ``gamma_true`` the statistical-rate ratio on the true attribute (group 0
    being the disadvantaged one)."""

    mu0: float
    eta: float
    gamma_true: float

    def __post_init__(self):
        if not 0.0 < self.mu0 < 1.0:
            raise ConfigError("mu0 must lie in (0, 1)")
        if not 0.0 <= self.eta < 0.5:
            raise ConfigError("eta must lie in [0, 0.5)")
        if not 0.0 <= self.gamma_true <= 1.0:
            raise ConfigError("gamma_true must lie in [0, 1]")


def gap2_ratio(pop):
    """Asymptotic value of ``P[f=1 | Zhat=0] / P[f=1 | Zhat=1]``."""
    m, e, g = pop.mu0, pop.eta, pop.gamma_true
    mass = (e * m + (1 - e) * (1 - m)) / ((1 - e) * m + e * (1 - m))
    rates = ((1 - e) * m * g + e * (1 - m)) / (e * m * g + (1 - e) * (1 - m))
    return mass * rates


def gap2_gamma(pop):
    """Noisy-attribute statistical-rate ratio of a classifier with true ratio ``gamma_true``."""
    r = gap2_ratio(pop)
    if r == 0.0:
        return 0.0
    return min(r, 1.0 / r)


def gap2_replica(pop, n, seed=0, positive_rate=1.0):
    """Finite-sample statistical-rate ratio on the noisy attribute.

    Group 1 gets exactly ``positive_rate`` positives and group 0
    ``gamma_true * positive_rate``; only the attribute flips are random.
    """
    rng = np.random.default_rng(seed)
    n0 = int(round(pop.mu0 * n))
    z = np.r_[np.zeros(n0, dtype=int), np.ones(n - n0, dtype=int)]
    f = np.zeros(n, dtype=int)
    f[n0: n0 + int(round(positive_rate * (n - n0)))] = 1
    f[: int(round(pop.gamma_true * positive_rate * n0))] = 1
    flip = rng.random(n) < pop.eta
    zhat = np.where(flip, 1 - z, z)
    r0 = f[zhat == 0].mean()
    r1 = f[zhat == 1].mean()
    hi = max(r0, r1)
    return 1.0 if hi == 0 else min(r0, r1) / hi


@dataclass(frozen=True)
class Gap1Bound:
    tight: float
    loose: float


def gap1_upper_bound(gamma_noisy, alpha0, alpha1, mu0, mu1, mu_hat0, mu_hat1):
    """Upper bound on the true statistical-rate ratio from the noisy one.

    ``alpha0``/``alpha1`` cap how much of the positive mass inside each noisy
    group comes from true group 0 relative to true group 1. The loose form
    ``max(alpha0, alpha1) * mu1 / mu0`` does not depend on ``gamma_noisy``.
    """
    if min(mu0, mu1, mu_hat0, mu_hat1) <= 0:
        raise NonPositiveDenominator("group masses must be positive")
    for a in (alpha0, alpha1):
        if not 0.0 <= a <= 1.0:
            raise ConfigError("alphas must lie in [0, 1]")
    b00, b01 = mu_hat0 / mu0, mu_hat0 / mu1
    b10, b11 = mu_hat1 / mu0, mu_hat1 / mu1
    num = alpha0 * (1 + alpha1) * b00 * gamma_noisy + alpha1 * (1 + alpha0) * b10
    den = (1 + alpha1) * b01 * gamma_noisy + (1 + alpha0) * b11
    if den <= 0:
        raise NonPositiveDenominator("bound denominator is non-positive")
    return Gap1Bound(num / den, max(alpha0, alpha1) * mu1 / mu0)


EXAMPLE1_MU0 = Fraction(1, 3)
EXAMPLE1_ETA = Fraction(1, 3)


def example1_oracle():
    """Exact ratios for ``f = Z`` with ``mu0 = eta = 1/3``: ``(0, 5/8)``.

    True attribute: group 0 never gets a positive, so the ratio is 0.
    Noisy attribute: ``P[f=1 | Zhat=j] = P[Z=1 | Zhat=j]`` by Bayes.
    """
    mu0, eta = EXAMPLE1_MU0, EXAMPLE1_ETA
    mu1 = 1 - mu0
    muhat0 = (1 - eta) * mu0 + eta * mu1
    muhat1 = 1 - muhat0
    r0 = eta * mu1 / muhat0
    r1 = (1 - eta) * mu1 / muhat1
    gamma_true = Fraction(0)
    gamma_noisy = min(r0, r1) / max(r0, r1)
    return gamma_true, gamma_noisy


def example1_replica(n, seed=0):
    """Sampled ``(gamma_true, gamma_noisy)`` for the same population."""
    rng = np.random.default_rng(seed)
    z = (rng.random(n) >= float(EXAMPLE1_MU0)).astype(int)
    flip = rng.random(n) < float(EXAMPLE1_ETA)
    zhat = np.where(flip, 1 - z, z)
    f = z

    def ratio(g):
        r = np.array([f[g == 0].mean(), f[g == 1].mean()])
        return 1.0 if r.max() == 0 else r.min() / r.max()

    return ratio(z), ratio(zhat)
