"""Group performance functions and the multiplicative fairness ratio.

A metric is a pair of events ``(xi, xi_prime)`` over ``(prediction, label)``;
group ``i`` performs ``q_i = P[xi | xi_prime, Z = i]``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .exceptions import AllUndefined, ConfigError, LengthMismatch

logger = logging.getLogger(__name__)


class MetricKind(str, Enum):
    STATISTICAL_RATE = "sr"
    FALSE_POSITIVE_RATE = "fpr"
    FALSE_DISCOVERY_RATE = "fdr"
    TRUE_POSITIVE_RATE = "tpr"
    FALSE_NEGATIVE_RATE = "fnr"
    TRUE_NEGATIVE_RATE = "tnr"
    ACCURACY_RATE = "acc"
    FALSE_OMISSION_RATE = "for"


def _always(f, y):
    return np.ones(np.broadcast(f, y).shape, dtype=bool)


@dataclass(frozen=True)
class MetricSpec:
    kind: MetricKind
    xi: Callable
    xi_prime: Callable

    @property
    def is_linear_fractional(self):
        """True iff ``xi_prime`` reads the prediction."""
        for y in (0, 1):
            if bool(self.xi_prime(np.array(0), np.array(y))) != bool(self.xi_prime(np.array(1), np.array(y))):
                return True
        return False

    @property
    def name(self):
        return self.kind.value

    def affine_indicators(self):
        """Coefficients ``(a, b)`` per label with ``1[event] = a[y] + b[y] * f``.

        Returned for the joint event ``xi and xi_prime`` and for ``xi_prime``;
        substituting a soft prediction for ``f`` gives the smooth surrogate.
        """
        out = []
        for ev in (lambda f, y: self.xi(f, y) & self.xi_prime(f, y), self.xi_prime):
            a = np.array([float(ev(np.array(0), np.array(y))) for y in (0, 1)])
            b = np.array([float(ev(np.array(1), np.array(y))) for y in (0, 1)]) - a
            out.append((a, b))
        return out


_PRESETS = {
    MetricKind.STATISTICAL_RATE: (lambda f, y: f == 1, _always),
    MetricKind.FALSE_POSITIVE_RATE: (lambda f, y: f == 1, lambda f, y: y == 0),
    MetricKind.FALSE_DISCOVERY_RATE: (lambda f, y: y == 0, lambda f, y: f == 1),
    MetricKind.TRUE_POSITIVE_RATE: (lambda f, y: f == 1, lambda f, y: y == 1),
    MetricKind.FALSE_NEGATIVE_RATE: (lambda f, y: f == 0, lambda f, y: y == 1),
    MetricKind.TRUE_NEGATIVE_RATE: (lambda f, y: f == 0, lambda f, y: y == 0),
    MetricKind.ACCURACY_RATE: (lambda f, y: f == y, _always),
    MetricKind.FALSE_OMISSION_RATE: (lambda f, y: y == 1, lambda f, y: f == 0),
}


def get_metric(name):
    if isinstance(name, MetricSpec):
        return name
    try:
        kind = MetricKind(name.lower() if isinstance(name, str) else name)
    except ValueError:
        raise ConfigError(f"unknown metric {name!r}; choose from {[k.value for k in MetricKind]}") from None
    xi, xi_prime = _PRESETS[kind]
    return MetricSpec(kind, xi, xi_prime)


STATISTICAL_RATE = get_metric("sr")
FALSE_POSITIVE_RATE = get_metric("fpr")
FALSE_DISCOVERY_RATE = get_metric("fdr")


@dataclass(frozen=True)
class RateVectors:
    u: np.ndarray
    w: np.ndarray
    n: int

    @property
    def p(self):
        return self.u.shape[0]


def empirical_rates(predictions, dataset, metric, attribute=0):
    """``u_i = #{xi, xi', group i} / n`` and ``w_i = #{xi', group i} / n``."""
    f = np.asarray(predictions).astype(np.int64).ravel()
    if f.shape[0] != dataset.n:
        raise LengthMismatch(f"{f.shape[0]} predictions for {dataset.n} samples")
    metric = get_metric(metric)
    y = dataset.labels
    z = dataset.protected[:, attribute]
    p = dataset.n_groups[attribute]
    if dataset.n == 0:
        return RateVectors(np.zeros(p), np.zeros(p), 0)
    cond = np.asarray(metric.xi_prime(f, y), dtype=bool)
    joint = cond & np.asarray(metric.xi(f, y), dtype=bool)
    n = dataset.n
    u = np.bincount(z, weights=joint.astype(float), minlength=p) / n
    w = np.bincount(z, weights=cond.astype(float), minlength=p) / n
    return RateVectors(u, w, n)


def group_rates(rates):
    """``u_i / w_i``; groups with ``w_i = 0`` come back as NaN (undefined)."""
    u, w = np.asarray(rates.u, float), np.asarray(rates.w, float)
    q = np.full(u.shape, np.nan)
    ok = w > 0
    q[ok] = u[ok] / w[ok]
    return q


def _defined(q):
    q = np.asarray(q, dtype=float)
    d = q[~np.isnan(q)]
    if d.size == 0:
        raise AllUndefined("no group has a defined rate")
    if d.size < q.size:
        logger.warning("excluding %d group(s) with undefined rate", q.size - d.size)
    return d


def omega(q):
    """min over max of the defined group rates; 1 when every rate is 0."""
    d = _defined(q)
    hi = d.max()
    if hi == 0:
        return 1.0
    return float(d.min() / hi)


def relative_rates(q):
    """``q_j / max q`` per group (NaN stays NaN)."""
    q = np.asarray(q, dtype=float)
    hi = _defined(q).max()
    if hi == 0:
        return np.where(np.isnan(q), np.nan, 1.0)
    return q / hi


def additive_disparity(q):
    d = _defined(q)
    return float(d.max() - d.min())


def fairness(predictions, dataset, metric, attribute=0):
    """Omega of ``metric`` for hard predictions on ``dataset``."""
    return omega(group_rates(empirical_rates(predictions, dataset, metric, attribute)))


def accuracy(predictions, dataset):
    if dataset.n == 0:
        return float("nan")
    return float(np.mean(np.asarray(predictions).ravel() == dataset.labels))
