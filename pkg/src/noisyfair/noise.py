"""Flipping noise on protected attributes.

An attribute value ``i`` is observed as ``j`` with probability ``H[i, j]``.
Denoising works with the inverse of ``H.T``; its largest row L1 norm is the
noise constant ``m_const`` that scales the floor constraint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import BinaryOnlyError, DominanceError, GroupRangeError, NonPositiveDenominator, RowSumError, ShapeError

ROW_SUM_TOL = 1e-9


def gauss_jordan_inverse(a):
    """Invert a small dense matrix by Gauss-Jordan elimination with partial pivoting."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ShapeError("matrix must be square")
    aug = np.hstack([a, np.eye(n)])
    for k in range(n):
        piv = k + int(np.argmax(np.abs(aug[k:, k])))
        if abs(aug[piv, k]) < 1e-14:
            raise np.linalg.LinAlgError("matrix is singular")
        if piv != k:
            aug[[k, piv]] = aug[[piv, k]]
        aug[k] /= aug[k, k]
        for i in range(n):
            if i != k and aug[i, k] != 0.0:
                aug[i] -= aug[i, k] * aug[k]
    return aug[:, n:]


@dataclass(frozen=True, eq=False)
class NoiseMatrix:
    entries: np.ndarray
    transpose_inverse: np.ndarray
    m_const: float

    @property
    def p(self):
        return self.entries.shape[0]

    def is_identity(self):
        return bool(np.array_equal(self.entries, np.eye(self.p)))

    @property
    def etas(self):
        """``(eta0, eta1)`` for a binary matrix."""
        if self.p != 2:
            raise BinaryOnlyError("etas are defined for p = 2 only")
        return float(self.entries[0, 1]), float(self.entries[1, 0])

    def to_list(self):
        return self.entries.tolist()


def build_noise_matrix(entries):
    H = np.array(entries, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape[0] < 2:
        raise ShapeError(f"noise matrix must be square with p >= 2, got shape {H.shape}")
    if not np.all(np.isfinite(H)) or np.any(H < 0) or np.any(H > 1):
        raise ShapeError("noise matrix entries must lie in [0, 1]")
    dev = np.abs(H.sum(axis=1) - 1.0)
    if np.any(dev > ROW_SUM_TOL):
        raise RowSumError(f"row {int(np.argmax(dev))} does not sum to 1 (off by {dev.max():.3g})")
    diag = np.diag(H)
    if np.any(diag <= 0.5):
        raise DominanceError(f"diagonal entry H[{int(np.argmin(diag))}] = {diag.min()} must exceed 0.5")
    tinv = gauss_jordan_inverse(H.T)
    m = float(np.abs(tinv).sum(axis=1).max())
    H.setflags(write=False)
    tinv.setflags(write=False)
    return NoiseMatrix(H, tinv, m)


def identity(p):
    return build_noise_matrix(np.eye(p))


def binary_from_etas(eta0, eta1):
    """2x2 matrix: ``eta0`` flips 0 -> 1, ``eta1`` flips 1 -> 0."""
    for name, eta in (("eta0", eta0), ("eta1", eta1)):
        if eta >= 0.5:
            raise DominanceError(f"{name} = {eta} must be < 0.5")
        if eta < 0:
            raise ShapeError(f"{name} = {eta} must be >= 0")
    return build_noise_matrix([[1.0 - eta0, eta0], [eta1, 1.0 - eta1]])


def inject_noise(dataset, H, seed=0, attribute=0):
    """Return a copy of ``dataset`` with one attribute passed through ``H``.

    Each sample draws ``u ~ U[0, 1)`` from ``numpy.random.default_rng(seed)``
    (PCG64) and takes the first ``j`` whose row CDF exceeds ``u``.
    """
    z = dataset.protected[:, attribute]
    p = H.p
    if dataset.n_groups[attribute] != p:
        raise GroupRangeError(f"attribute {attribute} has {dataset.n_groups[attribute]} groups, H has {p}")
    if z.size and (z.min() < 0 or z.max() >= p):
        raise GroupRangeError("protected value outside range(p)")
    u = np.random.default_rng(seed).random(z.shape[0])
    cdf = np.cumsum(H.entries, axis=1)
    cdf[:, -1] = 1.0
    z_new = (u[:, None] >= cdf[z]).sum(axis=1)
    Z = np.array(dataset.protected, copy=True)
    Z[:, attribute] = z_new
    return dataset.with_protected(Z)


@dataclass(frozen=True)
class EstimationError:
    zeta: float
    alpha0: float
    alpha1: float

    def degraded_bound(self, tau, delta):
        """Lower bound on the denoised rate ratio under a misestimated ``H``."""
        return tau - delta - self.zeta * max(self.alpha0, self.alpha1)

    def degraded_guarantee(self, tau, delta):
        return tau - 3.0 * (delta + self.zeta * max(self.alpha0, self.alpha1))


def zeta(H_true, H_assumed):
    return float(np.abs(H_true.entries - H_assumed.entries).max())


def estimation_error_bound(H_true, H_assumed, f, noisy, attribute=0):
    """zeta and the binary alpha terms for classifier ``f`` on noisy data.

    The denoised rates use ``H_assumed``; the correction denominators use the
    true flip rates, as in the derivation of the degraded bound.
    """
    if H_true.p != 2 or H_assumed.p != 2:
        raise BinaryOnlyError("estimation_error_bound is defined for p = 2 only")
    pred = f.predict(noisy.features)
    zhat = noisy.protected[:, attribute]
    n = noisy.n
    if n == 0:
        raise NonPositiveDenominator("empty dataset")
    eta0, eta1 = H_true.etas
    pf = pred.mean()
    pf_z = np.array([np.sum(pred[zhat == i]) for i in (0, 1)]) / n
    mu = np.array([np.sum(zhat == i) for i in (0, 1)]) / n

    num = H_assumed.transpose_inverse @ pf_z
    den = H_assumed.transpose_inverse @ mu
    if np.any(den <= 0):
        raise NonPositiveDenominator("denoised group mass is non-positive under the assumed noise")
    g0, g1 = num / den
    d_mu1 = (1 - eta0) * mu[1] - eta0 * mu[0]
    d_mu0 = (1 - eta1) * mu[0] - eta1 * mu[1]
    d_f0 = (1 - eta1) * pf_z[0] - eta1 * pf_z[1]
    d_f1 = (1 - eta0) * pf_z[1] - eta0 * pf_z[0]
    dens = (g0 * d_mu1, d_f0, g1 * d_mu0, d_f1)
    if min(dens) <= 0:
        raise NonPositiveDenominator(f"alpha denominators not all positive: {dens}")
    alpha1 = pf / (g0 * d_mu1) + g1 / d_f0
    alpha0 = pf / (g1 * d_mu0) + g0 / d_f1
    return EstimationError(zeta(H_true, H_assumed), float(alpha0), float(alpha1))
