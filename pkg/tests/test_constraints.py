import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noisyfair import metrics as M
from noisyfair.constraints import (
    ConstraintConfig,
    ConstraintSet,
    DenoisedConstraint,
    DenoisedEstimates,
    denoised_estimates,
    hard_residuals,
    residuals,
    smooth_residuals,
)
from noisyfair.data import LabeledDataset
from noisyfair.exceptions import ConfigError, DimensionMismatch
from noisyfair.metrics import RateVectors
from noisyfair.noise import binary_from_etas, build_noise_matrix, identity

from conftest import random_dataset

H3 = build_noise_matrix([[0.70, 0.15, 0.15], [0.05, 0.90, 0.05], [0.05, 0.05, 0.90]])


def rv(u, w):
    return RateVectors(np.array(u, float), np.array(w, float), 100)


def binary_closed_form(v, eta0, eta1):
    """Per-group estimate with the 2x2 inverse written out by hand."""
    eta = (eta0, eta1)
    s = 1.0 - eta0 - eta1
    return np.array([((1 - eta[1 - i]) * v[i] - eta[1 - i] * v[1 - i]) / s for i in (0, 1)])


def test_identity_estimates_are_plain_rates():
    r = rv([0.1, 0.3], [0.4, 0.6])
    est = denoised_estimates(r, identity(2))
    np.testing.assert_array_equal(est.num, r.u)
    np.testing.assert_array_equal(est.den, r.w)
    np.testing.assert_array_equal(est.gamma, M.group_rates(r))


def test_binary_hand_value():
    est = denoised_estimates(rv([0.2, 0.3], [0.5, 0.5]), binary_from_etas(0.3, 0.1))
    assert est.num[0] == pytest.approx(((1 - 0.1) * 0.2 - 0.1 * 0.3) / 0.6, abs=1e-12)
    assert est.num[0] == pytest.approx(0.25, abs=1e-12)
    assert est.num[1] == pytest.approx((0.7 * 0.3 - 0.3 * 0.2) / 0.6, abs=1e-12)
    np.testing.assert_allclose(est.den, [2 / 3, 1 / 3], atol=1e-12)


def test_zero_numerators():
    est = denoised_estimates(rv([0, 0], [0.5, 0.5]), binary_from_etas(0.3, 0.1))
    np.testing.assert_array_equal(est.num, [0, 0])
    np.testing.assert_array_equal(est.gamma, [0, 0])


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        denoised_estimates(rv([0.1, 0.2], [0.5, 0.5]), H3)


def test_binary_closed_form_grid(rng):
    grid = np.arange(9) * 0.05
    for e0 in grid:
        for e1 in grid:
            H = binary_from_etas(e0, e1)
            assert abs(H.m_const - 1 / (1 - e0 - e1)) < 1e-12
            for _ in range(5):
                w = rng.uniform(0.05, 1, 2)
                w /= w.sum()
                u = w * rng.uniform(0, 1, 2)
                est = denoised_estimates(RateVectors(u, w, 1), H)
                np.testing.assert_allclose(est.num, binary_closed_form(u, e0, e1), atol=1e-12, rtol=0)
                np.testing.assert_allclose(est.den, binary_closed_form(w, e0, e1), atol=1e-12, rtol=0)


def _est(gamma, den=(0.5, 0.5), m=1.0):
    den = np.array(den, float)
    g = np.array(gamma, float)
    return DenoisedEstimates(g * den, den, g, m)


def test_residuals_balanced_feasible():
    cfg = ConstraintConfig(tau=0.8, delta=0.05, lam=0.0)
    res = residuals(_est([0.5, 0.5], den=(1.0, 1.0)), cfg)
    np.testing.assert_allclose(res.ratio_residuals, np.full((2, 2), 0.125))
    assert res.feasible and res.reason == ""
    assert res.vector().shape == (6,)


def test_residuals_ratio_violation():
    cfg = ConstraintConfig(tau=0.9, delta=0.0, lam=0.0)
    res = residuals(_est([0.2, 0.5], den=(1.0, 1.0)), cfg)
    assert res.ratio_residuals[0, 1] == pytest.approx(0.2 - 0.45)
    assert not res.feasible and "ratio" in res.reason


def test_floor_threshold_arithmetic():
    cfg = ConstraintConfig(tau=0.8, delta=0.05, lam=0.1)
    H = binary_from_etas(0.3, 0.1)
    assert cfg.floor_threshold(H.m_const) == pytest.approx(1 / 60, abs=1e-12)
    res = residuals(_est([0.01, 0.5], den=(1.0, 1.0), m=H.m_const), cfg)
    np.testing.assert_allclose(res.floor_residuals, [0.01 - 1 / 60, 0.5 - 1 / 60])
    assert "floor" in res.reason


def test_binary_floor_form_is_a_rescaling():
    """Scaling num and the threshold by 1 - eta0 - eta1 gives the unnormalized binary form."""
    for e0, e1 in [(0.3, 0.1), (0.2, 0.2), (0.0, 0.4)]:
        s = 1 - e0 - e1
        H = binary_from_etas(e0, e1)
        cfg = ConstraintConfig(tau=0.8, delta=0.05, lam=0.2)
        rng = np.random.default_rng(0)
        for _ in range(100):
            num = rng.uniform(0, 0.5, 2)
            general = num - cfg.floor_threshold(H.m_const) >= 0
            binary = s * num - (s * cfg.lam - cfg.delta) >= 0
            np.testing.assert_array_equal(general, binary)


def test_undefined_denominator_is_infeasible():
    cfg = ConstraintConfig(tau=0.5, delta=0.0, lam=0.0)
    est = DenoisedEstimates(np.array([0.0, 0.2]), np.array([-0.01, 0.4]), np.array([np.nan, 0.5]), 1.0)
    res = residuals(est, cfg)
    assert not res.feasible and "undefined_gamma" in res.reason


def test_denominator_rows_only_for_linear_fractional():
    est = _est([0.5, 0.5])
    assert residuals(est, ConstraintConfig(tau=0.5, metric="sr")).vector().size == 6
    assert residuals(est, ConstraintConfig(tau=0.5, metric="fdr")).vector().size == 8


def test_config_validation():
    with pytest.raises(ConfigError):
        ConstraintConfig(tau=1.5)
    with pytest.raises(ConfigError):
        ConstraintConfig(tau=0.5, lam=0.6)
    with pytest.raises(ConfigError):
        ConstraintConfig(tau=0.5, metric="nope")


def test_identity_reduction_random_datasets():
    """With H = I the denoised constraint is the plain constraint on observed rates."""
    rng = np.random.default_rng(2024)
    for trial in range(200):
        p = int(rng.choice([2, 3]))
        n = int(rng.integers(5, 201))
        ds = random_dataset(rng, n, p=p)
        theta = rng.standard_normal(ds.d)
        pred = (ds.features @ theta >= 0).astype(int)
        tau = float(rng.uniform(0, 1))
        for metric in ("sr", "fpr", "fdr"):
            cfg = ConstraintConfig(tau=tau, delta=0.0, lam=0.0, metric=metric)
            r = M.empirical_rates(pred, ds, metric)
            q = M.group_rates(r)
            est = denoised_estimates(r, identity(p))
            defined = ~np.isnan(q)
            np.testing.assert_allclose(est.gamma[defined], q[defined], atol=1e-12, rtol=0)
            res = hard_residuals(theta, ds, identity(p), cfg)
            if defined.all():
                om = M.omega(q)
                if abs(om - tau) > 1e-9:
                    assert res.feasible == (om >= tau)
            else:
                assert not res.feasible


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=5), st.floats(0.0, 1.0))
def test_all_pairs_matches_min_over_max(gamma, c):
    g = np.array(gamma)
    cfg = ConstraintConfig(tau=c, delta=0.0, lam=0.0)
    res = residuals(_est(g, den=np.ones(len(g))), cfg)
    om = M.omega(g)
    if abs(om - c) > 1e-9:
        assert res.feasible == (om >= c)


def test_consistency_with_growing_n():
    """The inverted noisy masses converge to the true masses at the binomial rate."""
    H = binary_from_etas(0.3, 0.1)
    mu = np.array([0.4, 0.6])
    rate = np.array([0.3, 0.7])
    u_true = mu * rate
    # cell probabilities over (f, zhat): P[f=1, zhat=j] = sum_i u_i H_ij
    p1 = u_true @ H.entries
    p0 = (mu * (1 - rate)) @ H.entries
    cells = np.r_[p0, p1]
    rng = np.random.default_rng(11)
    mean_err = []
    for n in (1_000, 10_000, 100_000):
        errs, inside = [], 0
        eps = 3 * np.sqrt(np.max(p1 * (1 - p1)) / n)
        for _ in range(200):
            counts = rng.multinomial(n, cells)
            u_hat = counts[2:] / n
            err = np.abs(H.transpose_inverse @ u_hat - u_true).max()
            errs.append(err)
            inside += err <= eps * H.m_const
        assert inside >= 0.95 * 200
        mean_err.append(np.mean(errs))
    assert mean_err[0] > mean_err[1] > mean_err[2]


def _jac_fd(fn, theta, h=1e-6):
    cols = []
    for k in range(theta.size):
        e = np.zeros_like(theta)
        e[k] = h
        cols.append((fn(theta + e) - fn(theta - e)) / (2 * h))
    return np.stack(cols, axis=1)


@pytest.mark.parametrize("metric", ["sr", "fpr", "fdr", "for"])
@pytest.mark.parametrize("H", [binary_from_etas(0.3, 0.1), H3], ids=["p2", "p3"])
def test_smooth_jacobian(metric, H, rng):
    ds = random_dataset(rng, 80, p=H.p, d=4)
    cfg = ConstraintConfig(tau=0.8, delta=0.05, lam=0.05, metric=metric)
    con = DenoisedConstraint(ds, H, cfg)
    theta = 0.5 * rng.standard_normal(ds.d)
    vec, jac = con.smooth(theta, 0.7)
    assert vec.vector().size == con.size == jac.shape[0]
    fd = _jac_fd(lambda t: con.smooth(t, 0.7)[0].vector(), theta)
    np.testing.assert_allclose(jac, fd, atol=1e-6, rtol=1e-5)


def test_low_temperature_matches_hard(rng):
    ds = random_dataset(rng, 300, p=2)
    theta = np.array([0.0, 2.0, -1.0])
    margin = np.abs(ds.features @ theta)
    keep = np.flatnonzero(margin >= 1)
    ds = ds.subset(keep)
    H = binary_from_etas(0.3, 0.1)
    for metric in ("sr", "fpr", "fdr"):
        cfg = ConstraintConfig(tau=0.8, metric=metric)
        soft = smooth_residuals(theta, ds, H, cfg, temperature=1e-4).vector()
        hard = hard_residuals(theta, ds, H, cfg).vector()
        np.testing.assert_allclose(soft, hard, atol=1e-3)


def test_zero_theta_soft_predictions_are_half(rng):
    ds = random_dataset(rng, 120, p=2)
    mass = np.bincount(ds.protected[:, 0], minlength=2) / ds.n
    con = DenoisedConstraint(ds, identity(2), ConstraintConfig(tau=0.5))
    num, den = con._from_soft(np.full(ds.n, 0.5))
    np.testing.assert_allclose(num, 0.5 * mass)
    np.testing.assert_allclose(den, mass)
    res, _ = con.smooth(np.zeros(ds.d))
    np.testing.assert_allclose(res.floor_residuals, 0.5 * mass - (0.1 - 1.0 * 0.05))


def test_identity_soft_and_hard_agree_on_separable(separable):
    theta = np.array([0.0, 5.0, 5.0])
    cfg = ConstraintConfig(tau=0.8, lam=0.0)
    soft = smooth_residuals(theta, separable, identity(2), cfg, temperature=1e-3)
    hard = hard_residuals(theta, separable, identity(2), cfg)
    assert soft.feasible == hard.feasible
    np.testing.assert_allclose(soft.vector(), hard.vector(), atol=1e-9)


def test_constraint_set_concatenates(rng):
    Z = np.column_stack([rng.integers(0, 2, 100), rng.integers(0, 3, 100)])
    ds = LabeledDataset(rng.standard_normal((100, 3)), Z, rng.integers(0, 2, 100), (2, 3))
    cs = ConstraintSet(ds, [(ConstraintConfig(tau=0.8, metric="sr", attribute=0), binary_from_etas(0.3, 0.1)),
                            (ConstraintConfig(tau=0.8, metric="fpr", attribute=1), H3)])
    assert cs.size == 2 * 2 + 2 + 3 * 3 + 3
    vals, jac = cs.smooth(np.zeros(3))
    assert vals.shape == (18,) and jac.shape == (18, 3)
    assert cs.hard_vector(np.zeros(3)).shape == (18,)
