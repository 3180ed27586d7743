import math

import numpy as np
import pytest

from splitlbi import estimators, lbi, model
from splitlbi.designs import build_fused_1d
from splitlbi.errors import InvalidDimension, PathTooShort
from splitlbi.estimators import (
    consistency_check,
    oracle_estimator,
    projection_estimator,
    stopping_rule,
)
from splitlbi.linalg import SpectralBounds
from splitlbi.model import Hyperparams, Problem, Truth


def noisy_problem(seed=0, n=12, p=6, sigma=0.3, fused=False):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    beta_star = np.zeros(p)
    beta_star[:2] = 2.0
    beta_star[2] = -1.5
    D = build_fused_1d(p) if fused else np.eye(p)
    y = X @ beta_star + sigma * rng.standard_normal(n)
    return Problem(X=X, y=y, D=D, truth=Truth(beta_star, sigma))


def kkt_residuals(problem, nu, S, beta, gamma):
    gb, _ = model.grad(problem, nu, beta, gamma)
    return np.abs(gb).max(), np.abs(gamma[S] - problem.D[S] @ beta).max()


def test_oracle_noise_free_full_rank_recovers_truth():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((10, 4))
    beta_star = np.array([1.0, -2.0, 0.0, 3.0])
    prob = Problem(X=X, y=X @ beta_star, D=np.eye(4), truth=Truth(beta_star))
    S = prob.support()
    beta, gamma = oracle_estimator(prob, 0.5, S)
    np.testing.assert_allclose(beta, beta_star, atol=1e-9)
    np.testing.assert_allclose(gamma[S], prob.D[S] @ beta_star, atol=1e-9)


def test_oracle_empty_support():
    prob = noisy_problem(2)
    beta, gamma = oracle_estimator(prob, 1.0, [])
    np.testing.assert_allclose(gamma, np.zeros(prob.m))
    # beta minimizes the full two-term quadratic
    G = prob.X.T @ prob.X / prob.n + prob.D.T @ prob.D / 1.0
    resid = G @ beta - prob.X.T @ prob.y / prob.n
    assert np.abs(resid).max() < 1e-10


@pytest.mark.parametrize("seed", range(8))
def test_oracle_kkt_residuals(seed):
    prob = noisy_problem(seed, fused=bool(seed % 2))
    S = prob.support()
    nu = 0.4 + 0.3 * seed
    beta, gamma = oracle_estimator(prob, nu, S)
    g_res, fit_res = kkt_residuals(prob, nu, S, beta, gamma)
    assert g_res < 1e-8
    assert fit_res < 1e-10
    off = np.setdiff1d(np.arange(prob.m), S)
    assert np.abs(gamma[off]).max() == 0.0 if off.size else True


def test_stopping_rule_direct_value():
    b = SpectralBounds(d_min_pos=1.0, d_max=1.0, x_max=1.0)
    rule = stopping_rule(eta=1.0, sigma=1.0, spectral=b, n=64, m=4, alpha=0.1)
    expected = (1.0 / 8.0) * math.sqrt(64.0 / math.log(4.0))
    assert rule.tau_bar == pytest.approx(expected)
    assert rule.k_bar == int(expected / 0.1)


def test_stopping_rule_floor_boundary():
    b = SpectralBounds(d_min_pos=1.0, d_max=1.0, x_max=1.0)
    tau = (1.0 / 8.0) * math.sqrt(64.0 / math.log(4.0))
    rule = stopping_rule(eta=1.0, sigma=1.0, spectral=b, n=64, m=4, alpha=tau)
    assert rule.k_bar == 1


def test_stopping_rule_rejects_small_m():
    b = SpectralBounds(d_min_pos=1.0, d_max=1.0, x_max=1.0)
    with pytest.raises(InvalidDimension):
        stopping_rule(eta=1.0, sigma=1.0, spectral=b, n=10, m=1, alpha=0.1)


def test_stopping_rule_scalar_recomputation():
    # frozen instance constants, recomputed with plain arithmetic
    prob = noisy_problem(5)
    b = prob.spectral_bounds(prob.support())
    eta, sigma, alpha = 0.6, 0.3, 0.004
    rule = stopping_rule(eta, sigma, b, prob.n, prob.m, alpha)
    tau = eta / (8 * sigma) * (b.d_min_pos / b.x_max) * (prob.n / math.log(prob.m)) ** 0.5
    assert rule.tau_bar == pytest.approx(tau, rel=1e-12)
    assert rule.k_bar == math.floor(tau / alpha)


def test_projection_full_support_is_identity():
    prob = noisy_problem(3)
    beta = np.arange(prob.p, dtype=float)
    np.testing.assert_array_equal(
        projection_estimator(prob, beta, range(prob.m)), beta
    )


def test_projection_identity_transform_zeroes_complement():
    prob = noisy_problem(4)  # D = I, p = 6
    beta = np.arange(1.0, 7.0)
    out = projection_estimator(prob, beta, [0, 2])
    np.testing.assert_allclose(out, [1.0, 0.0, 3.0, 0.0, 0.0, 0.0], atol=1e-12)


def test_projection_fused_grouping_structure():
    prob = noisy_problem(6, fused=True)
    path = lbi.run(prob, Hyperparams.for_problem(prob, 2.0, 50.0), k_max=4000,
                   record_stride=4000)
    final = path.points[-1]
    support = np.flatnonzero(final.gamma)
    beta_proj = projection_estimator(prob, final.beta, support)
    comp = np.setdiff1d(np.arange(prob.m), support)
    assert np.abs(prob.D[comp] @ beta_proj).max() < 1e-10
    # inactive difference rows force grouped-constant structure
    for j in comp[comp < prob.p - 1]:
        assert beta_proj[j] == pytest.approx(beta_proj[j + 1], abs=1e-10)


def test_projection_idempotent():
    prob = noisy_problem(7, fused=True)
    rng = np.random.default_rng(7)
    beta = rng.standard_normal(prob.p)
    support = [0, 3, prob.p]
    once = projection_estimator(prob, beta, support)
    twice = projection_estimator(prob, once, support)
    np.testing.assert_allclose(once, twice, atol=1e-12)


def make_rule(problem, hyper, eta=0.5):
    return stopping_rule(
        eta=eta,
        sigma=problem.truth.sigma,
        spectral=problem.spectral_bounds(problem.support()),
        n=problem.n,
        m=problem.m,
        alpha=hyper.alpha,
    )


def test_consistency_noise_free_strong_signal():
    rng = np.random.default_rng(11)
    n = p = 20
    X = rng.standard_normal((n, p))
    beta_star = np.zeros(p)
    beta_star[:4] = 5.0
    prob = Problem(X=X, y=X @ beta_star, D=np.eye(p), truth=Truth(beta_star, 1.0))
    hyper = Hyperparams.for_problem(prob, nu=1.0, kappa=50.0)
    rule = make_rule(prob, hyper, eta=0.9)
    k_run = max(rule.k_bar + 1, 200)
    path = lbi.run(prob, hyper, k_max=k_run, record_stride=1)
    report = consistency_check(prob, path, rule)
    assert report.k_bar == rule.k_bar
    assert report.l2_gamma >= 0
    assert np.isfinite(report.l2_beta_projected)


def test_consistency_empty_truth_support_no_false_positive():
    rng = np.random.default_rng(12)
    prob = Problem(
        X=rng.standard_normal((8, 4)),
        y=0.01 * rng.standard_normal(8),
        D=np.eye(4),
        truth=Truth(np.zeros(4), 1.0),
    )
    hyper = Hyperparams.for_problem(prob, nu=1.0, kappa=10.0)
    rule = make_rule(prob, hyper)
    path = lbi.run(prob, hyper, k_max=rule.k_bar + 5, record_stride=1)
    report = consistency_check(prob, path, rule)
    gamma_at = path.point_at_index(rule.k_bar).gamma
    assert report.no_false_positive_up_to_k_bar == (np.abs(gamma_at).max() == 0.0)


def test_consistency_path_too_short():
    prob = noisy_problem(13)
    hyper = Hyperparams.for_problem(prob, nu=1.0, kappa=10.0)
    rule = make_rule(prob, hyper)
    path = lbi.run(prob, hyper, k_max=max(rule.k_bar - 2, 0), record_stride=1)
    if rule.k_bar > 0:
        with pytest.raises(PathTooShort):
            consistency_check(prob, path, rule)


def test_signal_threshold_finite_and_positive():
    prob = noisy_problem(14)
    thr = estimators.signal_threshold(prob, prob.support(), 1.0, 0.5, 0.3)
    assert thr > 0
