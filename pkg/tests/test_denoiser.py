import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lindiff import (
    Full,
    GaussianSpec,
    Isotropic,
    LinearDenoiser,
    ModelConfig,
    TrainingSet,
    add_noise,
    fit,
    generated_distribution,
    generator_init,
    make_rng,
    sample_clean,
    sample_generated,
)


def _noiseless_ts(n, d, T, seed, mu=0.0):
    cfg = ModelConfig(n=n, d=d, T=T, lambda_hat=0.0, mu=mu)
    clean = sample_clean(cfg, make_rng(seed))
    return add_noise(clean, T=T, lam=0.0, rng=make_rng(seed + 1))


# ------------------------------------------------------------------------ fit

def test_fit_noiseless_recovers_inverse_contraction():
    T = 1.0
    ts = _noiseless_ts(64, 8, T, seed=20)
    den = fit(ts)
    assert np.max(np.abs(den.theta1 - math.exp(T) * np.eye(8))) < 1e-6
    assert np.max(np.abs(den.theta0)) < 1e-6


def test_fit_one_dimensional_least_squares_by_hand():
    pts = np.array([[0.0], [1.0], [2.0]])
    den = fit(TrainingSet(clean=pts, noisy=pts))
    assert den.theta1[0, 0] == pytest.approx(1.0, abs=1e-12)
    assert den.theta0[0] == pytest.approx(0.0, abs=1e-12)


def test_fit_one_dimensional_ridge_by_hand():
    # centered sums Sxx = 2, Sxy = 2; sample-count-scaled ridge adds n * 1
    # to the Gram: slope = 2 / (2 + 3) = 0.4, intercept = 1 - 0.4 * 1 = 0.6.
    pts = np.array([[0.0], [1.0], [2.0]])
    den = fit(TrainingSet(clean=pts, noisy=pts), ridge_hat=1.0)
    assert den.theta1[0, 0] == pytest.approx(0.4, rel=1e-12)
    assert den.theta0[0] == pytest.approx(0.6, rel=1e-12)


def test_fit_rejects_degenerate_inputs():
    one = TrainingSet(clean=np.zeros((1, 2)), noisy=np.zeros((1, 2)))
    with pytest.raises(ValueError):
        fit(one)
    ts = TrainingSet(clean=np.zeros((3, 2)), noisy=np.zeros((3, 2)))
    with pytest.raises(ValueError):
        fit(ts, ridge_hat=-1e-9)


def test_fit_pseudo_inverse_limit_matches_small_ridge():
    ts = _noiseless_ts(40, 6, 0.5, seed=21)
    exact = fit(ts, ridge_hat=0.0)
    nearly = fit(ts, ridge_hat=1e-10)
    assert np.max(np.abs(exact.theta1 - nearly.theta1)) < 1e-5
    assert np.max(np.abs(exact.theta0 - nearly.theta0)) < 1e-5


def test_fit_wide_data_uses_minimum_norm_solution():
    # n <= d: infinitely many interpolators; the returned slope must be the
    # minimum-Frobenius-norm one, i.e. row space of the centered design.
    rng = make_rng(22)
    noisy = rng.standard_normal((5, 9))
    clean = rng.standard_normal((5, 9))
    den = fit(TrainingSet(clean=clean, noisy=noisy))
    xc = noisy - noisy.mean(axis=0)
    yc = clean - clean.mean(axis=0)
    # interpolates the centered data
    assert np.max(np.abs(xc @ den.theta1.T - yc)) < 1e-8
    # minimum-norm: slope rows lie in the span of the data rows
    _, _, vt = np.linalg.svd(xc, full_matrices=False)
    proj = den.theta1 @ vt.T @ vt
    assert np.max(np.abs(proj - den.theta1)) < 1e-8


@given(
    n=st.integers(4, 24),
    d=st.integers(1, 6),
    ridge=st.floats(1e-3, 10.0),
    seed=st.integers(0, 2**32 - 1),
)
@settings(max_examples=40, deadline=None)
def test_fit_ridge_satisfies_normal_equations(n, d, ridge, seed):
    rng = make_rng(seed)
    noisy = rng.standard_normal((n, d))
    clean = rng.standard_normal((n, d))
    den = fit(TrainingSet(clean=clean, noisy=noisy), ridge_hat=ridge)
    xc = noisy - noisy.mean(axis=0)
    yc = clean - clean.mean(axis=0)
    gram = xc.T @ xc + n * ridge * np.eye(d)
    lhs = gram @ den.theta1.T
    rhs = xc.T @ yc
    scale = max(np.max(np.abs(lhs)), np.max(np.abs(rhs)), 1.0)
    assert np.max(np.abs(lhs - rhs)) <= 1e-8 * scale


@given(shift=st.floats(-50.0, 50.0), seed=st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_generated_mean_is_affine_equivariant_in_data_shift(shift, seed):
    T = 0.7
    base = _noiseless_ts(30, 4, T, seed=seed % 10_000)
    shifted = add_noise(base.clean + shift, T=T, lam=0.0, rng=make_rng(0))
    den0, den1 = fit(base), fit(shifted)
    assert np.max(np.abs(den0.theta1 - den1.theta1)) < 1e-9 * max(1.0, abs(shift))
    g0 = generated_distribution(den0, generator_init(base, T))
    g1 = generated_distribution(den1, generator_init(shifted, T))
    assert np.max(np.abs(g1.mean - (g0.mean + shift))) < 1e-6 * max(1.0, abs(shift))


# -------------------------------------------------------------- generator_init

def test_generator_init_degenerate_clean_rows():
    ts = TrainingSet(clean=np.full((5, 3), 2.0), noisy=np.zeros((5, 3)), delta_t=0.25)
    init = generator_init(ts, T=1.0)
    assert init.sigma_X_sq == 0.25
    np.testing.assert_allclose(init.mu_X, math.exp(-1.0) * 2.0, rtol=1e-15)


def test_generator_init_time_zero_returns_raw_moments():
    rng = make_rng(23)
    clean = rng.standard_normal((40, 3)) + 1.0
    ts = TrainingSet(clean=clean, noisy=clean, delta_t=0.0)
    init = generator_init(ts, T=0.0)
    np.testing.assert_allclose(init.mu_X, clean.mean(axis=0), rtol=1e-12)
    scatter = np.sum((clean - clean.mean(axis=0)) ** 2) / clean.size
    assert init.sigma_X_sq == pytest.approx(scatter, rel=1e-12)


def test_generator_init_concentrates_at_scale():
    cfg = ModelConfig(n=10_000, d=64, T=2.0, lambda_hat=0.1, mu=10.0)
    clean = sample_clean(cfg, make_rng(24))
    ts = add_noise(clean, T=2.0, lam=cfg.noise_scale(), rng=make_rng(25))
    init = generator_init(ts, T=2.0)
    expect = math.exp(-4.0) + cfg.delta_t()
    assert abs(init.sigma_X_sq - expect) / expect < 0.05


# ------------------------------------------------------ generated_distribution

def test_generated_distribution_isotropic_slope():
    d, T, sxx = 4, 1.0, 0.3
    den = LinearDenoiser(theta0=np.zeros(d), theta1=math.exp(T) * np.eye(d))
    from lindiff import GeneratorInit

    init = GeneratorInit(mu_X=np.full(d, 0.5), sigma_X_sq=sxx)
    g = generated_distribution(den, init)
    np.testing.assert_allclose(g.mean, math.exp(T) * 0.5, rtol=1e-12)
    np.testing.assert_allclose(g.dense_cov(), sxx * math.exp(2 * T) * np.eye(d), rtol=1e-12)


def test_generated_distribution_zero_slope_is_point_mass():
    from lindiff import GeneratorInit

    den = LinearDenoiser(theta0=np.array([1.0, 2.0]), theta1=np.zeros((2, 2)))
    g = generated_distribution(den, GeneratorInit(mu_X=np.zeros(2), sigma_X_sq=1.0))
    np.testing.assert_array_equal(g.mean, [1.0, 2.0])
    np.testing.assert_array_equal(g.dense_cov(), np.zeros((2, 2)))


def test_generated_distribution_noiseless_end_to_end():
    T = 1.2
    ts = _noiseless_ts(200, 6, T, seed=26, mu=3.0)
    den = fit(ts)
    g = generated_distribution(den, generator_init(ts, T))
    np.testing.assert_allclose(g.mean, ts.clean.mean(axis=0), atol=1e-6)
    scatter = np.sum((ts.clean - ts.clean.mean(axis=0)) ** 2) / ts.clean.size
    np.testing.assert_allclose(g.dense_cov(), scatter * np.eye(6), atol=1e-6)


# ------------------------------------------------------------ sample_generated

def test_sample_generated_isotropic_moments():
    g = GaussianSpec(mean=np.array([5.0]), covariance=Isotropic(4.0))
    draws = sample_generated(g, 10**6, make_rng(27))
    assert abs(draws.var(ddof=1) - 4.0) / 4.0 < 0.01
    assert abs(draws.mean() - 5.0) < 4 * math.sqrt(4.0 / 10**6)


def test_sample_generated_full_covariance_moments():
    a = np.array([[2.0, 1.0], [0.0, 1.0]])
    cov = a @ a.T
    g = GaussianSpec(mean=np.zeros(2), covariance=Full(cov))
    draws = sample_generated(g, 200_000, make_rng(28))
    emp = np.cov(draws.T)
    assert np.max(np.abs(emp - cov)) < 0.05


def test_sample_generated_reproducible():
    g = GaussianSpec(mean=np.zeros(3), covariance=Full(np.eye(3)))
    a = sample_generated(g, 100, make_rng(29))
    b = sample_generated(g, 100, make_rng(29))
    assert a.tobytes() == b.tobytes()


def test_sample_generated_rejects_eigenvalues_below_clamp():
    # accepted by the covariance validator (within its looser tolerance) but
    # beyond what sampling silently clips
    g = GaussianSpec(mean=np.zeros(2), covariance=Full(np.diag([1.0, -5e-9])))
    with pytest.raises(ValueError):
        sample_generated(g, 10, make_rng(30))


def test_sample_generated_rejects_nonpositive_count():
    g = GaussianSpec(mean=np.zeros(1), covariance=Isotropic(1.0))
    with pytest.raises(ValueError):
        sample_generated(g, 0, make_rng(0))


def test_linear_denoiser_validates_shapes_and_finiteness():
    with pytest.raises(ValueError):
        LinearDenoiser(theta0=np.zeros(2), theta1=np.zeros((3, 3)))
    with pytest.raises(ValueError):
        LinearDenoiser(theta0=np.array([np.nan]), theta1=np.zeros((1, 1)))
    den = LinearDenoiser(theta0=np.array([1.0]), theta1=np.array([[2.0]]))
    np.testing.assert_array_equal(den.apply(np.array([[3.0]])), [[7.0]])
