"""Affine denoiser fit by (ridge) least squares, and the induced generator.

The denoiser maps a noisy vector x to theta0 + theta1 @ x. Fitting centers
both sides, so the slope solves the centered normal equations
    (x^T x + n * ridge_hat * I) theta1^T = x^T y
with the ridge scaled by the sample count; ridge_hat = 0 with a singular Gram
matrix falls back to the minimum-norm least-squares solution, the continuous
ridge_hat -> 0+ limit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Full, GaussianSpec, Isotropic, TrainingSet

__all__ = [
    "LinearDenoiser",
    "GeneratorInit",
    "fit",
    "generator_init",
    "generated_distribution",
    "sample_generated",
]

# Relative clamp for slightly negative covariance eigenvalues from round-off.
_EIG_CLAMP_RTOL = 1e-10


@dataclass(frozen=True)
class LinearDenoiser:
    """Affine map x -> theta0 + theta1 @ x (column-vector convention)."""

    theta0: np.ndarray  # (d,)
    theta1: np.ndarray  # (d, d)

    def __post_init__(self) -> None:
        t0 = np.asarray(self.theta0, dtype=float)
        t1 = np.asarray(self.theta1, dtype=float)
        if t0.ndim != 1 or t1.shape != (t0.shape[0], t0.shape[0]):
            raise ValueError("theta0 must be (d,) and theta1 (d, d)")
        if not (np.all(np.isfinite(t0)) and np.all(np.isfinite(t1))):
            raise ValueError("denoiser coefficients must be finite")
        object.__setattr__(self, "theta0", t0)
        object.__setattr__(self, "theta1", t1)

    def apply(self, rows: np.ndarray) -> np.ndarray:
        """Apply the map to samples stored as rows."""
        return self.theta0 + rows @ self.theta1.T


@dataclass(frozen=True)
class GeneratorInit:
    """Moments of the Gaussian fed through the denoiser at generation time."""

    mu_X: np.ndarray
    sigma_X_sq: float

    def __post_init__(self) -> None:
        m = np.asarray(self.mu_X, dtype=float)
        if m.ndim != 1:
            raise ValueError("mu_X must be a 1-d vector")
        if self.sigma_X_sq < 0:
            raise ValueError(f"sigma_X_sq must be >= 0, got {self.sigma_X_sq}")
        object.__setattr__(self, "mu_X", m)


def fit(ts: TrainingSet, ridge_hat: float = 0.0) -> LinearDenoiser:
    """Least-squares affine regression of clean rows on noisy rows."""
    if ts.n < 2:
        raise ValueError("need n >= 2 samples to center the regression")
    if ridge_hat < 0:
        raise ValueError(f"ridge_hat must be >= 0, got {ridge_hat}")
    x_mean = ts.noisy.mean(axis=0)
    y_mean = ts.clean.mean(axis=0)
    xc = ts.noisy - x_mean
    yc = ts.clean - y_mean
    if ridge_hat > 0:
        gram = xc.T @ xc + ts.n * ridge_hat * np.eye(ts.d)
        slope = np.linalg.solve(gram, xc.T @ yc)  # (d, d), y_row = x_row @ slope
    else:
        rcond = max(ts.n, ts.d) * np.finfo(float).eps
        slope, *_ = np.linalg.lstsq(xc, yc, rcond=rcond)
    theta1 = slope.T
    theta0 = y_mean - theta1 @ x_mean
    return LinearDenoiser(theta0=theta0, theta1=theta1)


def generator_init(ts: TrainingSet, T: float) -> GeneratorInit:
    """Empirical initialization moments estimated from the training set."""
    y_mean = ts.clean.mean(axis=0)
    scatter = float(np.sum((ts.clean - y_mean) ** 2)) / (ts.n * ts.d)
    return GeneratorInit(
        mu_X=math.exp(-T) * y_mean,
        sigma_X_sq=math.exp(-2.0 * T) * scatter + ts.delta_t,
    )


def generated_distribution(
    den: LinearDenoiser, init: GeneratorInit
) -> GaussianSpec:
    """Gaussian law of the denoiser output on N(mu_X, sigma_X_sq I) inputs."""
    mean = den.theta0 + den.theta1 @ init.mu_X
    cov = init.sigma_X_sq * (den.theta1.T @ den.theta1)
    cov = (cov + cov.T) / 2.0  # suppress round-off asymmetry
    return GaussianSpec(mean=mean, covariance=Full(cov))


def sample_generated(
    g: GaussianSpec, m: int, rng: np.random.Generator
) -> np.ndarray:
    """m i.i.d. draws from g, rows = samples."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    d = g.dim
    cov = g.covariance
    if isinstance(cov, Isotropic):
        return g.mean + math.sqrt(cov.variance) * rng.standard_normal((m, d))
    w, vecs = np.linalg.eigh(g.dense_cov())
    scale = max(float(w.max()), 0.0) if w.size else 0.0
    floor = -_EIG_CLAMP_RTOL * max(scale, np.finfo(float).tiny)
    if float(w.min()) < floor:
        raise ValueError(
            f"covariance has eigenvalue {w.min():.3e} below the clamp threshold"
        )
    w = np.clip(w, 0.0, None)
    return g.mean + rng.standard_normal((m, d)) * np.sqrt(w) @ vecs.T
