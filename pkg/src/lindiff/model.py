"""Data types, clean-data sampling, forward noising, and exact forward marginals.

The forward process is the mean-reverting (Ornstein-Uhlenbeck) map
    noisy = exp(-T) * clean + sqrt(delta_T) * z,    z ~ N(0, I),
with delta_T = lam * (1 - exp(-2T)) for an absolute noise scale lam, so the
stationary law at lam=1 is the standard Gaussian.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import logsumexp

from .config import ModelConfig

__all__ = [
    "Isotropic",
    "Diagonal",
    "Full",
    "Covariance",
    "GaussianSpec",
    "TrainingSet",
    "sample_clean",
    "add_noise",
    "ou_marginal_density",
]

# Relative tolerance for accepting a nominally PSD matrix whose smallest
# eigenvalue dips below zero through round-off.
_PSD_RTOL = 1e-8


@dataclass(frozen=True)
class Isotropic:
    variance: float

    def __post_init__(self) -> None:
        if self.variance < 0:
            raise ValueError(f"variance must be >= 0, got {self.variance}")

    def dense(self, d: int) -> np.ndarray:
        return self.variance * np.eye(d)


@dataclass(frozen=True)
class Diagonal:
    variances: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.variances, dtype=float)
        if v.ndim != 1:
            raise ValueError("variances must be a 1-d vector")
        if np.any(v < 0):
            raise ValueError("variances must be >= 0")
        object.__setattr__(self, "variances", v)

    def dense(self, d: int) -> np.ndarray:
        if self.variances.shape != (d,):
            raise ValueError("variance vector length does not match dimension")
        return np.diag(self.variances)


@dataclass(frozen=True)
class Full:
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("covariance matrix must be square")
        scale = float(np.max(np.abs(m))) if m.size else 0.0
        if scale > 0 and float(np.max(np.abs(m - m.T))) > _PSD_RTOL * scale:
            raise ValueError("covariance matrix is not symmetric")
        w = np.linalg.eigvalsh((m + m.T) / 2.0)
        floor = -_PSD_RTOL * max(float(np.max(np.abs(w))), np.finfo(float).tiny)
        if w.size and float(w.min()) < floor:
            raise ValueError(
                f"covariance matrix is not PSD (min eigenvalue {w.min():.3e})"
            )
        object.__setattr__(self, "matrix", m)

    def dense(self, d: int) -> np.ndarray:
        if self.matrix.shape != (d, d):
            raise ValueError("covariance shape does not match dimension")
        return self.matrix


Covariance = Union[Isotropic, Diagonal, Full]


@dataclass(frozen=True)
class GaussianSpec:
    """A Gaussian law N(mean, covariance) with a structured covariance tag."""

    mean: np.ndarray
    covariance: Covariance

    def __post_init__(self) -> None:
        m = np.asarray(self.mean, dtype=float)
        if m.ndim != 1:
            raise ValueError("mean must be a 1-d vector")
        object.__setattr__(self, "mean", m)
        self.covariance.dense(self.dim)  # shape consistency check

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def dense_cov(self) -> np.ndarray:
        return self.covariance.dense(self.dim)


@dataclass(frozen=True)
class TrainingSet:
    """Paired clean/noisy samples, rows = samples."""

    clean: np.ndarray
    noisy: np.ndarray
    delta_t: float = field(default=0.0)

    def __post_init__(self) -> None:
        c = np.asarray(self.clean, dtype=float)
        x = np.asarray(self.noisy, dtype=float)
        if c.shape != x.shape or c.ndim != 2:
            raise ValueError("clean and noisy must be equal-shape n x d matrices")
        if self.delta_t < 0:
            raise ValueError(f"delta_t must be >= 0, got {self.delta_t}")
        object.__setattr__(self, "clean", c)
        object.__setattr__(self, "noisy", x)

    @property
    def n(self) -> int:
        return self.clean.shape[0]

    @property
    def d(self) -> int:
        return self.clean.shape[1]


def sample_clean(config: ModelConfig, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. rows from N(mu * 1_d, sigma^2 I_d)."""
    return config.mu + config.sigma * rng.standard_normal((config.n, config.d))


def add_noise(
    clean: np.ndarray, T: float, lam: float, rng: np.random.Generator
) -> TrainingSet:
    """Run the forward process to time T at absolute noise scale lam."""
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")
    if lam < 0:
        raise ValueError(f"lam must be >= 0, got {lam}")
    clean = np.asarray(clean, dtype=float)
    delta_t = lam * (1.0 - math.exp(-2.0 * T))
    noisy = math.exp(-T) * clean
    if delta_t > 0:
        noisy = noisy + math.sqrt(delta_t) * rng.standard_normal(clean.shape)
    return TrainingSet(clean=clean, noisy=noisy, delta_t=delta_t)


def ou_marginal_density(points: np.ndarray, t: float, x: np.ndarray) -> float:
    """Density at x of the forward-process marginal started from an empirical set.

    Equal-weight mixture of N(x | p * exp(-t), (1 - exp(-2t)) I_d) over the
    rows p of `points`, at unit stationary variance. Requires t > 0: at t = 0
    the marginal is a sum of point masses, not a density.
    """
    if t <= 0:
        raise ValueError(f"t must be > 0, got {t}")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x = np.asarray(x, dtype=float)
    m, d = pts.shape
    if x.shape != (d,):
        raise ValueError(f"x must be a vector of length {d}")
    v = 1.0 - math.exp(-2.0 * t)
    sq = np.sum((x - math.exp(-t) * pts) ** 2, axis=1)
    log_terms = -0.5 * sq / v - 0.5 * d * math.log(2.0 * math.pi * v)
    return float(math.exp(logsumexp(log_terms) - math.log(m)))
