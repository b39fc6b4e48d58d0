"""Multi-step noising chains with stacked per-step affine denoisers.

The forward chain applies
    x_t = sqrt(1 - beta_t) x_{t-1} + sqrt(lam * beta_t) z_t,
with the exponential schedule beta_t = 1 - exp(-2 beta t / s), whose survival
product telescopes exactly: prod_t (1 - beta_t) = exp(-beta (s + 1)). One
affine denoiser is fitted per step on (x_t -> x_{t-1}) pairs from a shared
trajectory; the reverse pass starts from the fitted Gaussian moments of x_s
and walks the denoisers back down.

By default the reverse pass is ancestral: each step adds Gaussian noise at
the step's fitted residual variance, so the generated law preserves the
variance that the per-step fits could not explain. With stochastic=False the
fitted affine maps are composed deterministically instead; that mode
reproduces the single-step generator exactly at s = 1 but contracts the
generated cloud multiplicatively as s grows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .denoiser import LinearDenoiser, fit
from .metrics import e_og
from .model import GaussianSpec, Isotropic, TrainingSet
from .rng import derive_seed, make_rng

__all__ = [
    "ChainConfig",
    "ChainModel",
    "beta_schedule",
    "gmm_sample",
    "forward_trajectory",
    "fit_chain",
    "generate_chain",
    "predicted_step_scaling",
    "chain_eog_trial",
]


@dataclass(frozen=True)
class ChainConfig:
    """Parameters of one multi-step chain experiment on mixture data."""

    steps: int  # number of forward/reverse steps s
    beta: float  # schedule scale, > 0
    lam: float  # absolute noise scale, >= 0
    components: int  # mixture components C
    n: int  # training samples
    d: int  # data dimension
    mu0: float = 0.5  # mixture center
    spacing: float = 1.0  # distance between adjacent component means
    comp_sigma: float = 0.1  # within-component std
    seed: int = 0

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.beta <= 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if self.components < 1:
            raise ValueError(f"components must be >= 1, got {self.components}")
        if self.n < 2 or self.d < 1:
            raise ValueError("need n >= 2 and d >= 1")
        if self.spacing <= 0 or self.comp_sigma <= 0:
            raise ValueError("spacing and comp_sigma must be > 0")

    def component_means(self) -> np.ndarray:
        """Per-coordinate component means, centered on mu0."""
        idx = np.arange(self.components, dtype=float)
        return self.mu0 + (idx - (self.components - 1) / 2.0) * self.spacing


@dataclass(frozen=True)
class ChainModel:
    """Per-step denoisers (order t = s down to 1) plus the terminal law of x_s."""

    denoisers: Sequence[LinearDenoiser]
    terminal: GaussianSpec
    step_noise: Sequence[float]  # fitted residual variance per step, same order

    def __post_init__(self) -> None:
        if len(self.denoisers) != len(self.step_noise):
            raise ValueError("one residual variance per denoiser required")
        if len(self.denoisers) < 1:
            raise ValueError("chain must contain at least one denoiser")


def beta_schedule(t: int, s: int, beta: float) -> float:
    """Noise fraction at step t of s: beta_t = 1 - exp(-2 beta t / s)."""
    if not 0 <= t <= s:
        raise ValueError(f"t must be in 0..{s}, got {t}")
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    return 1.0 - math.exp(-2.0 * beta * t / s)


def gmm_sample(config: ChainConfig, rng: np.random.Generator) -> np.ndarray:
    """n rows from the equal-weight Gaussian mixture with isotropic components."""
    means = config.component_means()
    comp = rng.integers(0, config.components, size=config.n)
    return (
        means[comp][:, None]
        + config.comp_sigma * rng.standard_normal((config.n, config.d))
    )


def forward_trajectory(
    x0: np.ndarray, config: ChainConfig, rng: np.random.Generator
) -> list[np.ndarray]:
    """All intermediate states x_0 .. x_s of the forward chain."""
    x0 = np.asarray(x0, dtype=float)
    traj = [x0]
    for t in range(1, config.steps + 1):
        bt = beta_schedule(t, config.steps, config.beta)
        x = math.sqrt(1.0 - bt) * traj[-1]
        if config.lam > 0:
            x = x + math.sqrt(config.lam * bt) * rng.standard_normal(x0.shape)
        traj.append(x)
    return traj


def fit_chain(trajectory: Sequence[np.ndarray], ridge_hat: float = 0.0) -> ChainModel:
    """Fit one affine denoiser per step, walking t = s down to 1."""
    if len(trajectory) < 2:
        raise ValueError("trajectory must contain at least x_0 and x_1")
    denoisers: list[LinearDenoiser] = []
    step_noise: list[float] = []
    for t in range(len(trajectory) - 1, 0, -1):
        ts = TrainingSet(clean=trajectory[t - 1], noisy=trajectory[t])
        den = fit(ts, ridge_hat)
        denoisers.append(den)
        resid = ts.clean - den.apply(ts.noisy)
        step_noise.append(float(np.sum(resid**2)) / resid.size)
    x_s = trajectory[-1]
    variance = float(np.mean(x_s.var(axis=0, ddof=1)))
    terminal = GaussianSpec(mean=x_s.mean(axis=0), covariance=Isotropic(variance))
    return ChainModel(denoisers=denoisers, terminal=terminal, step_noise=step_noise)


def generate_chain(
    model: ChainModel,
    m: int,
    rng: np.random.Generator,
    stochastic: bool = True,
    x_init: np.ndarray | None = None,
) -> np.ndarray:
    """Run the reverse pass: draw x_s from the terminal law, denoise down to x_0.

    stochastic=True (ancestral) adds Gaussian noise at each step's fitted
    residual variance; stochastic=False composes the affine maps only.
    x_init substitutes a caller-supplied x_s draw (rows of shape (m, d)) for
    the terminal sample — used for paired comparisons across step counts.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    d = model.terminal.dim
    if x_init is not None:
        x = np.asarray(x_init, dtype=float)
        if x.shape != (m, d):
            raise ValueError(f"x_init must have shape ({m}, {d})")
    else:
        cov = model.terminal.covariance
        assert isinstance(cov, Isotropic)
        x = model.terminal.mean + math.sqrt(cov.variance) * rng.standard_normal((m, d))
    for den, resid_var in zip(model.denoisers, model.step_noise):
        x = den.apply(x)
        if stochastic and resid_var > 0:
            x = x + math.sqrt(resid_var) * rng.standard_normal(x.shape)
    return x


def predicted_step_scaling(t: int, s: int, lam: float, beta: float) -> float:
    """Leading per-step variance error scale lam^2 * beta_t^2 (exact schedule)."""
    if lam < 0:
        raise ValueError(f"lam must be >= 0, got {lam}")
    bt = beta_schedule(t, s, beta)
    return lam * lam * bt * bt


def chain_eog_trial(
    config: ChainConfig,
    eval_size: int = 2000,
    repeats: int = 1,
    ridge_hat: float = 0.0,
) -> float:
    """One seed's set distance between generated samples and a held-out draw.

    Substreams are derived from config.seed so that the training draw, the
    held-out draw, and the terminal standard-normal variates are shared across
    step counts (paired comparison), while the trajectory and ancestral noise
    get their own per-step-count streams. With repeats > 1 the distance is
    averaged over that many generation repeats to reduce generation noise.
    """
    if eval_size < 2:
        raise ValueError(f"eval_size must be >= 2, got {eval_size}")
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    r_train = make_rng(derive_seed(config.seed, 0))
    r_hold = make_rng(derive_seed(config.seed, 1))
    r_init = make_rng(derive_seed(config.seed, 2))
    x0 = gmm_sample(config, r_train)
    holdout = gmm_sample(replace(config, n=eval_size), r_hold)
    inits = [r_init.standard_normal((eval_size, config.d)) for _ in range(repeats)]

    r_traj = make_rng(derive_seed(config.seed, 3, config.steps))
    trajectory = forward_trajectory(x0, config, r_traj)
    model = fit_chain(trajectory, ridge_hat)

    cov = model.terminal.covariance
    assert isinstance(cov, Isotropic)
    scale = math.sqrt(cov.variance)
    r_gen = make_rng(derive_seed(config.seed, 4, config.steps))
    values = []
    for xi in inits:
        x_s = model.terminal.mean + scale * xi
        generated = generate_chain(model, eval_size, r_gen, x_init=x_s)
        values.append(e_og(holdout, generated))
    return float(np.mean(values))
