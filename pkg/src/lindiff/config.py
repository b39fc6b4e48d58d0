"""Experiment configuration for the single-step noising/denoising model."""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["ModelConfig"]


@dataclass(frozen=True)
class ModelConfig:
    """Parameters of one noising/denoising experiment.

    The clean data are n i.i.d. draws from N(mu * 1_d, sigma^2 I_d); noising
    runs the mean-reverting forward process to time T with dimensionless
    noise scale lambda_hat. All derived quantities (alpha, the absolute noise
    scale, the injected noise variance delta_t, and the marginal variance of
    the noised data) are computed on demand and never stored, so they cannot
    drift out of sync.
    """

    n: int  # training samples
    d: int  # data dimension
    T: float = 1.0  # diffusion time cut-off, >= 0
    lambda_hat: float = 0.0  # dimensionless noise scale, >= 0
    sigma: float = 1.0  # clean-data std, > 0
    mu: float = 0.0  # per-coordinate clean-data mean
    ridge_hat: float = 0.0  # scalar ridge, >= 0
    seed: int = 0  # 64-bit unsigned seed

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if self.T < 0:
            raise ValueError(f"T must be >= 0, got {self.T}")
        if self.lambda_hat < 0:
            raise ValueError(f"lambda_hat must be >= 0, got {self.lambda_hat}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if self.ridge_hat < 0:
            raise ValueError(f"ridge_hat must be >= 0, got {self.ridge_hat}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed}")

    def alpha(self) -> float:
        """Aspect ratio d/n."""
        return self.d / self.n

    def noise_scale(self) -> float:
        """Absolute noise scale: lambda_hat * sigma^2 * exp(-2T)."""
        return self.lambda_hat * self.sigma**2 * math.exp(-2.0 * self.T)

    def delta_t(self) -> float:
        """Variance injected by the forward process up to time T."""
        return self.noise_scale() * (1.0 - math.exp(-2.0 * self.T))

    def sigma_x_sq(self) -> float:
        """Per-coordinate marginal variance of the noised data."""
        return math.exp(-2.0 * self.T) * self.sigma**2 + self.delta_t()
