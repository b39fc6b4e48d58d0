"""Numerical laboratory for affine denoisers of noised Gaussian data.

Fit a linear denoiser on forward-noised samples, push a Gaussian through it,
and measure how far the generated law sits from the sampling law — next to
closed-form high-dimensional predictions for the same quantity, a Monte Carlo
Wishart oracle that validates them, and a multi-step chain variant on mixture
data.
"""
from .chain import (
    ChainConfig,
    ChainModel,
    beta_schedule,
    chain_eog_trial,
    fit_chain,
    forward_trajectory,
    generate_chain,
    gmm_sample,
    predicted_step_scaling,
)
from .config import ModelConfig
from .denoiser import (
    GeneratorInit,
    LinearDenoiser,
    fit,
    generated_distribution,
    generator_init,
    sample_generated,
)
from .harness import (
    ChainRow,
    ResultRow,
    SweepSpec,
    csv_text,
    run_sweep,
    run_trial,
    write_csv,
)
from .metrics import KLReport, e_og, gaussian_kl, kl_decompose
from .model import (
    Diagonal,
    Full,
    GaussianSpec,
    Isotropic,
    TrainingSet,
    add_noise,
    ou_marginal_density,
    sample_clean,
)
from .rng import derive_seed, make_rng, worker_count
from .theory import (
    ALPHA_POLE_WIDTH,
    Branch,
    RidgePair,
    TheoryKL,
    b_a,
    c_ab,
    df1_isotropic,
    df_n,
    kl_var_ridgeless,
    kl_var_theory,
    mc_wishart_oracle,
    solve_renormalized_ridge,
    trace_sigma_theta1,
    trace_sigma_theta1_sq,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHA_POLE_WIDTH",
    "Branch",
    "ChainConfig",
    "ChainModel",
    "ChainRow",
    "Diagonal",
    "Full",
    "GaussianSpec",
    "GeneratorInit",
    "Isotropic",
    "KLReport",
    "LinearDenoiser",
    "ModelConfig",
    "ResultRow",
    "RidgePair",
    "SweepSpec",
    "TheoryKL",
    "TrainingSet",
    "add_noise",
    "b_a",
    "beta_schedule",
    "c_ab",
    "chain_eog_trial",
    "csv_text",
    "derive_seed",
    "df1_isotropic",
    "df_n",
    "e_og",
    "fit",
    "fit_chain",
    "forward_trajectory",
    "gaussian_kl",
    "generate_chain",
    "generated_distribution",
    "generator_init",
    "gmm_sample",
    "kl_decompose",
    "kl_var_ridgeless",
    "kl_var_theory",
    "make_rng",
    "mc_wishart_oracle",
    "ou_marginal_density",
    "predicted_step_scaling",
    "run_sweep",
    "run_trial",
    "sample_clean",
    "sample_generated",
    "solve_renormalized_ridge",
    "trace_sigma_theta1",
    "trace_sigma_theta1_sq",
    "worker_count",
    "write_csv",
]
