"""Centered Metropolis-Hastings independence sampler with rate certificates."""

from ._core import (
    Error,
    Kernel,
    Model,
    ModeResult,
    asymptotic_curve,
    atom_mass,
    centered_mhi,
    coupling_profile,
    epsilon_lower_bound_glm,
    epsilon_quadrature,
    estimate_acceptance,
    estimate_epsilon_mc,
    exact_rate_series,
    find_mode,
    generate,
    lambda_max_gram,
    mean_rho_quadrature,
    run_chain,
    run_cli,
    verify_dominance,
    wasserstein_lower_bound,
)

__all__ = [
    "Error",
    "Kernel",
    "Model",
    "ModeResult",
    "asymptotic_curve",
    "atom_mass",
    "centered_mhi",
    "coupling_profile",
    "epsilon_lower_bound_glm",
    "epsilon_quadrature",
    "estimate_acceptance",
    "estimate_epsilon_mc",
    "exact_rate_series",
    "find_mode",
    "generate",
    "lambda_max_gram",
    "mean_rho_quadrature",
    "run_chain",
    "run_cli",
    "verify_dominance",
    "wasserstein_lower_bound",
]
