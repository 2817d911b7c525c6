"""Equilibrium engine and simulator for insider trading across a continuum of claims.

A single informed trader holds one of I signals about the terminal state of a
market with a density of state-contingent claims.  The package solves the
resulting pricing equilibrium (a scalar fixed point for exchangeable payoff
families), simulates the aggregate order flow, and measures cross-asset price
impact, information efficiency, and the option-strip structure of the
equilibrium demand.
"""

from ._rng import derive_seed
from .model import (
    FAMILY_KINDS,
    NoiseProfile,
    PayoffFamily,
    StateGrid,
    build_state_grid,
    make_payoff_family,
    prior_mixture,
    weighted_inner_product,
)
from .kernel import (
    CanonicalKernel,
    build_canonical_kernel,
    centering_matrix,
    exchangeability_scale,
    gram_matrix,
    sqrt_and_pinv,
)
from .posterior import (
    MomentEstimates,
    PosteriorSample,
    binary_moments_quadrature,
    moments_from_noise,
    posterior_moments,
    sample_posterior,
    softmax,
)
from .equilibrium import (
    Equilibrium,
    KyleBenchmark,
    equilibrium_demand,
    kyle_single_asset,
    phi,
    phi_from_noise,
    solve_alpha_star,
)
from .orderflow import (
    Path,
    PathPosterior,
    pathwise_posterior,
    pi_insider,
    pi_mm,
    price_schedule,
    simulate_order_flow,
    young_integral,
)
from .objective import FocReport, expected_utility, foc_terms, zero_impact_basis
from .analytics import (
    EfficiencyRow,
    ImpactEstimate,
    InvarianceReport,
    cross_price_impact,
    derivative_cross_impact,
    efficiency_sweep,
    identity_kernel,
    impact_surface,
    information_efficiency,
    invariance_experiment,
)
from .options import OptionStrip, bl_decompose, bl_reconstruct, demand_signature
from .config import RunConfig, load_config

__version__ = "0.1.0"

__all__ = [
    "FAMILY_KINDS",
    "NoiseProfile",
    "PayoffFamily",
    "StateGrid",
    "build_state_grid",
    "make_payoff_family",
    "prior_mixture",
    "weighted_inner_product",
    "CanonicalKernel",
    "build_canonical_kernel",
    "centering_matrix",
    "exchangeability_scale",
    "gram_matrix",
    "sqrt_and_pinv",
    "MomentEstimates",
    "PosteriorSample",
    "binary_moments_quadrature",
    "moments_from_noise",
    "posterior_moments",
    "sample_posterior",
    "softmax",
    "Equilibrium",
    "KyleBenchmark",
    "equilibrium_demand",
    "kyle_single_asset",
    "phi",
    "phi_from_noise",
    "solve_alpha_star",
    "Path",
    "PathPosterior",
    "pathwise_posterior",
    "pi_insider",
    "pi_mm",
    "price_schedule",
    "simulate_order_flow",
    "young_integral",
    "FocReport",
    "expected_utility",
    "foc_terms",
    "zero_impact_basis",
    "EfficiencyRow",
    "ImpactEstimate",
    "InvarianceReport",
    "cross_price_impact",
    "derivative_cross_impact",
    "efficiency_sweep",
    "identity_kernel",
    "impact_surface",
    "information_efficiency",
    "invariance_experiment",
    "OptionStrip",
    "bl_decompose",
    "bl_reconstruct",
    "demand_signature",
    "RunConfig",
    "load_config",
    "derive_seed",
    "__version__",
]
