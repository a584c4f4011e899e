"""Relaxed categorical distributions and closed-form KL divergence bounds."""

__version__ = "0.1.0"

from .core import (
    GumbelVector,
    RelaxedCategorical,
    SimplexPoint,
    log_density,
    log_density_batch,
    reparameterize,
    reparameterize_batch,
    sample,
    sample_standard_gumbel,
    standard_gumbel_matrix,
)
from .divergence import (
    CA,
    MC,
    RECAB,
    RECAB_LOWER,
    DivergenceEstimate,
    gaussian_kld,
    kld_categorical_approx,
    kld_monte_carlo,
    recab,
    recab_constant_term,
    recab_gap,
    recab_grad_posterior_log_logits,
    recab_lower_bound,
    temperature_ratio,
)
from .fitting import (
    DiagonalGaussian,
    FitConfig,
    FitDivergenceError,
    FitResult,
    fit_posterior,
    joint_objective,
)
from .grids import HeatmapGrid, density_grid, heatmap_sweep, simplex_grid
from .priors import (
    DEFAULT_EPSILON,
    OneHotCode,
    discriminative_logits,
    make_discriminative_prior,
)
from .special import EULER_GAMMA, digamma_positive_integer, harmonic, log_gamma

__all__ = [
    "CA",
    "DEFAULT_EPSILON",
    "DiagonalGaussian",
    "DivergenceEstimate",
    "EULER_GAMMA",
    "FitConfig",
    "FitDivergenceError",
    "FitResult",
    "GumbelVector",
    "HeatmapGrid",
    "MC",
    "OneHotCode",
    "RECAB",
    "RECAB_LOWER",
    "RelaxedCategorical",
    "SimplexPoint",
    "density_grid",
    "digamma_positive_integer",
    "discriminative_logits",
    "fit_posterior",
    "gaussian_kld",
    "harmonic",
    "heatmap_sweep",
    "joint_objective",
    "kld_categorical_approx",
    "kld_monte_carlo",
    "log_density",
    "log_density_batch",
    "log_gamma",
    "make_discriminative_prior",
    "recab",
    "recab_constant_term",
    "recab_gap",
    "recab_grad_posterior_log_logits",
    "recab_lower_bound",
    "reparameterize",
    "reparameterize_batch",
    "sample",
    "sample_standard_gumbel",
    "simplex_grid",
    "standard_gumbel_matrix",
    "temperature_ratio",
]
