"""Complex Gaussian measures on Hilbert spaces, numerically.

Samplers and oracles for complex Gaussian random variables, Karhunen-Loeve
fields, complex Brownian motion, the Feynman-Kac semigroup and complex
fractional Gaussian fields, with Monte-Carlo verification utilities.
"""

from .crv import (GaussianSpec, InvalidSpecError, MomentSummary, ScalarField, cf_analytic,
                  estimate_moments, sample_gaussian)
from .feynkac import (GridFunction2D, Potential, fk_mc_estimate, gaussian_bump, heat_step,
                      spectral_expm_oracle, trotter_apply)
from .fgf import (TestFunctionRep, frac_laplacian_apply, ls_inner, pair, regularity_profile,
                  regularity_threshold, sample_fgf)
from .io import NaNDetectedError
from .klfield import (FieldSample, covariance_oracle, kl_sample, null_set_diagnostic,
                      trace_identity_check, truncation_tail)
from .realstruct import compose, conjugate, decompose, pt_norm, rotation_pair
from .rng import Stream
from .spectral import (Interval, Rectangle, SpectralBasis, SpectralOperator, dirichlet_basis,
                       op_frac_power, op_hs_norm, op_trace, parse_domain, weyl_ratio)
from .stats import (InsufficientDataError, MomentEstimate, cf_factorization_gap, cross_cov,
                    empirical_cf, mc_mean)
from .wiener import (PathSample, bm_cov_oracle, fdd_log_density, fernique_moment, kl_bm_sample,
                     sample_bm)

__version__ = "0.1.0"

__all__ = [
    "GaussianSpec", "InvalidSpecError", "MomentSummary", "ScalarField", "cf_analytic",
    "estimate_moments", "sample_gaussian",
    "GridFunction2D", "Potential", "fk_mc_estimate", "gaussian_bump", "heat_step",
    "spectral_expm_oracle", "trotter_apply",
    "TestFunctionRep", "frac_laplacian_apply", "ls_inner", "pair", "regularity_profile",
    "regularity_threshold", "sample_fgf",
    "NaNDetectedError",
    "FieldSample", "covariance_oracle", "kl_sample", "null_set_diagnostic",
    "trace_identity_check", "truncation_tail",
    "compose", "conjugate", "decompose", "pt_norm", "rotation_pair",
    "Stream",
    "Interval", "Rectangle", "SpectralBasis", "SpectralOperator", "dirichlet_basis",
    "op_frac_power", "op_hs_norm", "op_trace", "parse_domain", "weyl_ratio",
    "InsufficientDataError", "MomentEstimate", "cf_factorization_gap", "cross_cov",
    "empirical_cf", "mc_mean",
    "PathSample", "bm_cov_oracle", "fdd_log_density", "fernique_moment", "kl_bm_sample",
    "sample_bm",
]
