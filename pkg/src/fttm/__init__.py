"""Sieve maximum likelihood for monotone time-transformation survival models.

The package fits right-censored survival models of the form

    H(T) = -(scalar effects + integrated functional effect) + error,

where ``H`` is an unknown increasing transformation estimated by a
Bernstein polynomial sieve, the functional covariate enters through an
unknown coefficient curve expanded in the same type of basis, and the
error distribution is fixed and known up to a family parameter chosen by
model selection.  Proportional hazards, proportional odds, and
accelerated-failure-time behaviour are all special cases.
"""

from .basis import (
    bernstein_matrix,
    bernstein_vector,
    functional_design,
    transform_deriv,
    transform_value,
    trapezoid_weights,
)
from .concordance import c_index, cv_c_index
from .data import Finding, SurvivalDataset, default_tau, validate
from .errors import ErrorFamily, box_cox, logarithmic
from .gof import StepFunction, gof_curve, nelson_aalen
from .inference import (
    CovarianceEstimate,
    estimate_covariance,
    functional_band,
    observed_information,
    transformation_band,
    wald_intervals,
)
from .likelihood import build_workspace, gradient, log_likelihood
from .optimize import FitError, FitOptions, FttmFit, fit, initialize
from .params import (
    FttmSpec,
    RawParams,
    eta_from_gamma,
    gamma_from_eta,
    increment_jacobian,
)
from .predict import (
    HorizonError,
    expected_survival,
    h_inverse,
    linear_predictor_at,
    pseudo_residuals,
    survival_at,
)
from .select import DEFAULT_R_GRID, GridCell, GridSearchError, grid_search
from .simulate import (
    MonteCarloReport,
    ScenarioConfig,
    ScenarioTruth,
    curve_basis,
    generate,
    monte_carlo,
)

__version__ = "0.1.0"

__all__ = [
    "CovarianceEstimate",
    "DEFAULT_R_GRID",
    "ErrorFamily",
    "Finding",
    "FitError",
    "FitOptions",
    "FttmFit",
    "FttmSpec",
    "GridCell",
    "GridSearchError",
    "HorizonError",
    "MonteCarloReport",
    "RawParams",
    "ScenarioConfig",
    "ScenarioTruth",
    "StepFunction",
    "SurvivalDataset",
    "bernstein_matrix",
    "bernstein_vector",
    "box_cox",
    "build_workspace",
    "c_index",
    "curve_basis",
    "cv_c_index",
    "default_tau",
    "estimate_covariance",
    "eta_from_gamma",
    "expected_survival",
    "fit",
    "functional_band",
    "functional_design",
    "gamma_from_eta",
    "generate",
    "gof_curve",
    "gradient",
    "grid_search",
    "h_inverse",
    "increment_jacobian",
    "initialize",
    "linear_predictor_at",
    "log_likelihood",
    "logarithmic",
    "monte_carlo",
    "nelson_aalen",
    "observed_information",
    "pseudo_residuals",
    "survival_at",
    "transform_deriv",
    "transform_value",
    "transformation_band",
    "trapezoid_weights",
    "validate",
    "wald_intervals",
    "__version__",
]
