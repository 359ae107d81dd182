"""Lower/upper posterior-predictive bounds for categorical latent variables
observed through known noisy channels, under near-ignorance sets of Dirichlet
priors, plus a numerical lab for verifying when such bounds stay vacuous."""

from .errors import DegenerateRatioError, ScenarioError, SizeCapError
from .idm import (
    BoundaryLimit,
    FrequencyVector,
    PredictiveBounds,
    log_marginal_probability,
    posterior_update,
    standard_idm_predictive_bounds,
    vacuous_prior_upper_predictive,
)
from .manifest import (
    BinaryChannel,
    ManifestChances,
    NaiveReconstruction,
    direct_manifest_idm,
    latent_to_manifest_chance,
    naive_reconstruction,
    scaled_beta_posterior_bounds,
    scaled_beta_posterior_mean,
)
from .observation import (
    EmissionMatrix,
    ManifestDataset,
    OutcomeDiagnosis,
    SearchSpec,
    VacuityDiagnosis,
    frequency_weights,
    latent_likelihood,
    manifest_given_latent,
    posterior_predictive_at_t,
    predictive_bounds,
    vacuity_diagnosis,
)
from .simplex import (
    CLAMP_TO_EPSILON,
    INCLUDE_BOUNDARY,
    DirichletParams,
    SimplexGrid,
    SimplexPoint,
    dirichlet_log_density,
    dirichlet_mean,
    integrate_on_simplex,
)
from .special import log_gamma
from .vacuity import (
    BoundedFunction,
    ConcentratingSequence,
    DeltaSet,
    LikelihoodFunction,
    LiminfReport,
    TrendReport,
    TrendRow,
    canonical_concentrating_sequence,
    constant_likelihood,
    coordinate_function,
    coordinate_likelihood,
    dataset_likelihood,
    delta_set_mass,
    fixed_strength_concentrating_sequence,
    liminf_positivity_check,
    monomial_function,
    monomial_likelihood,
    posterior_ratio,
    verify_theorem1,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryChannel",
    "BoundaryLimit",
    "BoundedFunction",
    "CLAMP_TO_EPSILON",
    "ConcentratingSequence",
    "DegenerateRatioError",
    "DeltaSet",
    "DirichletParams",
    "EmissionMatrix",
    "FrequencyVector",
    "INCLUDE_BOUNDARY",
    "LikelihoodFunction",
    "LiminfReport",
    "ManifestChances",
    "ManifestDataset",
    "NaiveReconstruction",
    "OutcomeDiagnosis",
    "PredictiveBounds",
    "ScenarioError",
    "SearchSpec",
    "SimplexGrid",
    "SimplexPoint",
    "SizeCapError",
    "TrendReport",
    "TrendRow",
    "VacuityDiagnosis",
    "canonical_concentrating_sequence",
    "constant_likelihood",
    "coordinate_function",
    "coordinate_likelihood",
    "dataset_likelihood",
    "delta_set_mass",
    "direct_manifest_idm",
    "dirichlet_log_density",
    "dirichlet_mean",
    "fixed_strength_concentrating_sequence",
    "frequency_weights",
    "integrate_on_simplex",
    "latent_likelihood",
    "latent_to_manifest_chance",
    "liminf_positivity_check",
    "log_gamma",
    "log_marginal_probability",
    "manifest_given_latent",
    "monomial_function",
    "monomial_likelihood",
    "naive_reconstruction",
    "posterior_predictive_at_t",
    "posterior_ratio",
    "posterior_update",
    "predictive_bounds",
    "scaled_beta_posterior_bounds",
    "scaled_beta_posterior_mean",
    "standard_idm_predictive_bounds",
    "vacuity_diagnosis",
    "vacuous_prior_upper_predictive",
    "verify_theorem1",
    "__version__",
]
