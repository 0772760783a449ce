"""Geometric model interpolation for transfer learning in linear models.

The target parameter is estimated by mixing source and target least-squares
fits coordinate-wise in the generalized eigenbasis of the Gram-matrix pencil
``(X'X, W'W)``, with weights that are minimax-optimal over the set of source
parameters within target-metric distance ``U`` of the target.
"""

from .estimators import (
    Dataset,
    InterpolationWeights,
    interpolate,
    ols,
    ols_eigenbasis,
    pooling,
)
from .exceptions import (
    ConfigInvalid,
    DegenerateFit,
    DimensionMismatch,
    EmptySources,
    GeoTransferError,
    InsufficientData,
    InvalidRho,
    NonConvergence,
    NonNumericValue,
    NonpositiveLambda,
    NotPositiveDefinite,
    NotSymmetric,
    SchemaMismatch,
    SingularDesign,
    UnsortedLambdas,
    WeightOutOfRange,
)
from .lasso import LassoFit, lasso, lasso_cv
from .minimax import (
    AlphaAllocation,
    GlmSourceSpec,
    GlmTargetSpec,
    ProblemSpec,
    alpha_star,
    basic_worst_case_risks,
    gaussian_lower_bound,
    glm_interpolator_weights,
    glm_lower_bound,
    lower_bound,
    nash_adversary,
    optimal_weights,
    upper_bound,
    worst_case_interpolator_risk,
)
from .pencil import GramPair, PencilDecomposition, decompose, discrepancy, from_eigenbasis, to_eigenbasis
from .transfer import GeometricTransferRegressor, PencilTransformer
from .tuning import TuningReport, estimate_sigma_source, estimate_sigma_target, estimate_U_cv

__version__ = "0.1.0"

__all__ = [
    "AlphaAllocation",
    "ConfigInvalid",
    "Dataset",
    "DegenerateFit",
    "DimensionMismatch",
    "EmptySources",
    "GeoTransferError",
    "GeometricTransferRegressor",
    "GlmSourceSpec",
    "GlmTargetSpec",
    "GramPair",
    "InsufficientData",
    "InterpolationWeights",
    "InvalidRho",
    "LassoFit",
    "NonConvergence",
    "NonNumericValue",
    "NonpositiveLambda",
    "NotPositiveDefinite",
    "NotSymmetric",
    "PencilDecomposition",
    "PencilTransformer",
    "ProblemSpec",
    "SchemaMismatch",
    "SingularDesign",
    "TuningReport",
    "UnsortedLambdas",
    "WeightOutOfRange",
    "alpha_star",
    "basic_worst_case_risks",
    "decompose",
    "discrepancy",
    "estimate_U_cv",
    "estimate_sigma_source",
    "estimate_sigma_target",
    "from_eigenbasis",
    "gaussian_lower_bound",
    "glm_interpolator_weights",
    "glm_lower_bound",
    "interpolate",
    "lasso",
    "lasso_cv",
    "lower_bound",
    "nash_adversary",
    "ols",
    "ols_eigenbasis",
    "optimal_weights",
    "pooling",
    "to_eigenbasis",
    "upper_bound",
    "worst_case_interpolator_risk",
]
