"""Closed-form minimax quantities for geometric transfer learning.

All functions take the (clamped, descending) pencil eigenvalues and a
:class:`ProblemSpec`.  The least-favorable discrepancy allocation ``alpha``
is a water-filling solution: it raises ``alpha_i U^2 + sigma_S^2 / lambda_i``
to a common level over the leading coordinates and leaves the rest at zero.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_vector, frozen
from .estimators import InterpolationWeights
from .exceptions import (
    ConfigInvalid,
    DimensionMismatch,
    EmptySources,
    NonpositiveLambda,
    UnsortedLambdas,
)

LECAM_CONSTANT = math.exp(-0.5) / 16.0
GLM_LOWER_CONSTANT = math.exp(-1.0) / 800.0
DEFAULT_CONFIDENCE = math.log(1.0 / 0.05)


@dataclass(frozen=True)
class ProblemSpec:
    """Noise variances and squared discrepancy radius ``U^2``."""

    sigma_S2: float
    sigma_T2: float
    U2: float

    def __post_init__(self):
        for name in ("sigma_S2", "sigma_T2", "U2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ConfigInvalid(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.sigma_S2 <= 0 or self.sigma_T2 <= 0:
            raise ConfigInvalid("noise variances must be positive")
        if self.U2 < 0:
            raise ConfigInvalid("U2 must be non-negative")

    @classmethod
    def from_radius(cls, sigma_S2, sigma_T2, U):
        return cls(sigma_S2, sigma_T2, float(U) ** 2)


@dataclass(frozen=True)
class AlphaAllocation:
    """Water-filling allocation of the discrepancy budget.

    ``kappa`` is empty and ``degenerate`` is True when ``U^2 = 0``; the
    allocation is then immaterial and set to ``(1, 0, ..., 0)``.
    """

    kappa: np.ndarray
    K_star: int
    alpha: np.ndarray
    degenerate: bool = False

    def water_level(self, lambdas, spec):
        return self.alpha * spec.U2 + spec.sigma_S2 / np.asarray(lambdas, dtype=float)


def _check_lambdas(lambdas):
    lam = as_vector(lambdas, "lambdas")
    if lam.shape[0] == 0:
        raise DimensionMismatch("lambdas must be non-empty")
    if np.any(np.diff(lam) > 0):
        raise UnsortedLambdas("lambdas must be sorted in descending order")
    if lam[-1] <= 0:
        raise NonpositiveLambda("lambdas must be strictly positive (clamp them first)")
    return lam


def alpha_star(lambdas, spec):
    """Least-favorable simplex weights, water-filling index and ``kappa``.

    ``kappa_i = (sigma_S^2/U^2)(1/lambda_{i+1} - 1/lambda_i)`` is the budget
    needed to lift coordinate ``i`` to the floor of coordinate ``i+1``;
    ``K*`` is the largest ``K`` with ``sum_{i<=K} i kappa_i <= 1``.
    """
    lam = _check_lambdas(lambdas)
    d = lam.shape[0]
    if spec.U2 == 0.0:
        alpha = np.zeros(d)
        alpha[0] = 1.0
        return AlphaAllocation(frozen(np.empty(0)), 0, frozen(alpha), degenerate=True)

    inv = 1.0 / lam
    kappa = (spec.sigma_S2 / spec.U2) * np.diff(inv)
    prefix = np.cumsum(np.arange(1, d) * kappa)
    K = 0
    for k in range(1, d):
        if prefix[k - 1] <= 1.0:
            K = k
        else:
            break
    used = prefix[K - 1] if K > 0 else 0.0
    share = (1.0 - used) / (K + 1)
    alpha = np.zeros(d)
    # alpha_i = sum_{j=i}^{K} kappa_j + share for i <= K+1 (1-based)
    tail = np.cumsum(kappa[:K][::-1])[::-1] if K > 0 else np.empty(0)
    alpha[:K] = tail + share
    alpha[K] = share
    return AlphaAllocation(frozen(kappa), int(K), frozen(alpha))


def _levels(lam, spec, alloc):
    return alloc.alpha * spec.U2 + spec.sigma_S2 / lam


def optimal_weights(lambdas, spec):
    """Minimax interpolation weights ``t_i = sigma_T^2 / (sigma_T^2 + level_i)``."""
    lam = _check_lambdas(lambdas)
    level = _levels(lam, spec, alpha_star(lam, spec))
    return InterpolationWeights(spec.sigma_T2 / (spec.sigma_T2 + level))


def _summands(lam, spec, alloc):
    level = _levels(lam, spec, alloc)
    return 1.0 / (1.0 / spec.sigma_T2 + 1.0 / level), level


def upper_bound(lambdas, spec):
    """Worst-case risk of the optimally weighted interpolation estimator."""
    lam = _check_lambdas(lambdas)
    summands, _ = _summands(lam, spec, alpha_star(lam, spec))
    return float(np.sum(summands))


def lower_bound(lambdas, spec, improved=False):
    """Minimax lower bound.

    Plain mode scales the upper bound by ``exp(-1/2)/16``.  Improved mode
    uses per-summand constants
    ``max(exp(-1/2)/16, ((sigma_S^2/lambda_i) / level_i)^2)``.
    """
    lam = _check_lambdas(lambdas)
    summands, level = _summands(lam, spec, alpha_star(lam, spec))
    plain = LECAM_CONSTANT * float(np.sum(summands))
    if not improved:
        return plain
    ratio = (spec.sigma_S2 / lam) / level
    const = np.maximum(LECAM_CONSTANT, ratio * ratio)
    # the max only absorbs summation-order rounding
    return max(float(np.sum(const * summands)), plain)


def worst_case_interpolator_risk(weights, lambdas, spec):
    """Worst-case risk of a fixed interpolator over the uncertainty set.

    The adversary puts its whole budget on the coordinate with the largest
    ``t_i``, giving ``sum_i [t_i^2 sigma_S^2/lambda_i + (1-t_i)^2 sigma_T^2]
    + U^2 max_i t_i^2``.
    """
    if not isinstance(weights, InterpolationWeights):
        weights = InterpolationWeights(weights)
    lam = _check_lambdas(lambdas)
    t = weights.t
    if t.shape[0] != lam.shape[0]:
        raise DimensionMismatch("weights and lambdas differ in length")
    variance = np.sum(t * t * spec.sigma_S2 / lam + (1.0 - t) ** 2 * spec.sigma_T2)
    return float(variance + spec.U2 * np.max(t * t))


@dataclass(frozen=True)
class BasicRisks:
    source_only: float
    target_only: float
    pooling: float

    def __iter__(self):
        return iter((self.source_only, self.target_only, self.pooling))

    def minimum(self):
        return min(self.source_only, self.target_only, self.pooling)


def basic_worst_case_risks(lambdas, spec):
    """Worst-case risks of source-only, target-only and pooled least squares."""
    lam = _check_lambdas(lambdas)
    d = lam.shape[0]
    source_only = spec.U2 + spec.sigma_S2 * float(np.sum(1.0 / lam))
    target_only = d * spec.sigma_T2
    shrink = lam / (1.0 + lam)
    pooled = (spec.U2 * float(np.max(shrink ** 2))
              + spec.sigma_T2 * float(np.sum((1.0 / (1.0 + lam)) ** 2))
              + spec.sigma_S2 * float(np.sum(lam / (1.0 + lam) ** 2)))
    return BasicRisks(source_only, target_only, pooled)


def nash_adversary(beta_target, alloc, U, signs=None):
    """Least-favorable source parameter ``beta_T + signs * U * sqrt(alpha)``."""
    bt = as_vector(beta_target, "beta_target")
    d = bt.shape[0]
    if alloc.alpha.shape[0] != d:
        raise DimensionMismatch("allocation and beta_target differ in length")
    if signs is None:
        signs = np.ones(d)
    signs = as_vector(signs, "signs", d)
    if not np.all(np.isin(signs, (-1.0, 1.0))):
        raise ValueError("signs must be +1 or -1")
    if U < 0:
        raise ValueError("U must be non-negative")
    return bt + signs * float(U) * np.sqrt(alloc.alpha)


def pooling_adversary(beta_target, lambdas, U, sign=1.0):
    """Source parameter attaining the pooled estimator's worst case.

    The pooled bias in coordinate ``i`` is ``lambda_i/(1+lambda_i)`` times the
    parameter shift, so the whole budget goes to the largest eigenvalue.
    """
    bt = as_vector(beta_target, "beta_target")
    lam = _check_lambdas(lambdas)
    if lam.shape[0] != bt.shape[0]:
        raise DimensionMismatch("lambdas and beta_target differ in length")
    out = bt.copy()
    out[int(np.argmax(lam))] += sign * float(U)
    return out


# -- generalized linear models, multiple sources ---------------------------------------


@dataclass(frozen=True)
class GlmSourceSpec:
    """Summary of one GLM source: radius, dispersion, curvature bounds, pencil extremes."""

    U2: float
    dispersion: float
    curvature_upper: float
    curvature_lower: float
    lambda_max: float
    lambda_min: float

    def __post_init__(self):
        if self.U2 < 0:
            raise ConfigInvalid("U2 must be non-negative")
        for name in ("dispersion", "curvature_upper", "curvature_lower", "lambda_max",
                     "lambda_min"):
            if not getattr(self, name) > 0:
                raise ConfigInvalid(f"{name} must be positive")
        if self.curvature_lower > self.curvature_upper:
            raise ConfigInvalid("curvature_lower exceeds curvature_upper")
        if self.lambda_min > self.lambda_max:
            raise ConfigInvalid("lambda_min exceeds lambda_max")


@dataclass(frozen=True)
class GlmTargetSpec:
    dispersion: float
    curvature_upper: float
    curvature_lower: float
    dim: int

    def __post_init__(self):
        for name in ("dispersion", "curvature_upper", "curvature_lower"):
            if not getattr(self, name) > 0:
                raise ConfigInvalid(f"{name} must be positive")
        if self.curvature_lower > self.curvature_upper:
            raise ConfigInvalid("curvature_lower exceeds curvature_upper")
        if int(self.dim) < 1:
            raise ConfigInvalid("dim must be at least 1")


def glm_lower_bound(sources, target):
    """Lower bound on the multi-source GLM minimax risk."""
    sources = list(sources)
    if not sources:
        raise EmptySources("at least one source is required")
    d = target.dim
    denom = 0.0
    for s in sources:
        denom += 1.0 / (s.U2 / d + s.dispersion / (s.curvature_upper * s.lambda_max))
    denom += target.curvature_upper / target.dispersion
    return GLM_LOWER_CONSTANT * d / denom


def gaussian_lower_bound(U2s, sigma_S2s, lambda_maxes, sigma_T2, dim):
    """Multi-source Gaussian linear-model lower bound (unit curvature, dispersion ``sigma^2``)."""
    sources = [GlmSourceSpec(u2, s2, 1.0, 1.0, lmax, lmax)
               for u2, s2, lmax in zip(U2s, sigma_S2s, lambda_maxes, strict=True)]
    return glm_lower_bound(sources, GlmTargetSpec(sigma_T2, 1.0, 1.0, dim))


def simplex_harmonic_weights(costs):
    """Minimize ``sum_k t_k^2 a_k`` over the simplex.

    The minimizer is ``t_k proportional to 1/a_k``, with value ``1/sum_k(1/a_k)``.
    """
    a = as_vector(costs, "costs")
    if np.any(a <= 0):
        raise ValueError("costs must be positive")
    inv = 1.0 / a
    total = float(np.sum(inv))
    return inv / total, 1.0 / total


def glm_interpolator_costs(sources, target, confidence=DEFAULT_CONFIDENCE):
    sources = list(sources)
    if not sources:
        raise EmptySources("at least one source is required")
    if not confidence > 0:
        raise ValueError("confidence must be positive")
    d, M = target.dim, len(sources)
    tail = confidence + math.log(2 * d * M)
    costs = [s.U2 + (2 * d * s.curvature_upper * s.dispersion
                     / (s.curvature_lower ** 2 * s.lambda_min)) * tail
             for s in sources]
    costs.append((2 * d * target.curvature_upper * target.dispersion
                  / target.curvature_lower ** 2) * tail)
    return np.array(costs)


def glm_interpolator_weights(sources, target, confidence=DEFAULT_CONFIDENCE):
    """Simplex weights of the multi-source GLM interpolator and its risk bound.

    Returns ``(weights, bound)``: ``weights`` has length ``M + 1`` with the
    target weight last; the bound holds with probability at least
    ``1 - exp(-confidence)``.
    """
    return simplex_harmonic_weights(glm_interpolator_costs(sources, target, confidence))


def spectral_gap_relaxation(lambda_max, sigma2, U2, dim):
    """Single-eigenvalue relaxation ``d s^2 / (1 + 1/(U^2/(d s^2) + 1/lambda_1))``."""
    return dim * sigma2 / (1.0 + 1.0 / (U2 / (dim * sigma2) + 1.0 / lambda_max))


@dataclass(frozen=True)
class BoundSummary:
    upper: float
    lower_plain: float
    lower_improved: float
    basic: BasicRisks = field(default_factory=lambda: BasicRisks(0.0, 0.0, 0.0))


def bound_summary(lambdas, spec):
    return BoundSummary(
        upper=upper_bound(lambdas, spec),
        lower_plain=lower_bound(lambdas, spec, improved=False),
        lower_improved=lower_bound(lambdas, spec, improved=True),
        basic=basic_worst_case_risks(lambdas, spec),
    )
