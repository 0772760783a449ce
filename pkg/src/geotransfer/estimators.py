"""Point estimators: least squares per domain, the coordinate-wise
interpolation estimator and the pooled fit."""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ._validation import as_matrix, as_vector, frozen
from .exceptions import DimensionMismatch, SingularDesign, WeightOutOfRange

_PD_RTOL = 1e-12


@dataclass(frozen=True)
class Dataset:
    """A fixed design matrix and its response vector for one domain."""

    design: np.ndarray
    response: np.ndarray

    def __post_init__(self):
        X = as_matrix(self.design, "design")
        y = as_vector(self.response, "response")
        if y.shape[0] != X.shape[0]:
            raise DimensionMismatch(
                f"response has {y.shape[0]} entries but design has {X.shape[0]} rows")
        object.__setattr__(self, "design", frozen(X))
        object.__setattr__(self, "response", frozen(y))

    @property
    def n_samples(self):
        return self.design.shape[0]

    @property
    def n_features(self):
        return self.design.shape[1]

    def gram(self):
        return self.design.T @ self.design

    def subset(self, rows):
        rows = np.asarray(rows)
        return Dataset(self.design[rows], self.response[rows])


@dataclass(frozen=True)
class InterpolationWeights:
    """Per-coordinate mixing weights ``t`` in ``[0, 1]^d``; ``t_i = 1`` trusts the source."""

    t: np.ndarray

    def __post_init__(self):
        t = as_vector(self.t, "t")
        if np.any(t < 0.0) or np.any(t > 1.0):
            raise WeightOutOfRange(f"interpolation weights must lie in [0, 1]: {t}")
        object.__setattr__(self, "t", frozen(t))

    def __len__(self):
        return self.t.shape[0]


def _solve_spd(gram, rhs, what="design"):
    gram = 0.5 * (gram + gram.T)
    try:
        factor = linalg.cho_factor(gram, lower=True)
    except linalg.LinAlgError as exc:
        raise SingularDesign(f"{what} Gram matrix is not positive-definite") from exc
    diag = np.diag(factor[0])
    if diag.min() ** 2 <= _PD_RTOL * diag.max() ** 2:
        raise SingularDesign(f"{what} Gram matrix is numerically singular")
    return linalg.cho_solve(factor, rhs)


def ols(data):
    """Ordinary least squares ``(X'X)^-1 X'Y``.

    Raises
    ------
    SingularDesign
        If ``X'X`` is not numerically positive-definite.
    """
    X, y = data.design, data.response
    return _solve_spd(X.T @ X, X.T @ y)


def ols_eigenbasis(data, decomp, domain):
    """Least squares in pencil coordinates.

    For the target ``E'W'V`` (the target Gram is the identity there); for the
    source ``diag(lambda)^-1 E'X'Y`` using the clamped eigenvalues.
    """
    if domain not in ("source", "target"):
        raise ValueError(f"domain must be 'source' or 'target', got {domain!r}")
    if data.n_features != decomp.dim:
        raise DimensionMismatch(
            f"data has {data.n_features} features, pencil has dimension {decomp.dim}")
    projected = decomp.basis.T @ (data.design.T @ data.response)
    if domain == "target":
        return projected
    if np.all(decomp.clamped):
        raise SingularDesign("every source eigen-direction is clamped")
    return projected / decomp.eigenvalues


def interpolate(beta_source, beta_target, weights, decomp):
    """``E (diag(t) beta_S + diag(1 - t) beta_T)`` in original coordinates."""
    if not isinstance(weights, InterpolationWeights):
        weights = InterpolationWeights(weights)
    d = decomp.dim
    bs = as_vector(beta_source, "beta_source", d)
    bt = as_vector(beta_target, "beta_target", d)
    if len(weights) != d:
        raise DimensionMismatch(f"weights have length {len(weights)}, expected {d}")
    t = weights.t
    return decomp.basis @ (t * bs + (1.0 - t) * bt)


def pooling(source, target):
    """Least squares on the stacked source and target samples."""
    if source.n_features != target.n_features:
        raise DimensionMismatch("source and target have different feature counts")
    X, Y = source.design, source.response
    W, V = target.design, target.response
    return _solve_spd(X.T @ X + W.T @ W, X.T @ Y + W.T @ V, what="pooled")
