"""scikit-learn compatible estimators built on the functional API."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .estimators import Dataset, interpolate, ols_eigenbasis
from .exceptions import DimensionMismatch
from .lasso import lasso_cv
from .minimax import ProblemSpec, optimal_weights, upper_bound
from .pencil import GramPair, decompose, to_eigenbasis
from .tuning import estimate_sigma_source, estimate_U_cv, sigma_from_lasso


def _check_pair(X, y, X_source, y_source):
    X, y = check_X_y(X, y, y_numeric=True, dtype=float)
    if X_source is None or y_source is None:
        raise ValueError("X_source and y_source are required")
    X_source, y_source = check_X_y(X_source, y_source, y_numeric=True, dtype=float)
    if X_source.shape[1] != X.shape[1]:
        raise DimensionMismatch(
            f"source has {X_source.shape[1]} features, target has {X.shape[1]}")
    return Dataset(X, y), Dataset(X_source, y_source)


class PencilTransformer(TransformerMixin, BaseEstimator):
    """Map designs into the source/target pencil coordinates.

    ``fit`` takes the target design ``X`` and the source design; ``transform``
    returns ``X @ E``, whose Gram matrix is the identity for the fitted target
    design.

    Parameters
    ----------
    rank_tol : float, default=1e-12
    """

    def __init__(self, rank_tol=1e-12):
        self.rank_tol = rank_tol

    def fit(self, X, y=None, *, X_source=None):
        X = check_array(X, dtype=float)
        if X_source is None:
            raise ValueError("X_source is required")
        X_source = check_array(X_source, dtype=float)
        if X_source.shape[1] != X.shape[1]:
            raise DimensionMismatch("source and target designs differ in width")
        self.pencil_ = decompose(GramPair(X_source.T @ X_source, X.T @ X), self.rank_tol)
        self.eigenvalues_ = self.pencil_.eigenvalues
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "pencil_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise DimensionMismatch(f"expected {self.n_features_in_} features")
        return X @ self.pencil_.basis


class GeometricTransferRegressor(RegressorMixin, BaseEstimator):
    """Minimax model-interpolation estimator for linear transfer learning.

    Source and target least-squares fits are expressed in the pencil basis
    and mixed coordinate-wise with the minimax weights for the given noise
    variances and discrepancy radius.  Unknown quantities are estimated:
    noise variances by residual variance, the radius by K-fold
    cross-validation on the target rows.

    Parameters
    ----------
    radius : float or None, default=None
        Discrepancy radius ``U``. ``None`` selects it by cross-validation.
    sigma_source2, sigma_target2 : float or None, default=None
        Noise variances; estimated when ``None``.
    target_estimator : {"ols", "lasso"}, default="ols"
        ``"lasso"`` replaces the target least-squares fit by a
        cross-validated Lasso (for sparse, high-dimensional targets).
    cv : int, default=5
    n_radii : int, default=20
        Number of candidate radii in the cross-validation grid.
    lasso_grid_size : int, default=30
    rank_tol : float, default=1e-12
    random_state : int, default=0

    Attributes
    ----------
    coef_ : ndarray of shape (n_features,)
    weights_ : ndarray of shape (n_features,)
        Interpolation weights (1 = source).
    radius_, sigma_source2_, sigma_target2_ : float
    pencil_ : PencilDecomposition
    tuning_report_ : TuningReport or None
    worst_case_risk_ : float
        Closed-form worst-case risk at the fitted hyperparameters.

    Examples
    --------
    >>> reg = GeometricTransferRegressor(radius=1.0)
    >>> reg.fit(W, V, X_source=X, y_source=Y).predict(W_new)  # doctest: +SKIP
    """

    def __init__(self, radius=None, sigma_source2=None, sigma_target2=None,
                 target_estimator="ols", cv=5, n_radii=20, lasso_grid_size=30,
                 rank_tol=1e-12, random_state=0):
        self.radius = radius
        self.sigma_source2 = sigma_source2
        self.sigma_target2 = sigma_target2
        self.target_estimator = target_estimator
        self.cv = cv
        self.n_radii = n_radii
        self.lasso_grid_size = lasso_grid_size
        self.rank_tol = rank_tol
        self.random_state = random_state

    def fit(self, X, y, *, X_source=None, y_source=None):
        """Fit on target rows ``(X, y)`` with the source sample as side information."""
        if self.target_estimator not in ("ols", "lasso"):
            raise ValueError(f"target_estimator must be 'ols' or 'lasso', "
                             f"got {self.target_estimator!r}")
        target, source = _check_pair(X, y, X_source, y_source)
        pencil = decompose(GramPair(source.gram(), target.gram()), self.rank_tol)
        beta_S = ols_eigenbasis(source, pencil, "source")

        lasso_fit = None
        if self.target_estimator == "lasso":
            lasso_fit = lasso_cv(target, self.cv, self.lasso_grid_size, self.random_state)
            beta_T = to_eigenbasis(lasso_fit.coefficients, pencil)
        else:
            beta_T = ols_eigenbasis(target, pencil, "target")

        s_S2 = self.sigma_source2
        if s_S2 is None:
            s_S2 = estimate_sigma_source(source)
        s_T2 = self.sigma_target2
        if s_T2 is None:
            s_T2 = (sigma_from_lasso(target, lasso_fit) if lasso_fit is not None
                    else estimate_sigma_source(target))

        self.tuning_report_ = None
        radius = self.radius
        if radius is None:
            self.tuning_report_ = estimate_U_cv(
                source, target, self.cv, self.n_radii, self.random_state,
                sigma_S2=s_S2, sigma_T2=s_T2,
                target_mode="reid" if lasso_fit is not None else "mle",
                lasso_penalty=None if lasso_fit is None else lasso_fit.penalty,
                rank_tol=self.rank_tol,
            )
            radius = self.tuning_report_.U_hat

        floor = np.finfo(float).eps
        spec = ProblemSpec(max(s_S2, floor), max(s_T2, floor), float(radius) ** 2)
        weights = optimal_weights(pencil.eigenvalues, spec)

        self.pencil_ = pencil
        self.radius_ = float(radius)
        self.sigma_source2_ = float(s_S2)
        self.sigma_target2_ = float(s_T2)
        self.weights_ = weights.t
        self.coef_ = interpolate(beta_S, beta_T, weights, pencil)
        self.worst_case_risk_ = upper_bound(pencil.eigenvalues, spec)
        self.n_features_in_ = target.n_features
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise DimensionMismatch(f"expected {self.n_features_in_} features")
        return X @ self.coef_
