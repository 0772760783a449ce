"""Data-driven choice of the noise variances and the discrepancy radius ``U``."""

import warnings
from dataclasses import dataclass

import numpy as np

from .estimators import interpolate, ols, ols_eigenbasis
from .exceptions import DegenerateFit, NotPositiveDefinite, SingularDesign
from .lasso import fold_partition, lasso, lasso_cv
from .minimax import ProblemSpec, optimal_weights
from .pencil import GramPair, decompose, to_eigenbasis

PILOT_EPS = 1e-8


@dataclass(frozen=True)
class TuningReport:
    sigma_S2_hat: float
    sigma_T2_hat: float
    U_hat: float
    cv_curve: tuple
    pilot_distance: float

    @property
    def candidates(self):
        return np.array([u for u, _ in self.cv_curve])

    @property
    def errors(self):
        return np.array([e for _, e in self.cv_curve])


def _mean_square_residual(data, theta):
    resid = data.response - data.design @ theta
    return float(resid @ resid) / data.n_samples


def estimate_sigma_source(data):
    """Least-squares MLE ``(1/n) sum (y_i - x_i' theta_hat)^2`` of the source noise variance."""
    if data.n_samples <= data.n_features:
        warnings.warn("n <= d: the residual variance estimate is degenerate", RuntimeWarning,
                      stacklevel=2)
    return _mean_square_residual(data, ols(data))


def sigma_from_lasso(data, fit):
    """Degrees-of-freedom corrected residual variance of a Lasso fit."""
    dof = data.n_samples - fit.support_size
    if dof <= 0:
        raise DegenerateFit(
            f"n_T = {data.n_samples} does not exceed the Lasso support size {fit.support_size}")
    resid = data.response - data.design @ fit.coefficients
    return float(resid @ resid) / dof


def estimate_sigma_target(data, mode="mle", folds=5, seed=0, grid_size=30):
    """Target noise variance.

    ``mode="mle"`` is the least-squares MLE (biased down by ``1 - d/n``);
    ``mode="reid"`` divides the residual sum of squares of a cross-validated
    Lasso by ``n_T - s_hat`` with ``s_hat`` the size of its support.
    """
    if mode == "mle":
        return estimate_sigma_source(data)
    if mode == "reid":
        return sigma_from_lasso(data, lasso_cv(data, folds, grid_size, seed))
    raise ValueError(f"mode must be 'mle' or 'reid', got {mode!r}")


def _positive(x, scale):
    return max(float(x), np.finfo(float).eps * (1.0 + scale))


def estimate_U_cv(source, target, folds=5, grid_size=20, seed=0, *, sigma_S2=None,
                  sigma_T2=None, target_mode="mle", lasso_penalty=None, lasso_grid_size=30,
                  partition=None, rank_tol=1e-12):
    """Choose ``U`` by K-fold cross-validation on the target rows.

    A pilot distance ``D_hat`` between the source and target fits fixes the
    candidate grid: ``grid_size`` equispaced points on ``[0, 2 sqrt(D_hat)]``.
    For every training fold the pencil is rebuilt from the training target
    rows, the interpolation estimator is fitted for each candidate, and the
    held-out squared prediction error is recorded.  Noise variances are the
    full-data estimates unless given.

    Since a training fold holds a fraction ``n_train/n_T`` of the target Gram
    matrix, candidate radii are rescaled to the fold metric by that fraction.
    In ``"reid"`` mode a singular training-fold Gram matrix (more features
    than training rows) is replaced by the full-data one scaled by the same
    fraction.

    Parameters
    ----------
    source, target : Dataset
    folds : int, default=5
    grid_size : int, default=20
    seed : int
        Seed of the fold partition.
    sigma_S2, sigma_T2 : float, optional
        Override the estimated noise variances.
    target_mode : {"mle", "reid"}
        ``"reid"`` uses a cross-validated Lasso for the target fit, both in the
        pilot distance and inside each fold (at the full-data penalty).
    lasso_penalty : float, optional
        Fixed Lasso penalty for ``"reid"``; chosen by ``lasso_cv`` if omitted.
    partition : list of index arrays, optional
        Explicit fold partition overriding ``folds`` and ``seed``.

    Returns
    -------
    TuningReport
    """
    if target_mode not in ("mle", "reid"):
        raise ValueError(f"target_mode must be 'mle' or 'reid', got {target_mode!r}")
    n_T = target.n_samples
    if partition is None:
        partition = fold_partition(n_T, folds, seed)
    folds = len(partition)

    full = decompose(GramPair(source.gram(), target.gram()), rank_tol)
    beta_S = ols_eigenbasis(source, full, "source")
    target_fit = None
    if target_mode == "reid":
        if lasso_penalty is None:
            target_fit = lasso_cv(target, folds, lasso_grid_size, seed)
        else:
            target_fit = lasso(target, lasso_penalty)
        beta_T = to_eigenbasis(target_fit.coefficients, full)
    else:
        beta_T = ols_eigenbasis(target, full, "target")
    pilot = float(np.sum((beta_S - beta_T) ** 2))

    if sigma_S2 is None:
        sigma_S2 = estimate_sigma_source(source)
    if sigma_T2 is None:
        if target_mode == "reid":
            sigma_T2 = sigma_from_lasso(target, target_fit)
        else:
            sigma_T2 = estimate_sigma_source(target)
    s_S2 = _positive(sigma_S2, np.var(source.response))
    s_T2 = _positive(sigma_T2, np.var(target.response))

    grid = np.linspace(0.0, 2.0 * np.sqrt(max(pilot, PILOT_EPS)), grid_size)
    curve = np.zeros(grid_size)
    all_rows = np.arange(n_T)
    src_moment = source.design.T @ source.response
    for f, held in enumerate(partition):
        train = target.subset(np.setdiff1d(all_rows, held, assume_unique=True))
        scale = train.n_samples / n_T
        try:
            dec = decompose(GramPair(source.gram(), train.gram()), rank_tol)
        except NotPositiveDefinite as exc:
            if target_mode != "reid":
                raise SingularDesign("training-fold target Gram matrix is singular",
                                     fold=f) from exc
            # more features than training rows: borrow the full-data geometry
            dec = decompose(GramPair(source.gram(), scale * target.gram()), rank_tol)
        b_S = (dec.basis.T @ src_moment) / dec.eigenvalues
        if target_mode == "reid":
            penalty = target_fit.penalty
            b_T = to_eigenbasis(lasso(train, penalty).coefficients, dec)
        else:
            b_T = ols_eigenbasis(train, dec, "target")
        W_te, V_te = target.design[held], target.response[held]
        for k, u in enumerate(grid):
            t = optimal_weights(dec.eigenvalues, ProblemSpec(s_S2, s_T2, u * u * scale))
            theta = interpolate(b_S, b_T, t, dec)
            resid = V_te - W_te @ theta
            curve[k] += float(resid @ resid) / held.shape[0]
    curve /= folds

    best = int(np.argmin(curve))
    return TuningReport(
        sigma_S2_hat=float(sigma_S2),
        sigma_T2_hat=float(sigma_T2),
        U_hat=float(grid[best]),
        cv_curve=tuple((float(u), float(e)) for u, e in zip(grid, curve)),
        pilot_distance=pilot,
    )
