"""Lasso by cyclic coordinate descent, with a K-fold cross-validated penalty.

The objective is ``(1/(2n)) ||V - W theta||^2 + gamma ||theta||_1`` (no
intercept, no standardization), so the smallest penalty giving the null
model is ``gamma_max = max_j |W_j' V| / n``.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy import linalg

from .estimators import Dataset
from .exceptions import InsufficientData, NonConvergence
from .seeding import make_rng

MAX_PASSES = 100_000
COEF_RTOL = 1e-7
KKT_TOL = 1e-6


@dataclass(frozen=True)
class LassoFit:
    coefficients: np.ndarray
    penalty: float
    support_size: int
    objective: float
    n_passes: int = 0
    kkt_residual: float = 0.0
    penalty_grid: np.ndarray | None = None
    cv_errors: np.ndarray | None = None


@njit(cache=True)
def _objective(G, c, yy, theta, gamma):
    quad = 0.0
    d = theta.shape[0]
    for j in range(d):
        acc = 0.0
        for k in range(d):
            acc += G[j, k] * theta[k]
        quad += theta[j] * acc
    lin = 0.0
    l1 = 0.0
    for j in range(d):
        lin += c[j] * theta[j]
        l1 += abs(theta[j])
    return 0.5 * yy - lin + 0.5 * quad + gamma * l1


@njit(cache=True)
def _kkt(G, c, theta, gamma):
    d = theta.shape[0]
    worst = 0.0
    for j in range(d):
        grad = c[j]
        for k in range(d):
            grad -= G[j, k] * theta[k]
        if theta[j] > 0.0:
            r = abs(grad - gamma)
        elif theta[j] < 0.0:
            r = abs(grad + gamma)
        else:
            r = abs(grad) - gamma
            if r < 0.0:
                r = 0.0
        if r > worst:
            worst = r
    return worst


@njit(cache=True)
def _coordinate_descent(G, c, yy, theta, gamma, max_passes, rtol, kkt_tol, history):
    """Run passes in place on ``theta``; returns (passes, kkt, n_recorded)."""
    d = theta.shape[0]
    q = G @ theta
    record = history.shape[0] > 1
    n_rec = 0
    if record:
        history[0] = _objective(G, c, yy, theta, gamma)
        n_rec = 1
    kkt = np.inf
    for p in range(1, max_passes + 1):
        max_change = 0.0
        max_coef = 0.0
        for j in range(d):
            gjj = G[j, j]
            if gjj <= 0.0:
                continue
            old = theta[j]
            z = c[j] - q[j] + gjj * old
            if z > gamma:
                new = (z - gamma) / gjj
            elif z < -gamma:
                new = (z + gamma) / gjj
            else:
                new = 0.0
            delta = new - old
            if delta != 0.0:
                theta[j] = new
                for k in range(d):
                    q[k] += G[k, j] * delta
            if abs(delta) > max_change:
                max_change = abs(delta)
            if abs(new) > max_coef:
                max_coef = abs(new)
        if record and n_rec < history.shape[0]:
            history[n_rec] = _objective(G, c, yy, theta, gamma)
            n_rec += 1
        if max_change <= rtol * max_coef:
            kkt = _kkt(G, c, theta, gamma)
            if kkt <= kkt_tol:
                return p, kkt, n_rec
    kkt = _kkt(G, c, theta, gamma)
    return max_passes, kkt, n_rec


def _sufficient_stats(data):
    W, V = data.design, data.response
    n = W.shape[0]
    G = np.ascontiguousarray(W.T @ W / n)
    c = np.ascontiguousarray(W.T @ V / n)
    yy = float(V @ V / n)
    return G, c, yy


def _exact_unpenalized(G, c):
    try:
        factor = linalg.cho_factor(G, lower=True)
    except linalg.LinAlgError:
        return None
    diag = np.diag(factor[0])
    if diag.min() ** 2 <= 1e-12 * diag.max() ** 2:
        return None
    return linalg.cho_solve(factor, c)


def _fit(G, c, yy, gamma, start=None, max_passes=MAX_PASSES, history=None):
    exact = _exact_unpenalized(G, c) if gamma == 0.0 and history is None else None
    if exact is not None:
        # no penalty and a positive-definite Gram: the least-squares solution is exact
        kkt = float(_kkt(G, c, exact, 0.0))
        obj = float(_objective(G, c, yy, exact, 0.0))
        return LassoFit(exact, 0.0, int(np.count_nonzero(exact)), obj, 0, kkt), 0
    theta = np.zeros(c.shape[0]) if start is None else np.array(start, dtype=float)
    hist = np.empty(1) if history is None else history
    passes, kkt, n_rec = _coordinate_descent(G, c, yy, theta, float(gamma), int(max_passes),
                                             COEF_RTOL, KKT_TOL, hist)
    if kkt > KKT_TOL:
        raise NonConvergence(
            f"coordinate descent did not converge in {passes} passes "
            f"(KKT residual {kkt:.3e})", kkt_residual=kkt)
    obj = float(_objective(G, c, yy, theta, float(gamma)))
    fit = LassoFit(coefficients=theta, penalty=float(gamma),
                   support_size=int(np.count_nonzero(theta)), objective=obj,
                   n_passes=int(passes), kkt_residual=float(kkt))
    return fit, n_rec


def gamma_max(data):
    """Smallest penalty at which the fitted coefficients are all zero."""
    W, V = data.design, data.response
    return float(np.max(np.abs(W.T @ V)) / W.shape[0])


def lasso(data, penalty, start=None, max_passes=MAX_PASSES, return_history=False):
    """Fit the Lasso at a fixed penalty.

    Parameters
    ----------
    data : Dataset
    penalty : float
        ``gamma >= 0``.
    start : array-like, optional
        Warm start.
    max_passes : int
    return_history : bool
        When True also return the objective value after each pass
        (index 0 holds the value at the starting point).

    Raises
    ------
    NonConvergence
        If the KKT residual still exceeds 1e-6 after ``max_passes`` passes.
    """
    if penalty < 0:
        raise ValueError(f"penalty must be non-negative, got {penalty}")
    G, c, yy = _sufficient_stats(data)
    history = np.empty(max_passes + 1) if return_history else None
    fit, n_rec = _fit(G, c, yy, penalty, start=start, max_passes=max_passes, history=history)
    if return_history:
        return fit, history[:n_rec].copy()
    return fit


def penalty_path(gmax, grid_size):
    if grid_size < 1:
        raise ValueError("grid_size must be at least 1")
    return gmax * np.logspace(0.0, -3.0, grid_size)


def fold_partition(n, folds, seed):
    """Seeded uniform shuffle cut into ``folds`` contiguous blocks."""
    if folds < 2:
        raise ValueError(f"folds must be at least 2, got {folds}")
    if n < folds:
        raise InsufficientData(f"{n} samples cannot be split into {folds} folds")
    perm = make_rng(seed).permutation(n)
    return np.array_split(perm, folds)


def lasso_cv(data, folds=5, grid_size=30, seed=0, partition=None):
    """Lasso with penalty chosen by K-fold cross-validation.

    The penalty path has ``grid_size`` log-spaced values from ``gamma_max``
    down to ``1e-3 * gamma_max``, followed by ``0`` when every training fold
    has more rows than features; each fold is fitted along the path with warm
    starts and scored by held-out mean squared prediction error.  The
    penalty with the smallest fold-averaged error (the larger penalty on ties)
    is refitted on all rows.
    """
    n = data.n_samples
    if partition is None:
        partition = fold_partition(n, folds, seed)
    gmax = gamma_max(data)
    G_full, c_full, yy_full = _sufficient_stats(data)
    if gmax == 0.0:
        fit, _ = _fit(G_full, c_full, yy_full, 0.0)
        return LassoFit(np.zeros(data.n_features), 0.0, 0, fit.objective,
                        penalty_grid=np.zeros(1), cv_errors=np.zeros(1))
    grid = penalty_path(gmax, grid_size)
    if n - max(len(p) for p in partition) > data.n_features:
        # every training fold is full rank, so the unpenalized fit is a valid candidate
        grid = np.append(grid, 0.0)

    errors = np.zeros(grid.shape[0])
    all_rows = np.arange(n)
    for held in partition:
        train = np.setdiff1d(all_rows, held, assume_unique=True)
        G, c, yy = _sufficient_stats(data.subset(train))
        W_te, V_te = data.design[held], data.response[held]
        theta = None
        for k, gamma in enumerate(grid):
            fit, _ = _fit(G, c, yy, gamma, start=theta)
            theta = fit.coefficients
            resid = V_te - W_te @ theta
            errors[k] += float(resid @ resid) / held.shape[0]
    errors /= len(partition)
    best = int(np.argmin(errors))

    theta = None
    for gamma in grid[: best + 1]:
        fit, _ = _fit(G_full, c_full, yy_full, gamma, start=theta)
        theta = fit.coefficients
    return LassoFit(fit.coefficients, fit.penalty, fit.support_size, fit.objective,
                    n_passes=fit.n_passes, kkt_residual=fit.kkt_residual,
                    penalty_grid=grid, cv_errors=errors)


__all__ = ["Dataset", "LassoFit", "lasso", "lasso_cv", "gamma_max", "fold_partition",
           "penalty_path"]
