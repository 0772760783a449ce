"""Monte-Carlo scenario execution.

Designs are drawn once per scenario from ``(seed, STREAM_DESIGN, 0/1)`` and
held fixed; replication ``r`` resamples both response vectors from seeds
derived from ``(seed, STREAM_REPLICATION, r)``.  Replications are
independent, so they may run on a thread pool; results are always
aggregated in replication-index order with exactly rounded sums.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..estimators import Dataset, interpolate, ols_eigenbasis, pooling
from ..exceptions import ConfigInvalid
from ..lasso import lasso_cv
from ..minimax import (
    ProblemSpec,
    alpha_star,
    bound_summary,
    nash_adversary,
    optimal_weights,
    pooling_adversary,
)
from ..pencil import GramPair, decompose, from_eigenbasis, to_eigenbasis
from ..seeding import STREAM_DESIGN, STREAM_FOLDS, STREAM_REPLICATION, derive_seed
from ..tuning import estimate_sigma_source, estimate_U_cv, sigma_from_lasso
from .config import resolve_beta
from .design import generate_design, sample_responses


@dataclass(frozen=True)
class RiskReport:
    estimator_name: str
    mean_loss: float
    std_loss: float
    std_error: float
    replications: int

    @classmethod
    def from_losses(cls, name, losses):
        losses = np.asarray(losses, dtype=float)
        R = losses.shape[0]
        mean = math.fsum(losses) / R
        if R > 1:
            std = math.sqrt(math.fsum((losses - mean) ** 2) / (R - 1))
        else:
            std = 0.0
        return cls(name, mean, std, std / math.sqrt(R), R)


@dataclass(frozen=True)
class ScenarioReport:
    config: object
    per_estimator: list
    bounds: object
    runtime_seconds: float
    losses: dict = field(default_factory=dict, repr=False)
    eigen_losses: dict = field(default_factory=dict, repr=False)

    def report(self, name):
        for rep in self.per_estimator:
            if rep.estimator_name == name:
                return rep
        raise KeyError(name)


@dataclass
class _Context:
    config: object
    X: np.ndarray
    W: np.ndarray
    decomp: object
    spec: ProblemSpec
    beta_T: np.ndarray
    beta_S: np.ndarray
    theta_T: np.ndarray
    theta_S: np.ndarray
    oracle_weights: object


def build_context(config):
    """Draw the fixed designs and place the source parameter at the chosen adversary."""
    c = config
    X = generate_design(c.n_S, c.d, c.design_kind_source, derive_seed(c.seed, STREAM_DESIGN, 0))
    W = generate_design(c.n_T, c.d, c.design_kind_target, derive_seed(c.seed, STREAM_DESIGN, 1))
    decomp = decompose(GramPair(X.T @ X, W.T @ W))
    spec = ProblemSpec.from_radius(c.sigma_S2, c.sigma_T2, c.U_true)

    base = resolve_beta(c.beta_T_spec, c.d)
    beta_T = base if c.target_basis == "eigen" else to_eigenbasis(base, decomp)
    lam = decomp.eigenvalues
    if c.adversary == "nash":
        beta_S = nash_adversary(beta_T, alpha_star(lam, spec), c.U_true)
    else:
        beta_S = pooling_adversary(beta_T, lam, c.U_true)
    return _Context(
        config=c, X=X, W=W, decomp=decomp, spec=spec, beta_T=beta_T, beta_S=beta_S,
        theta_T=from_eigenbasis(beta_T, decomp), theta_S=from_eigenbasis(beta_S, decomp),
        oracle_weights=optimal_weights(lam, spec),
    )


def _datasets(ctx, r):
    c = ctx.config
    rep_seed = derive_seed(c.seed, STREAM_REPLICATION, r)
    Y = sample_responses(ctx.X, ctx.theta_S, c.sigma_S2, derive_seed(rep_seed, 0, 0))
    V = sample_responses(ctx.W, ctx.theta_T, c.sigma_T2, derive_seed(rep_seed, 0, 1))
    return Dataset(ctx.X, Y), Dataset(ctx.W, V), rep_seed


def _loss(ctx, theta):
    diff = theta - ctx.theta_T
    return float(diff @ ctx.decomp.gram_target @ diff)


def _tuned_weights(ctx, source, target, rep_seed, mode, lasso_fit=None):
    c = ctx.config
    if c.tuning_mode == "oracle":
        return ctx.oracle_weights
    sigma_S2 = estimate_sigma_source(source)
    if mode == "reid":
        sigma_T2 = sigma_from_lasso(target, lasso_fit)
    else:
        sigma_T2 = estimate_sigma_source(target)
    report = estimate_U_cv(
        source, target, c.cv_folds, c.cv_grid_size, derive_seed(rep_seed, STREAM_FOLDS, 0),
        sigma_S2=sigma_S2, sigma_T2=sigma_T2, target_mode=mode,
        lasso_penalty=None if lasso_fit is None else lasso_fit.penalty,
    )
    floor = np.finfo(float).eps
    spec = ProblemSpec(max(sigma_S2, floor), max(sigma_T2, floor), report.U_hat ** 2)
    return optimal_weights(ctx.decomp.eigenvalues, spec)


def _replicate(ctx, r):
    """Losses (original metric) and eigen-coordinate losses of one replication."""
    source, target, rep_seed = _datasets(ctx, r)
    dec = ctx.decomp
    b_S = ols_eigenbasis(source, dec, "source")
    b_T = ols_eigenbasis(target, dec, "target")
    losses, eigen = {}, {}
    for name in ctx.config.estimator_set:
        if name == "source_only":
            theta = from_eigenbasis(b_S, dec)
        elif name == "target_only":
            theta = from_eigenbasis(b_T, dec)
        elif name == "pooling":
            theta = pooling(source, target)
        elif name == "proposed":
            t = _tuned_weights(ctx, source, target, rep_seed, "mle")
            beta = t.t * b_S + (1.0 - t.t) * b_T
            eigen[name] = float(np.sum((beta - ctx.beta_T) ** 2))
            theta = interpolate(b_S, b_T, t, dec)
        else:  # proposed_lasso
            fit = lasso_cv(target, ctx.config.cv_folds, ctx.config.lasso_grid_size,
                           derive_seed(rep_seed, STREAM_FOLDS, 1))
            b_TL = to_eigenbasis(fit.coefficients, dec)
            t = _tuned_weights(ctx, source, target, rep_seed, "reid", lasso_fit=fit)
            beta = t.t * b_S + (1.0 - t.t) * b_TL
            eigen[name] = float(np.sum((beta - ctx.beta_T) ** 2))
            theta = interpolate(b_S, b_TL, t, dec)
        losses[name] = _loss(ctx, theta)
    return losses, eigen


def _map_replications(fn, R, n_jobs):
    if n_jobs <= 1:
        return [fn(r) for r in range(R)]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, range(R)))


def run_scenario(config, n_jobs=None):
    """Run all replications of a scenario and attach the closed-form bounds.

    Returns
    -------
    ScenarioReport
        One :class:`RiskReport` per requested estimator, in the order of
        ``config.estimator_set``; ``losses`` holds the per-replication values.
    """
    start = time.perf_counter()
    ctx = build_context(config)
    n_jobs = config.n_jobs if n_jobs is None else n_jobs
    results = _map_replications(lambda r: _replicate(ctx, r), config.replications, n_jobs)
    losses = {name: np.array([res[0][name] for res in results])
              for name in config.estimator_set}
    eigen = {name: np.array([res[1][name] for res in results])
             for name in config.estimator_set if name in results[0][1]}
    reports = [RiskReport.from_losses(name, losses[name]) for name in config.estimator_set]
    return ScenarioReport(
        config=config,
        per_estimator=reports,
        bounds=bound_summary(ctx.decomp.eigenvalues, ctx.spec),
        runtime_seconds=time.perf_counter() - start,
        losses=losses,
        eigen_losses=eigen,
    )


@dataclass(frozen=True)
class SweepPoint:
    u_guess: float
    proposed: RiskReport
    pooling: RiskReport
    gap: RiskReport  # paired pooling-minus-proposed differences


def misspecification_sweep(config, n_jobs=None):
    """Proposed-estimator risk as a function of the assumed radius ``U_guess``.

    Noise variances are the true ones.  Every grid point reuses the same
    designs and replication seeds, so curves are paired.
    """
    if not config.U_guess_grid:
        raise ConfigInvalid("misspecification_sweep needs a non-empty U_guess_grid")
    ctx = build_context(config)
    lam = ctx.decomp.eigenvalues
    weights = [optimal_weights(lam, ProblemSpec(config.sigma_S2, config.sigma_T2, u * u))
               for u in config.U_guess_grid]

    def one(r):
        source, target, _ = _datasets(ctx, r)
        b_S = ols_eigenbasis(source, ctx.decomp, "source")
        b_T = ols_eigenbasis(target, ctx.decomp, "target")
        prop = [_loss(ctx, interpolate(b_S, b_T, w, ctx.decomp)) for w in weights]
        return prop, _loss(ctx, pooling(source, target))

    n_jobs = config.n_jobs if n_jobs is None else n_jobs
    results = _map_replications(one, config.replications, n_jobs)
    prop = np.array([res[0] for res in results])
    pool = np.array([res[1] for res in results])
    pool_report = RiskReport.from_losses("pooling", pool)
    return [
        SweepPoint(
            u_guess=float(u),
            proposed=RiskReport.from_losses("proposed", prop[:, k]),
            pooling=pool_report,
            gap=RiskReport.from_losses("gap", pool - prop[:, k]),
        )
        for k, u in enumerate(config.U_guess_grid)
    ]


BASIC = ("source_only", "target_only", "pooling")


@dataclass(frozen=True)
class TableRow:
    u: float
    basic_min: float
    basic_label: str
    basic_se: float
    proposed_mean: float
    proposed_std: float
    proposed_se: float
    upper_bound: float
    lower_bound_plain: float
    lower_bound_improved: float


def comparison_table(configs, n_jobs=None):
    """One row per scenario: best basic method, proposed mean (std), and bounds."""
    rows = []
    for config in configs:
        wanted = tuple(dict.fromkeys(BASIC + ("proposed",) + tuple(config.estimator_set)))
        report = run_scenario(config.replace(estimator_set=wanted), n_jobs=n_jobs)
        basic = min((report.report(name) for name in BASIC), key=lambda rep: rep.mean_loss)
        prop = report.report("proposed")
        rows.append(TableRow(
            u=config.U_true,
            basic_min=basic.mean_loss,
            basic_label=basic.estimator_name,
            basic_se=basic.std_error,
            proposed_mean=prop.mean_loss,
            proposed_std=prop.std_loss,
            proposed_se=prop.std_error,
            upper_bound=report.bounds.upper,
            lower_bound_plain=report.bounds.lower_plain,
            lower_bound_improved=report.bounds.lower_improved,
        ))
    return rows


CURVE_COLUMNS = ("u_guess", "proposed_mean", "proposed_se", "pooling_mean", "pooling_se")
TABLE_COLUMNS = ("u", "basic_min", "proposed_mean", "proposed_std", "upper_bound",
                 "lower_bound_plain", "lower_bound_improved")
SCENARIO_COLUMNS = ("estimator", "mean_loss", "std_loss", "std_error", "replications",
                    "upper_bound", "lower_bound_plain", "lower_bound_improved")


def curve_rows(points):
    return [(p.u_guess, p.proposed.mean_loss, p.proposed.std_error, p.pooling.mean_loss,
             p.pooling.std_error) for p in points]


def table_rows(rows):
    return [(r.u, r.basic_min, r.proposed_mean, r.proposed_std, r.upper_bound,
             r.lower_bound_plain, r.lower_bound_improved) for r in rows]


def scenario_rows(report):
    b = report.bounds
    return [(rep.estimator_name, rep.mean_loss, rep.std_loss, rep.std_error, rep.replications,
             b.upper, b.lower_plain, b.lower_improved) for rep in report.per_estimator]
