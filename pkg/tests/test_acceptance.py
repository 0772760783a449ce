"""Acceptance criteria, one marked group per criterion.

Each group is tagged with ``criterion(n, title)``; the conftest hook prints
one PASS/FAIL line per criterion at the end of the run.
"""

import functools
import math
import time

import numpy as np
import pytest

from geotransfer import (
    Dataset,
    GlmSourceSpec,
    GlmTargetSpec,
    ProblemSpec,
    alpha_star,
    decompose,
    estimate_sigma_source,
    estimate_sigma_target,
    estimate_U_cv,
    gaussian_lower_bound,
    glm_interpolator_weights,
    glm_lower_bound,
    interpolate,
    ols_eigenbasis,
    optimal_weights,
)
from geotransfer.cli import main
from geotransfer.harness import (
    ScenarioConfig,
    comparison_table,
    misspecification_sweep,
    run_scenario,
)
from geotransfer.harness.scenario import _datasets, _loss, build_context
from geotransfer.minimax import (
    GLM_LOWER_CONSTANT,
    LECAM_CONSTANT,
    bound_summary,
    glm_interpolator_costs,
    spectral_gap_relaxation,
)
from geotransfer.seeding import make_rng

from conftest import random_pair, simplex_grid

SMALL_BASELINE = dict(d=5, n_S=200, n_T=100, sigma_S2=1.0, sigma_T2=1.0)
MC_REPS = 20000


def random_instance(rng, d_max=20, equal_sigma=False):
    d = int(rng.integers(1, d_max + 1))
    lam = decompose(random_pair(rng, d)).eigenvalues
    s_S2 = math.exp(rng.uniform(-3, 3))
    s_T2 = s_S2 if equal_sigma else math.exp(rng.uniform(-3, 3))
    return lam, ProblemSpec(s_S2, s_T2, math.exp(rng.uniform(-6, 6)))


# -- 1 ------------------------------------------------------------------------------


@pytest.mark.criterion(1, "water-filling correctness")
def test_water_filling(record_property):
    start = time.perf_counter()
    rng = np.random.default_rng(101)
    worst_sum = worst_level = 0.0
    for _ in range(1000):
        lam, spec = random_instance(rng)
        alloc = alpha_star(lam, spec)
        a = alloc.alpha
        worst_sum = max(worst_sum, abs(math.fsum(a) - 1.0))
        assert np.all(a >= 0) and np.all(np.diff(a) <= 0)
        level = alloc.water_level(lam, spec)[: alloc.K_star + 1]
        worst_level = max(worst_level, np.ptp(level) / level.max())
    assert worst_sum <= 1e-10 and worst_level <= 1e-9

    grids = {2: simplex_grid(2, 1e-3), 3: simplex_grid(3, 1e-3)}
    worst_gap = 0.0
    for _ in range(200):
        d = int(rng.integers(2, 4))
        lam = np.sort(np.exp(rng.uniform(-2, 2, d)))[::-1]
        spec = ProblemSpec(math.exp(rng.uniform(-1, 1)), math.exp(rng.uniform(-1, 1)),
                           math.exp(rng.uniform(-2, 2)))
        level = grids[d] * spec.U2 + spec.sigma_S2 / lam
        objective = np.sum(1.0 / (1.0 / spec.sigma_T2 + 1.0 / level), axis=1)
        oracle = grids[d][np.argmax(objective)]
        worst_gap = max(worst_gap, np.max(np.abs(alpha_star(lam, spec).alpha - oracle)))
    elapsed = time.perf_counter() - start
    record_property("detail", f"sum err {worst_sum:.1e}, level err {worst_level:.1e}, "
                              f"grid gap {worst_gap:.1e}, {elapsed:.1f}s")
    assert worst_gap <= 2e-3
    assert elapsed < 30


# -- 2 and 3 ------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def small_baseline(U, adversary, estimators):
    cfg = ScenarioConfig(**SMALL_BASELINE, U_true=U, adversary=adversary,
                         estimator_set=estimators, replications=MC_REPS, seed=2024)
    return run_scenario(cfg)


@pytest.mark.slow
@pytest.mark.criterion(2, "closed-form upper bound vs Monte Carlo")
@pytest.mark.parametrize("U", [0.5, 1.0, 2.5])
def test_upper_bound_monte_carlo(U, record_property):
    rep = small_baseline(U, "nash", ("proposed", "source_only", "target_only"))
    p = rep.report("proposed")
    z = (p.mean_loss - rep.bounds.upper) / p.std_error
    record_property("detail", f"U={U}: mean {p.mean_loss:.4f} vs B {rep.bounds.upper:.4f} "
                              f"(z={z:+.2f})")
    assert abs(z) <= 3
    assert rep.runtime_seconds < 120


@pytest.mark.slow
@pytest.mark.criterion(3, "basic-approach closed forms")
@pytest.mark.parametrize("U", [0.5, 1.0, 2.5])
def test_basic_closed_forms(U, record_property):
    nash = small_baseline(U, "nash", ("proposed", "source_only", "target_only"))
    pool = small_baseline(U, "pooling_worst", ("pooling",))
    basic = nash.bounds.basic
    checks = [(nash.report("source_only"), basic.source_only),
              (nash.report("target_only"), basic.target_only),
              (pool.report("pooling"), pool.bounds.basic.pooling)]
    zs = [(r.mean_loss - ref) / r.std_error for r, ref in checks]
    record_property("detail", f"U={U}: z = " + ", ".join(f"{z:+.2f}" for z in zs))
    assert all(abs(z) <= 3 for z in zs)


# -- 4 ------------------------------------------------------------------------------


@pytest.mark.criterion(4, "bound ordering")
def test_bound_ordering(record_property):
    start = time.perf_counter()
    rng = np.random.default_rng(404)
    for _ in range(1000):
        lam, spec = random_instance(rng)
        s = bound_summary(lam, spec)
        assert abs(s.lower_plain - LECAM_CONSTANT * s.upper) <= 1e-12 * s.upper
        assert s.lower_plain <= s.lower_improved <= s.upper < lam.shape[0] * spec.sigma_T2
        assert s.upper <= s.basic.pooling
    for _ in range(1000):
        lam, spec = random_instance(rng, equal_sigma=True)
        relax = spectral_gap_relaxation(lam[0], spec.sigma_S2, spec.U2, lam.shape[0])
        # equality holds for d = 1, so compare up to rounding
        assert bound_summary(lam, spec).upper >= relax * (1 - 1e-12)
    elapsed = time.perf_counter() - start
    record_property("detail", f"2000 instances in {elapsed:.1f}s")
    assert elapsed < 10


# -- 5 ------------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def curve_sweep(U_true):
    cfg = ScenarioConfig(U_true=U_true, replications=1000, seed=7,
                         U_guess_grid="linspace(0, 3, 13)")
    start = time.perf_counter()
    points = misspecification_sweep(cfg)
    return points, time.perf_counter() - start


def nearest(points, u):
    return min(points, key=lambda p: abs(p.u_guess - u))


@pytest.mark.slow
@pytest.mark.criterion(5, "misspecification curve orderings")
def test_misspecification_curves(record_property):
    gaps, elapsed = [], 0.0
    for u in (0.5, 1.5, 2.5):
        points, secs = curve_sweep(u)
        elapsed += secs
        p = nearest(points, u)
        gaps.append(p.gap.mean_loss)
        margin = 3 * max(p.proposed.std_error, p.gap.std_error)
        record_property("detail", f"U={u}: gap {p.gap.mean_loss:.3f} (3SE {margin:.3f})")
        if u >= 1.5:
            assert p.gap.mean_loss >= margin
    assert gaps[0] < gaps[1] < gaps[2]
    assert elapsed < 600


# -- 6 ------------------------------------------------------------------------------

TABLE_US = (0.5, 3.5, 4.5, 5.5, 6.5, 7.5, 8.5, 9.5)


@functools.lru_cache(maxsize=None)
def table_rows():
    base = ScenarioConfig(target_basis="original", tuning_mode="estimated", replications=200,
                          seed=2024)
    start = time.perf_counter()
    rows = comparison_table([base.replace(U_true=u) for u in TABLE_US])
    return rows, time.perf_counter() - start


@pytest.mark.slow
@pytest.mark.criterion(6, "comparison table orderings")
def test_table_orderings(record_property):
    rows, elapsed = table_rows()
    for row in rows:
        se = math.hypot(row.proposed_se, row.basic_se)
        record_property("detail", f"U={row.u}: basic {row.basic_min:.2f} "
                                  f"proposed {row.proposed_mean:.2f}")
        if row.u == 0.5:
            assert row.basic_min <= row.proposed_mean + 3 * row.proposed_se
        else:
            assert row.basic_min - row.proposed_mean >= 3 * se
    assert elapsed < 900


# -- 7 ------------------------------------------------------------------------------


def refined_simplex_argmin(a):
    """Grid search over the 4-simplex: step 1e-2 globally, then 1e-3 around the best point."""
    coarse = simplex_grid(4, 1e-2)
    best = coarse[np.argmin(coarse ** 2 @ a)]
    offs = np.arange(-10, 11) * 1e-3
    g = np.stack(np.meshgrid(offs, offs, offs, indexing="ij"), -1).reshape(-1, 3) + best[:3]
    g = np.round(g, 3)
    last = np.round(1.0 - g.sum(axis=1), 3)
    ok = np.all(g >= 0, axis=1) & (last >= 0)
    fine = np.column_stack([g[ok], last[ok]])
    return fine[np.argmin(fine ** 2 @ a)]


@pytest.mark.criterion(7, "GLM bound evaluators")
def test_glm_bounds(record_property):
    start = time.perf_counter()
    rng = np.random.default_rng(707)
    for _ in range(200):
        M, d = int(rng.integers(1, 4)), int(rng.integers(1, 40))
        U2s, s2s, lmax = rng.uniform(0, 5, M), rng.uniform(0.1, 3, M), rng.uniform(0.5, 20, M)
        s_T2 = float(rng.uniform(0.1, 3))
        closed = GLM_LOWER_CONSTANT * d / (
            sum(1.0 / (u / d + s / l) for u, s, l in zip(U2s, s2s, lmax)) + 1.0 / s_T2)
        specs = [GlmSourceSpec(u, s, 1.0, 1.0, l, l) for u, s, l in zip(U2s, s2s, lmax)]
        target = GlmTargetSpec(s_T2, 1.0, 1.0, d)
        assert glm_lower_bound(specs, target) == gaussian_lower_bound(U2s, s2s, lmax, s_T2, d)
        assert glm_lower_bound(specs, target) == pytest.approx(closed, rel=1e-13)
        for m in range(M):
            up = list(specs)
            s = specs[m]
            up[m] = GlmSourceSpec(s.U2 * 1.5 + 0.1, s.dispersion, 1.0, 1.0, s.lambda_max,
                                  s.lambda_min)
            assert glm_lower_bound(up, target) > glm_lower_bound(specs, target)

    grids = {2: simplex_grid(2, 1e-3), 3: simplex_grid(3, 1e-3)}
    worst = 0.0
    for k in range(30):
        M = k % 3 + 1
        sources = [GlmSourceSpec(float(rng.uniform(0, 3)), float(rng.uniform(0.2, 2)), 1.5, 0.8,
                                 float(rng.uniform(2, 10)), float(rng.uniform(0.5, 2)))
                   for _ in range(M)]
        target = GlmTargetSpec(float(rng.uniform(0.2, 2)), 1.5, 0.8, int(rng.integers(1, 6)))
        a = glm_interpolator_costs(sources, target)
        oracle = (grids[M + 1][np.argmin(grids[M + 1] ** 2 @ a)] if M < 3
                  else refined_simplex_argmin(a))
        t, _ = glm_interpolator_weights(sources, target)
        worst = max(worst, np.max(np.abs(t - oracle)))
    elapsed = time.perf_counter() - start
    record_property("detail", f"grid gap {worst:.1e}, {elapsed:.1f}s")
    assert worst <= 2e-3
    assert elapsed < 5


# -- 8 ------------------------------------------------------------------------------


@pytest.mark.slow
@pytest.mark.criterion(8, "tuning robustness")
def test_tuning_robustness(record_property):
    start = time.perf_counter()
    base = ScenarioConfig(U_true=2.5, replications=200, seed=808, estimator_set=("proposed",))
    oracle = run_scenario(base).report("proposed").mean_loss
    estimated = run_scenario(base.replace(tuning_mode="estimated")).report("proposed").mean_loss

    # isolate U: same estimated noise variances, true radius vs cross-validated radius
    ctx = build_context(base)
    at_true, at_hat = [], []
    for r in range(base.replications):
        source, target, rep_seed = _datasets(ctx, r)
        s_S2, s_T2 = estimate_sigma_source(source), estimate_sigma_source(target)
        U_hat = estimate_U_cv(source, target, seed=rep_seed, sigma_S2=s_S2,
                              sigma_T2=s_T2).U_hat
        b_S = ols_eigenbasis(source, ctx.decomp, "source")
        b_T = ols_eigenbasis(target, ctx.decomp, "target")
        for U, out in ((base.U_true, at_true), (U_hat, at_hat)):
            w = optimal_weights(ctx.decomp.eigenvalues, ProblemSpec(s_S2, s_T2, U * U))
            out.append(_loss(ctx, interpolate(b_S, b_T, w, ctx.decomp)))
    ratio_full = estimated / oracle
    ratio_u = math.fsum(at_hat) / math.fsum(at_true)
    record_property("detail", f"estimated/oracle {ratio_full:.3f}, U_hat/U_true {ratio_u:.3f}")
    assert ratio_full <= 1.2 and ratio_u <= 1.2

    src_est = []
    for s in range(100):
        r = make_rng(s)
        X = r.standard_normal((10000, 5))
        y = X @ np.ones(5) + math.sqrt(2.0) * r.standard_normal(10000)
        src_est.append(estimate_sigma_source(Dataset(X, y)))
    assert np.all(np.abs(np.array(src_est) / 2.0 - 1.0) <= 0.1)
    mle = []
    for s in range(200):
        r = make_rng(s)
        W = r.standard_normal((100, 20))
        mle.append(estimate_sigma_target(Dataset(W, W @ np.ones(20) + r.standard_normal(100))))
    assert abs(np.mean(mle) / 0.8 - 1.0) <= 0.05
    theta = np.r_[np.ones(20), np.zeros(80)]
    reid = []
    for s in range(100):
        r = make_rng(s)
        W = r.standard_normal((100, 100))
        reid.append(estimate_sigma_target(Dataset(W, W @ theta + r.standard_normal(100)),
                                          "reid", seed=s))
    record_property("detail", f"sigma means: mle {np.mean(mle):.3f}, reid {np.mean(reid):.3f}")
    assert abs(np.mean(reid) - 1.0) <= 0.3
    assert time.perf_counter() - start < 600


# -- 9 ------------------------------------------------------------------------------


def cli_output(tmp_path, name, argv):
    out = tmp_path / name
    assert main([*argv, "--precision", "full", "-o", str(out)]) == 0
    return out.read_bytes()


@pytest.fixture
def csv_pair(tmp_path):
    r = make_rng(99)
    paths = []
    for name, n in (("src.csv", 200), ("tgt.csv", 50)):
        X = r.standard_normal((n, 4))
        y = X @ np.array([1.0, 0.0, -1.0, 2.0]) + r.standard_normal(n)
        rows = ["f1,f2,f3,f4,y"] + [",".join(repr(float(v)) for v in (*x, t))
                                    for x, t in zip(X, y)]
        (tmp_path / name).write_text("\n".join(rows) + "\n")
        paths.append(str(tmp_path / name))
    return paths


@pytest.mark.criterion(9, "determinism")
def test_determinism(tmp_path, csv_pair, record_property):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("d = 6\nn_S = 120\nn_T = 40\nreplications = 24\nseed = 909\n"
                   "tuning_mode = estimated\ncv_grid_size = 6\n"
                   "estimator_set = proposed, proposed_lasso, source_only, target_only, pooling\n"
                   "U_guess_grid = linspace(0, 3, 7)\n")
    commands = {
        "bounds": ["bounds", "--lambdas", "9,4,1,0.5", "--U", "1.3", "--sigma-S2", "0.7"],
        "fit": ["fit", "--source", csv_pair[0], "--target", csv_pair[1], "--response", "y"],
        "fit_lasso": ["fit", "--source", csv_pair[0], "--target", csv_pair[1],
                      "--response", "y", "--mode", "reid"],
        "simulate": ["simulate", "--config", str(cfg)],
        "sweep": ["sweep", "--config", str(cfg)],
        "table": ["table", "--config", str(cfg), "--u-values", "0.5,2"],
    }
    checked = 0
    for name, argv in commands.items():
        first = cli_output(tmp_path, f"{name}_a.csv", argv)
        assert first == cli_output(tmp_path, f"{name}_b.csv", argv)
        if name in ("simulate", "sweep", "table"):
            parallel = cli_output(tmp_path, f"{name}_p.csv", [*argv, "--n_jobs", "4"])
            assert parallel == first
            checked += 1
    record_property("detail", f"{len(commands)} commands rerun bitwise, "
                              f"{checked} parallel/sequential pairs identical")
