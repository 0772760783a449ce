"""Command line interface: ``bounds``, ``fit``, ``simulate``, ``sweep``, ``table``.

Exit codes: 0 success, 2 configuration/usage error, 3 data error,
4 numerical error.
"""

import argparse
import sys

import numpy as np

from .exceptions import DataError, GeoTransferError, NumericalError
from .harness.config import FIELD_NAMES, load_config
from .harness.io import feature_names, ingest_csv, to_csv
from .harness.scenario import (
    CURVE_COLUMNS,
    SCENARIO_COLUMNS,
    TABLE_COLUMNS,
    comparison_table,
    curve_rows,
    misspecification_sweep,
    run_scenario,
    scenario_rows,
    table_rows,
)
from .minimax import ProblemSpec, alpha_star, bound_summary
from .pencil import GramPair, decompose
from .transfer import GeometricTransferRegressor

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


def _precision(text):
    if text.lower() == "full":
        return None
    digits = int(text)
    if not 1 <= digits <= 17:
        raise argparse.ArgumentTypeError("precision must be 1..17 or 'full'")
    return digits


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _scenario_config(args):
    overrides = {name: getattr(args, name) for name in FIELD_NAMES}
    return load_config(args.config, overrides)


def _load_lambdas(args):
    if args.lambdas is not None:
        return np.sort(np.array(_floats(args.lambdas)))[::-1]
    path = args.pencil_file
    if path.endswith(".npz"):
        with np.load(path) as data:
            if "eigenvalues" in data:
                return np.sort(np.asarray(data["eigenvalues"], dtype=float))[::-1]
            return decompose(GramPair(data["gram_source"], data["gram_target"])).eigenvalues
    values = np.loadtxt(path, delimiter=",", ndmin=1, comments="#")
    return np.sort(values.ravel())[::-1]


def cmd_bounds(args):
    lam = _load_lambdas(args)
    spec = ProblemSpec.from_radius(args.sigma_S2, args.sigma_T2, args.U)
    s = bound_summary(lam, spec)
    alloc = alpha_star(lam, spec)
    header = ("upper_bound", "lower_bound_plain", "lower_bound_improved", "source_only",
              "target_only", "pooling", "K_star")
    row = (s.upper, s.lower_plain, s.lower_improved, s.basic.source_only, s.basic.target_only,
           s.basic.pooling, alloc.K_star)
    _emit(to_csv(header, [row], args.precision), args.output)


def cmd_fit(args):
    source, target = ingest_csv(args.source, args.target, args.response)
    names = feature_names(args.source, args.response)
    reg = GeometricTransferRegressor(
        radius=args.U, sigma_source2=args.sigma_S2, sigma_target2=args.sigma_T2,
        target_estimator="lasso" if args.mode == "reid" else "ols",
        cv=args.folds, n_radii=args.grid_size, random_state=args.seed,
    ).fit(target.design, target.response, X_source=source.design, y_source=source.response)
    rows = [(n, c, w) for n, c, w in zip(names, reg.coef_, reg.weights_)]
    _emit(to_csv(("feature", "coefficient", "source_weight"), rows, args.precision), args.output)
    if args.report:
        rep = reg.tuning_report_
        summary = [("sigma_S2_hat", reg.sigma_source2_), ("sigma_T2_hat", reg.sigma_target2_),
                   ("U_hat", reg.radius_),
                   ("pilot_distance", rep.pilot_distance if rep else float("nan")),
                   ("worst_case_risk", reg.worst_case_risk_)]
        _emit(to_csv(("quantity", "value"), summary, args.precision), args.report)
    if args.curve and reg.tuning_report_ is not None:
        _emit(to_csv(("u_candidate", "cv_error"), reg.tuning_report_.cv_curve, args.precision),
              args.curve)


def cmd_simulate(args):
    report = run_scenario(_scenario_config(args))
    _emit(to_csv(SCENARIO_COLUMNS, scenario_rows(report), args.precision), args.output)


def cmd_sweep(args):
    points = misspecification_sweep(_scenario_config(args))
    _emit(to_csv(CURVE_COLUMNS, curve_rows(points), args.precision), args.output)


def cmd_table(args):
    base = _scenario_config(args)
    us = _floats(args.u_values) if args.u_values else [base.U_true]
    rows = comparison_table([base.replace(U_true=u) for u in us])
    _emit(to_csv(TABLE_COLUMNS, table_rows(rows), args.precision), args.output)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="geotransfer", description="Geometric model interpolation for transfer learning.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--output", "-o", default=None, help="output CSV path (default stdout)")
        p.add_argument("--precision", type=_precision, default=6,
                       help="significant digits in CSV output, or 'full'")

    p = sub.add_parser("bounds", help="closed-form bounds and basic-method risks")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--lambdas", help="comma-separated generalized eigenvalues")
    src.add_argument("--pencil-file", help=".npz with gram_source/gram_target or eigenvalues, "
                                           "or a text file of eigenvalues")
    p.add_argument("--sigma-S2", dest="sigma_S2", type=float, default=1.0)
    p.add_argument("--sigma-T2", dest="sigma_T2", type=float, default=1.0)
    p.add_argument("--U", type=float, required=True, help="discrepancy radius")
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("fit", help="fit the interpolation estimator on CSV data")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--response", required=True, help="name of the response column")
    p.add_argument("--U", type=float, default=None, help="fixed radius (default: CV)")
    p.add_argument("--sigma-S2", dest="sigma_S2", type=float, default=None)
    p.add_argument("--sigma-T2", dest="sigma_T2", type=float, default=None)
    p.add_argument("--mode", choices=("mle", "reid"), default="mle",
                   help="target fit: least squares or cross-validated Lasso")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--grid-size", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", default=None, help="write the tuning summary CSV here")
    p.add_argument("--curve", default=None, help="write the CV curve CSV here")
    common(p)
    p.set_defaults(func=cmd_fit)

    for name, func, helptext in (("simulate", cmd_simulate, "run one Monte-Carlo scenario"),
                                 ("sweep", cmd_sweep, "misspecification sweep over U_guess"),
                                 ("table", cmd_table, "comparison table over U values")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", default=None, help="key = value configuration file")
        for field in FIELD_NAMES:
            p.add_argument(f"--{field}", dest=field, default=None, metavar="VALUE")
        if name == "table":
            p.add_argument("--u-values", default=None, help="comma-separated U_true values")
        common(p)
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (DataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GeoTransferError, ValueError, KeyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
