"""Command-line front end.

Subcommands:

* ``fit`` -- calibrate and fit one method on a dataset CSV.
* ``simulate`` -- run a factorial simulation study from a YAML config.
* ``replicate-fig1`` -- the single-sample CV-curve vs. test-error experiment.
* ``gen-data`` -- write synthetic dataset or covariance CSVs.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure. Every run is deterministic given its seed; rerunning a command with
identical flags reproduces its output files byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .calibration import (
    LASSO_CV,
    NESTED_CV,
    OLS,
    RIDGE_CV,
    SIMPLE_CV,
    UNIT,
    WeightScheme,
    adaptive_lasso,
)
from .core import (
    ConfigError,
    DataError,
    NumericalError,
    read_dataset_csv,
    seeded_rng,
    write_dataset_csv,
)
from .datagen import (
    CovarianceSpec,
    SimDesign,
    draw_beta_star,
    sample_dataset,
    standin_covariance,
)
from .experiments import (
    config_stamp,
    load_experiment_config,
    replicate_fig1,
    run_simulation,
    write_fig1_outputs,
    write_rows_csv,
    write_simulation_outputs,
)
from .solvers import SolverConfig

__all__ = ["main", "build_parser"]

_FIT_METHODS = {
    "lasso": UNIT,
    "one-step": LASSO_CV,
    "ridge-adaptive": RIDGE_CV,
    "ols-adaptive": OLS,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adalasso",
        description="Weighted (adaptive) lasso with simple or nested CV calibration.",
    )
    parser.add_argument("--version", action="version",
                        version=f"adalasso {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="calibrate and fit one method on a CSV dataset")
    fit.add_argument("--data", required=True,
                     help="dataset CSV: first column y, remaining columns X")
    fit.add_argument("--header", action="store_true",
                     help="dataset CSV has one header row")
    fit.add_argument("--method", required=True, choices=sorted(_FIT_METHODS),
                     help="estimator family")
    fit.add_argument("--cv", choices=[SIMPLE_CV, NESTED_CV], default=None,
                     help="calibration scheme (default: simple for lasso, "
                          "nested for adaptive methods)")
    fit.add_argument("--epsilon", type=float, default=0.0,
                     help="weight offset in w = 1/(|b|+epsilon) (default 0)")
    fit.add_argument("--k-folds", type=int, default=10)
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--n-lambdas", type=int, default=100)
    fit.add_argument("--min-ratio", type=float, default=None,
                     help="path floor as a fraction of lambda_max "
                          "(default 1e-4 if n > p else 1e-2)")
    fit.add_argument("--path-unit-weights", action="store_true",
                     help="build the nested-CV penalty path with unit weights")
    _add_solver_flags(fit)
    fit.add_argument("--out", required=True, help="output directory")

    sim = sub.add_parser("simulate", help="run a factorial simulation study")
    sim.add_argument("--config", required=True, help="YAML experiment config")
    sim.add_argument("--out", default=None,
                     help="override the config's output_dir")

    fig1 = sub.add_parser(
        "replicate-fig1",
        help="single-sample comparison of CV curves against test error",
    )
    fig1.add_argument("--n", type=int, default=400)
    fig1.add_argument("--p", type=int, default=400)
    fig1.add_argument("--p0", type=int, default=10)
    fig1.add_argument("--beta", type=float, default=0.5)
    fig1.add_argument("--k-folds", type=int, default=10)
    fig1.add_argument("--test-size", type=int, default=10_000)
    fig1.add_argument("--seed", type=int, default=0)
    fig1.add_argument("--epsilon", type=float, default=0.0)
    fig1.add_argument("--n-lambdas", type=int, default=100)
    fig1.add_argument("--min-ratio", type=float, default=None)
    _add_solver_flags(fig1)
    fig1.add_argument("--out", required=True, help="output directory")

    gen = sub.add_parser("gen-data", help="write synthetic CSV inputs")
    gen.add_argument("kind", choices=["dataset", "covariance"])
    gen.add_argument("--out", required=True, help="output CSV path")
    gen.add_argument("--n", type=int, default=100, help="dataset rows")
    gen.add_argument("--p", type=int, default=20)
    gen.add_argument("--p0", type=int, default=5)
    gen.add_argument("--beta", type=float, default=1.0)
    gen.add_argument("--cov", default="identity",
                     help="identity | ar:RHO | file:PATH")
    gen.add_argument("--noise-sd", type=float, default=1.0)
    gen.add_argument("--support", choices=["first", "random"], default="first")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--header", action="store_true",
                     help="write a header row in the dataset CSV")
    gen.add_argument("--test-out", default=None,
                     help="also write an independent test dataset here")
    gen.add_argument("--test-size", type=int, default=1000)
    gen.add_argument("--rho", type=float, default=0.6,
                     help="decay of the generated covariance matrix")
    return parser


def _add_solver_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--tol", type=float, default=1e-7)
    sub.add_argument("--max-sweeps", type=int, default=100_000)
    sub.add_argument("--no-standardize", action="store_true",
                     help="fit on raw columns instead of unit-variance scaling")
    sub.add_argument("--intercept", action="store_true",
                     help="fit an unpenalized intercept")


def _solver_config(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(
        tol=args.tol,
        max_sweeps=args.max_sweeps,
        standardize=not args.no_standardize,
        intercept=args.intercept,
    )


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------

def _cmd_fit(args: argparse.Namespace) -> int:
    kind = _FIT_METHODS[args.method]
    cv = args.cv
    if cv is None:
        cv = SIMPLE_CV if kind == UNIT else NESTED_CV
    cfg = _solver_config(args)
    data = read_dataset_csv(args.data, has_header=args.header)
    rng = seeded_rng(args.seed)
    fit = adaptive_lasso(
        data, WeightScheme(kind, args.epsilon), cv, args.k_folds, cfg, rng,
        n_lambdas=args.n_lambdas, min_ratio=args.min_ratio,
        path_unit_weights=args.path_unit_weights,
    )

    os.makedirs(args.out, exist_ok=True)
    stamp = config_stamp("fit", {
        "data": args.data, "header": args.header, "method": args.method,
        "cv": cv, "epsilon": args.epsilon, "k_folds": args.k_folds,
        "seed": args.seed, "n_lambdas": args.n_lambdas,
        "min_ratio": args.min_ratio,
        "path_unit_weights": args.path_unit_weights,
        "solver": {"tol": cfg.tol, "max_sweeps": cfg.max_sweeps,
                   "standardize": cfg.standardize, "intercept": cfg.intercept},
        "out": args.out,
    })

    write_rows_csv(
        os.path.join(args.out, "coefficients.csv"),
        [{"coordinate": j, "coefficient": float(b)}
         for j, b in enumerate(fit.beta)],
        ["coordinate", "coefficient"],
        stamp,
    )
    write_rows_csv(
        os.path.join(args.out, "weights.csv"),
        [{"coordinate": j, "weight": float(w)}
         for j, w in enumerate(fit.weights_used)],
        ["coordinate", "weight"],
        stamp,
    )
    curve = fit.curve
    curve_rows = []
    for r in range(curve.lambdas.shape[0]):
        row = {
            "index": r,
            "lambda": float(curve.lambdas[r]),
            "mean_error": float(curve.mean_errors[r]),
            "selected": int(r == curve.selected_index),
        }
        for k in range(curve.fold_errors.shape[1]):
            row[f"fold_{k}"] = float(curve.fold_errors[r, k])
        curve_rows.append(row)
    curve_fields = (["index", "lambda", "mean_error", "selected"]
                    + [f"fold_{k}" for k in range(curve.fold_errors.shape[1])])
    write_rows_csv(os.path.join(args.out, "cv_curve.csv"),
                   curve_rows, curve_fields, stamp)

    report = {
        "config": stamp,
        "n": data.n,
        "p": data.p,
        "cv_scheme": fit.cv_scheme,
        "lambda_selected": fit.lambda_selected,
        "selected_index": fit.curve.selected_index,
        "intercept": fit.intercept,
        "support_size": int(np.count_nonzero(fit.beta)),
    }
    with open(os.path.join(args.out, "report.json"), "w",
              encoding="utf-8") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(f"fit: wrote coefficients.csv, weights.csv, cv_curve.csv, "
          f"report.json to {args.out}")
    print(f"fit: cv={fit.cv_scheme} lambda={fit.lambda_selected!r} "
          f"support={report['support_size']}")
    return 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def _cmd_simulate(args: argparse.Namespace) -> int:
    try:
        config = load_experiment_config(args.config)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    if args.out is not None:
        config = replace(config, output_dir=args.out)
    rows = run_simulation(config)
    results_path, summary_path = write_simulation_outputs(config, rows)
    print(f"simulate: {len(rows)} rows -> {results_path}")
    print(f"simulate: summary -> {summary_path}")
    return 0


# ---------------------------------------------------------------------------
# replicate-fig1
# ---------------------------------------------------------------------------

def _cmd_fig1(args: argparse.Namespace) -> int:
    result = replicate_fig1(
        n=args.n, p=args.p, p0=args.p0, beta_mag=args.beta,
        n_folds=args.k_folds, test_size=args.test_size, seed=args.seed,
        epsilon=args.epsilon, n_lambdas=args.n_lambdas,
        min_ratio=args.min_ratio, cfg=_solver_config(args),
    )
    paths = write_fig1_outputs(result, args.out)
    for path in paths:
        print(f"replicate-fig1: wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# gen-data
# ---------------------------------------------------------------------------

def _parse_cov_flag(value: str) -> CovarianceSpec:
    if value == "identity":
        return CovarianceSpec.identity()
    if value.startswith("ar:"):
        try:
            return CovarianceSpec.ar_decay(float(value[3:]))
        except ValueError:
            raise ConfigError(f"bad ar covariance spec {value!r}") from None
    if value.startswith("file:"):
        return CovarianceSpec.from_file(value[5:])
    raise ConfigError(
        f"bad --cov value {value!r}; expected identity, ar:RHO, or file:PATH"
    )


def _cmd_gen_data(args: argparse.Namespace) -> int:
    if args.kind == "covariance":
        mat = standin_covariance(args.p, args.rho)
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            for row in mat:
                writer.writerow([repr(float(v)) for v in row])
        stamp = config_stamp("gen-data", {
            "kind": "covariance", "p": args.p, "rho": args.rho,
            "out": args.out,
        })
        _write_sidecar(args.out, stamp)
        print(f"gen-data: wrote {args.p}x{args.p} covariance to {args.out}")
        return 0

    cov = _parse_cov_flag(args.cov)
    design = SimDesign(n=args.n, p=args.p, p0=args.p0, beta_mag=args.beta,
                       cov=cov, noise_sd=args.noise_sd, support=args.support)
    root = np.random.SeedSequence(args.seed)
    beta_ss, train_ss, test_ss = root.spawn(3)
    beta_star = draw_beta_star(design, np.random.default_rng(beta_ss))
    train = sample_dataset(design, beta_star, args.n,
                           np.random.default_rng(train_ss))
    write_dataset_csv(args.out, train, header=args.header)
    stamp = config_stamp("gen-data", {
        "kind": "dataset", "n": args.n, "p": args.p, "p0": args.p0,
        "beta": args.beta, "cov": args.cov, "noise_sd": args.noise_sd,
        "support": args.support, "seed": args.seed, "header": args.header,
        "out": args.out, "test_out": args.test_out,
        "test_size": args.test_size,
        "beta_star_nonzero": {int(j): float(beta_star[j])
                              for j in np.flatnonzero(beta_star)},
    })
    _write_sidecar(args.out, stamp)
    print(f"gen-data: wrote {args.n}x{args.p} dataset to {args.out}")
    if args.test_out:
        test = sample_dataset(design, beta_star, args.test_size,
                              np.random.default_rng(test_ss))
        write_dataset_csv(args.test_out, test, header=args.header)
        _write_sidecar(args.test_out, stamp)
        print(f"gen-data: wrote {args.test_size}x{args.p} test dataset "
              f"to {args.test_out}")
    return 0


def _write_sidecar(data_path: str, stamp: dict) -> None:
    # The dataset CSV layout is numbers-only (no comment lines), so the
    # configuration stamp lives in a sidecar next to it.
    with open(data_path + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(stamp, fh, sort_keys=True, indent=2)
        fh.write("\n")


_COMMANDS = {
    "fit": _cmd_fit,
    "simulate": _cmd_simulate,
    "replicate-fig1": _cmd_fig1,
    "gen-data": _cmd_gen_data,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
