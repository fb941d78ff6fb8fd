"""Replication harness: factorial simulation studies and the three-panel
penalty-curve experiment.

``run_simulation`` sweeps a grid of (p, beta_mag, p0) cells, runs every
configured method on freshly drawn data for each replication, and scores the
fits on an independent test sample. Replications execute in a process pool
(capped by the ADALASSO_MAX_WORKERS environment variable); every task reseeds
itself from ``SeedSequence(seed, spawn_key=(cell, replication))`` so results
are byte-identical regardless of worker count or completion order.

``replicate_fig1`` runs the single-sample experiment comparing, per method,
the simple-CV error curve, the nested-CV error curve, and the true test error
along one shared penalty path.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

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
    make_weights,
    nested_cv_lasso,
    simple_cv_lasso,
    simple_cv_ridge,
)
from .core import ConfigError, Dataset, FoldAssignment, partition_folds
from .datagen import (
    CovarianceSpec,
    SimDesign,
    build_covariance,
    covariance_factor,
    draw_beta_star,
    sample_dataset,
)
from .metrics import precision_recall, pred_error, signed_support_accuracy
from .solvers import DEFAULT_CONFIG, SolverConfig, build_lambda_path, lasso_path_fit

__all__ = [
    "METHODS",
    "ExperimentConfig",
    "load_experiment_config",
    "run_simulation",
    "summarize_rows",
    "write_rows_csv",
    "read_rows_csv",
    "write_simulation_outputs",
    "Fig1Panel",
    "Fig1Result",
    "replicate_fig1",
    "write_fig1_outputs",
    "RESULT_FIELDS",
    "SUMMARY_FIELDS",
]

# method name -> (weight scheme kind, cv scheme)
METHODS: dict[str, tuple[str, str]] = {
    "lasso": (UNIT, SIMPLE_CV),
    "one_step_simple": (LASSO_CV, SIMPLE_CV),
    "one_step_nested": (LASSO_CV, NESTED_CV),
    "ridge_simple": (RIDGE_CV, SIMPLE_CV),
    "ridge_nested": (RIDGE_CV, NESTED_CV),
    "ols_simple": (OLS, SIMPLE_CV),
    "ols_nested": (OLS, NESTED_CV),
}

RESULT_FIELDS = [
    "p",
    "beta_mag",
    "p0",
    "replication",
    "method",
    "sacc",
    "precision",
    "recall",
    "pred_error",
    "support_size",
    "lambda_selected",
]

_METRICS = ["sacc", "precision", "recall", "pred_error"]

SUMMARY_FIELDS = (
    ["p", "beta_mag", "p0", "method", "n_reps"]
    + [f"{m}_{s}" for m in _METRICS for s in ("mean", "ci_lo", "ci_hi")]
    + ["precision_n_defined", "support_size_mean", "support_size_total",
       "lambda_mean"]
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved configuration of one simulation study.

    The study is the full factorial of ``p_grid`` x ``beta_grid`` x
    ``p0_grid`` with ``replications`` repetitions per cell; all other fields
    are shared across cells. Defaults mirror the standard study setup
    (AR-decay covariance with rho=0.3, unit noise, random support, 10 folds).
    """

    seed: int
    n: int
    p_grid: tuple[int, ...]
    beta_grid: tuple[float, ...]
    p0_grid: tuple[int, ...] = (10,)
    replications: int = 100
    test_size: int = 10_000
    n_folds: int = 10
    methods: tuple[str, ...] = ("lasso", "one_step_simple", "one_step_nested")
    cov_kind: str = "ar_decay"
    cov_rho: float = 0.3
    cov_path: str | None = None
    noise_sd: float = 1.0
    support: str = "random"
    epsilon: float = 0.0
    n_lambdas: int = 100
    min_ratio: float | None = None
    tol: float = 1e-7
    max_sweeps: int = 100_000
    standardize: bool = True
    intercept: bool = False
    output_dir: str = "results"

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise ConfigError(f"replications must be >= 1, got {self.replications}")
        if self.test_size < 1:
            raise ConfigError(f"test_size must be >= 1, got {self.test_size}")
        if not self.methods:
            raise ConfigError("methods must be non-empty")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(
                    f"unknown method {m!r}; choose from {sorted(METHODS)}"
                )
        if not (self.p_grid and self.beta_grid and self.p0_grid):
            raise ConfigError("p_grid, beta_grid, and p0_grid must be non-empty")
        # Fail fast on covariance/solver parameters; the dataclasses used at
        # run time share the same validation.
        self.covariance_spec()
        self.solver_config()

    def covariance_spec(self) -> CovarianceSpec:
        return CovarianceSpec(self.cov_kind, rho=self.cov_rho,
                              path=self.cov_path)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(tol=self.tol, max_sweeps=self.max_sweeps,
                            standardize=self.standardize,
                            intercept=self.intercept)

    def design_for(self, p: int, beta_mag: float, p0: int) -> SimDesign:
        return SimDesign(n=self.n, p=p, p0=p0, beta_mag=beta_mag,
                         cov=self.covariance_spec(), noise_sd=self.noise_sd,
                         support=self.support)

    def cells(self) -> list[tuple[int, float, int]]:
        return [(p, b, p0) for p in self.p_grid for b in self.beta_grid
                for p0 in self.p0_grid]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "n": self.n,
            "p_grid": list(self.p_grid),
            "beta_grid": list(self.beta_grid),
            "p0_grid": list(self.p0_grid),
            "replications": self.replications,
            "test_size": self.test_size,
            "n_folds": self.n_folds,
            "methods": list(self.methods),
            "covariance": {"kind": self.cov_kind, "rho": self.cov_rho,
                           "path": self.cov_path},
            "noise_sd": self.noise_sd,
            "support": self.support,
            "epsilon": self.epsilon,
            "n_lambdas": self.n_lambdas,
            "min_ratio": self.min_ratio,
            "solver": {"tol": self.tol, "max_sweeps": self.max_sweeps,
                       "standardize": self.standardize,
                       "intercept": self.intercept},
            "output_dir": self.output_dir,
        }


_CONFIG_KEYS = {
    "seed", "n", "p_grid", "beta_grid", "p0_grid", "replications",
    "test_size", "n_folds", "methods", "covariance", "noise_sd", "support",
    "epsilon", "n_lambdas", "min_ratio", "solver", "output_dir",
}


def load_experiment_config(source: str | dict) -> ExperimentConfig:
    """Build an ExperimentConfig from a YAML file path or a parsed mapping."""
    if isinstance(source, dict):
        raw = dict(source)
    else:
        import yaml

        with open(source, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
        if not isinstance(raw, dict):
            raise ConfigError(f"{source}: config must be a mapping at top level")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("seed", "n", "p_grid", "beta_grid"):
        if key not in raw:
            raise ConfigError(f"config is missing required key {key!r}")

    kwargs: dict = {}
    try:
        kwargs["seed"] = int(raw["seed"])
        kwargs["n"] = int(raw["n"])
        kwargs["p_grid"] = tuple(int(v) for v in _as_list(raw["p_grid"], "p_grid"))
        kwargs["beta_grid"] = tuple(
            float(v) for v in _as_list(raw["beta_grid"], "beta_grid")
        )
        if "p0_grid" in raw:
            kwargs["p0_grid"] = tuple(
                int(v) for v in _as_list(raw["p0_grid"], "p0_grid")
            )
        for key, cast in (("replications", int), ("test_size", int),
                          ("n_folds", int), ("noise_sd", float),
                          ("epsilon", float), ("n_lambdas", int),
                          ("support", str), ("output_dir", str)):
            if key in raw:
                kwargs[key] = cast(raw[key])
        if "min_ratio" in raw and raw["min_ratio"] is not None:
            kwargs["min_ratio"] = float(raw["min_ratio"])
        if "methods" in raw:
            kwargs["methods"] = tuple(
                str(m) for m in _as_list(raw["methods"], "methods")
            )
        if "covariance" in raw:
            cov = raw["covariance"]
            if not isinstance(cov, dict) or "kind" not in cov:
                raise ConfigError("covariance must be a mapping with a 'kind'")
            bad = set(cov) - {"kind", "rho", "path"}
            if bad:
                raise ConfigError(f"unknown covariance keys: {sorted(bad)}")
            kwargs["cov_kind"] = str(cov["kind"])
            if "rho" in cov:
                kwargs["cov_rho"] = float(cov["rho"])
            if "path" in cov:
                kwargs["cov_path"] = str(cov["path"])
        if "solver" in raw:
            sol = raw["solver"]
            if not isinstance(sol, dict):
                raise ConfigError("solver must be a mapping")
            bad = set(sol) - {"tol", "max_sweeps", "standardize", "intercept"}
            if bad:
                raise ConfigError(f"unknown solver keys: {sorted(bad)}")
            if "tol" in sol:
                kwargs["tol"] = float(sol["tol"])
            if "max_sweeps" in sol:
                kwargs["max_sweeps"] = int(sol["max_sweeps"])
            for flag in ("standardize", "intercept"):
                if flag in sol:
                    if not isinstance(sol[flag], bool):
                        raise ConfigError(f"solver.{flag} must be a boolean")
                    kwargs[flag] = sol[flag]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from None
    return ExperimentConfig(**kwargs)


def _as_list(value, name: str) -> list:
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"{name} must be a non-empty list")
    return list(value)


# ---------------------------------------------------------------------------
# Replication execution
# ---------------------------------------------------------------------------

def _run_task(args: tuple) -> list[dict]:
    """One (cell, replication) unit: draw data, run every method, score."""
    config, cell_index, cell, rep = args
    p, beta_mag, p0 = cell
    design = config.design_for(p, beta_mag, p0)
    cfg = config.solver_config()
    root = np.random.SeedSequence(config.seed, spawn_key=(cell_index, rep))
    beta_ss, train_ss, test_ss, cv_ss = root.spawn(4)
    beta_star = draw_beta_star(design, np.random.default_rng(beta_ss))
    factor = None
    if design.cov.kind != "identity":
        factor = covariance_factor(build_covariance(design))
    train = sample_dataset(design, beta_star, config.n,
                           np.random.default_rng(train_ss), factor)
    test = sample_dataset(design, beta_star, config.test_size,
                          np.random.default_rng(test_ss), factor)
    rows = []
    for method in config.methods:
        kind, cv = METHODS[method]
        scheme = WeightScheme(kind, config.epsilon)
        # Every method restarts from the same stream state, so all methods in
        # a replication share fold draws and comparisons are paired.
        rng = np.random.default_rng(cv_ss)
        fit = adaptive_lasso(
            train, scheme, cv, config.n_folds, cfg, rng,
            n_lambdas=config.n_lambdas, min_ratio=config.min_ratio,
        )
        prec, rec = precision_recall(beta_star, fit.beta)
        rows.append({
            "p": p,
            "beta_mag": beta_mag,
            "p0": p0,
            "replication": rep,
            "method": method,
            "sacc": signed_support_accuracy(beta_star, fit.beta),
            "precision": prec,
            "recall": rec,
            "pred_error": pred_error(test, fit.beta, fit.intercept),
            "support_size": int(np.count_nonzero(fit.beta)),
            "lambda_selected": fit.lambda_selected,
        })
    return rows


def _max_workers(n_tasks: int) -> int:
    env = os.environ.get("ADALASSO_MAX_WORKERS")
    if env is not None:
        try:
            cap = int(env)
        except ValueError:
            raise ConfigError(
                f"ADALASSO_MAX_WORKERS must be an integer, got {env!r}"
            ) from None
        if cap < 1:
            raise ConfigError("ADALASSO_MAX_WORKERS must be >= 1")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_tasks))


def run_simulation(config: ExperimentConfig) -> list[dict]:
    """Run the full factorial study; returns one row per replication x method.

    Row order is (cell, replication, method) regardless of how the parallel
    pool schedules the work, and the numbers are independent of the worker
    count: every task derives its randomness from the root seed alone.
    """
    tasks = [
        (config, cell_index, cell, rep)
        for cell_index, cell in enumerate(config.cells())
        for rep in range(config.replications)
    ]
    workers = _max_workers(len(tasks))
    if workers == 1:
        chunks = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_task, tasks))
    return [row for chunk in chunks for row in chunk]


def summarize_rows(rows: list[dict]) -> list[dict]:
    """Per-(cell, method) means with 95% normal-approximation intervals.

    Undefined metric values (NaN, e.g. precision under an empty selection)
    are excluded, and ``precision_n_defined`` reports how many replications
    contributed to the precision aggregate. Intervals are mean +/- 1.96
    standard errors (sample sd, ddof=1); with one contributing replication
    the interval is NaN.
    """
    groups: dict[tuple, list[dict]] = {}
    order: list[tuple] = []
    for row in rows:
        key = (row["p"], row["beta_mag"], row["p0"], row["method"])
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)
    out = []
    for key in order:
        group = groups[key]
        p, beta_mag, p0, method = key
        entry: dict = {"p": p, "beta_mag": beta_mag, "p0": p0,
                       "method": method, "n_reps": len(group)}
        for metric in _METRICS:
            vals = np.asarray([float(r[metric]) for r in group])
            defined = vals[np.isfinite(vals)]
            if defined.size:
                mean = float(defined.mean())
                if defined.size > 1:
                    half = 1.96 * float(defined.std(ddof=1)) / math.sqrt(defined.size)
                else:
                    half = float("nan")
            else:
                mean = float("nan")
                half = float("nan")
            entry[f"{metric}_mean"] = mean
            entry[f"{metric}_ci_lo"] = mean - half
            entry[f"{metric}_ci_hi"] = mean + half
            if metric == "precision":
                entry["precision_n_defined"] = int(defined.size)
        sizes = [int(r["support_size"]) for r in group]
        entry["support_size_mean"] = float(np.mean(sizes))
        entry["support_size_total"] = int(np.sum(sizes))
        entry["lambda_mean"] = float(np.mean([float(r["lambda_selected"])
                                              for r in group]))
        out.append(entry)
    return out


# ---------------------------------------------------------------------------
# CSV output with an embedded configuration stamp
# ---------------------------------------------------------------------------

def config_stamp(command: str, params: dict) -> dict:
    """The resolved-configuration dictionary embedded in every output file."""
    stamp = {"command": command, "version": __version__}
    stamp.update(params)
    return stamp


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))  # shortest round-trip representation
    return str(value)


def write_rows_csv(path: str, rows: list[dict], fieldnames: list[str],
                   stamp: dict) -> None:
    """Write dict rows as CSV, prefixed by one ``# config: {json}`` line."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("# config: " + json.dumps(stamp, sort_keys=True) + "\n")
        writer = csv.writer(fh)
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_fmt(row.get(name)) for name in fieldnames])


def read_rows_csv(path: str) -> tuple[dict, list[dict]]:
    """Read back a CSV written by :func:`write_rows_csv` (values as strings)."""
    stamp: dict = {}
    with open(path, newline="", encoding="utf-8") as fh:
        header_line = fh.readline()
        if header_line.startswith("# config:"):
            stamp = json.loads(header_line[len("# config:"):])
        else:
            fh.seek(0)
        reader = csv.DictReader(fh)
        rows = list(reader)
    return stamp, rows


def write_simulation_outputs(config: ExperimentConfig,
                             rows: list[dict]) -> tuple[str, str]:
    """Write results.csv and summary.csv under ``config.output_dir``."""
    os.makedirs(config.output_dir, exist_ok=True)
    stamp = config_stamp("simulate", config.to_dict())
    results_path = os.path.join(config.output_dir, "results.csv")
    summary_path = os.path.join(config.output_dir, "summary.csv")
    write_rows_csv(results_path, rows, RESULT_FIELDS, stamp)
    write_rows_csv(summary_path, summarize_rows(rows), SUMMARY_FIELDS, stamp)
    return results_path, summary_path


# ---------------------------------------------------------------------------
# Single-sample penalty-curve experiment (three methods, shared data)
# ---------------------------------------------------------------------------

FIG1_METHODS = ("lasso", "one_step", "ridge_adaptive")


@dataclass(frozen=True)
class Fig1Panel:
    """Error curves of one method along its penalty path.

    ``cv_simple``/``cv_nested`` are CV mean-error curves; ``test_errors``
    are errors of full-data fits evaluated on the independent test sample.
    ``idx_*`` mark the minimizing path indices (``None`` where a scheme does
    not apply: the plain lasso has no nested variant).
    """

    method: str
    lambdas: np.ndarray
    cv_simple: np.ndarray
    test_errors: np.ndarray
    idx_simple: int
    idx_test: int
    cv_nested: np.ndarray | None = None
    idx_nested: int | None = None

    @property
    def lambda_frac(self) -> np.ndarray:
        return self.lambdas / self.lambdas[0]


@dataclass(frozen=True)
class Fig1Result:
    panels: tuple[Fig1Panel, ...]
    stamp: dict = field(default_factory=dict)

    def panel(self, method: str) -> Fig1Panel:
        for panel in self.panels:
            if panel.method == method:
                return panel
        raise KeyError(method)


def replicate_fig1(
    n: int = 400,
    p: int = 400,
    p0: int = 10,
    beta_mag: float = 0.5,
    n_folds: int = 10,
    test_size: int = 10_000,
    seed: int = 0,
    epsilon: float = 0.0,
    n_lambdas: int = 100,
    min_ratio: float | None = None,
    cfg: SolverConfig = DEFAULT_CONFIG,
) -> Fig1Result:
    """One-sample comparison of CV curves against true test error.

    Draws a single training sample (identity covariance, the first ``p0``
    coefficients at ``+/- beta_mag``) plus a large test sample, then builds
    three panels: plain lasso, one-step lasso (lasso-CV weights), and
    ridge-adaptive lasso (ridge-CV weights). Each panel shares one penalty
    path between its simple-CV curve, its nested-CV curve (weighted methods
    only), and the test-error curve of full-data path fits, so the curves
    are comparable point by point.
    """
    design = SimDesign(n=n, p=p, p0=p0, beta_mag=beta_mag,
                       cov=CovarianceSpec.identity(), noise_sd=1.0,
                       support="first")
    root = np.random.SeedSequence(seed)
    beta_ss, train_ss, test_ss, fold_ss, os_ss, ridge_ss = root.spawn(6)
    beta_star = draw_beta_star(design, np.random.default_rng(beta_ss))
    train = sample_dataset(design, beta_star, n,
                           np.random.default_rng(train_ss))
    test = sample_dataset(design, beta_star, test_size,
                          np.random.default_rng(test_ss))
    folds = partition_folds(n, n_folds, np.random.default_rng(fold_ss))

    unit = np.ones(p)
    panels = []

    # plain lasso: simple CV only
    fit_lasso = simple_cv_lasso(train, unit, n_folds, cfg, folds=folds,
                                n_lambdas=n_lambdas, min_ratio=min_ratio)
    panels.append(_make_panel("lasso", train, test, unit, fit_lasso.curve,
                              None, cfg))

    # one-step lasso: weights from the full-data lasso-CV pilot
    w_os = make_weights(fit_lasso.beta, epsilon)
    panels.append(_weighted_panel(
        "one_step", train, test, w_os, WeightScheme(LASSO_CV, epsilon),
        n_folds, cfg, folds, np.random.default_rng(os_ss),
        n_lambdas, min_ratio,
    ))

    # ridge-adaptive lasso: weights from the full-data ridge-CV pilot
    pilot_ridge = simple_cv_ridge(train, n_folds, cfg, folds=folds).beta
    w_ridge = make_weights(pilot_ridge, epsilon)
    panels.append(_weighted_panel(
        "ridge_adaptive", train, test, w_ridge, WeightScheme(RIDGE_CV, epsilon),
        n_folds, cfg, folds, np.random.default_rng(ridge_ss),
        n_lambdas, min_ratio,
    ))

    stamp = config_stamp("replicate-fig1", {
        "n": n, "p": p, "p0": p0, "beta_mag": beta_mag, "n_folds": n_folds,
        "test_size": test_size, "seed": seed, "epsilon": epsilon,
        "n_lambdas": n_lambdas, "min_ratio": min_ratio,
        "solver": {"tol": cfg.tol, "max_sweeps": cfg.max_sweeps,
                   "standardize": cfg.standardize, "intercept": cfg.intercept},
    })
    return Fig1Result(panels=tuple(panels), stamp=stamp)


def _weighted_panel(method, train, test, weights, scheme, n_folds, cfg,
                    folds: FoldAssignment, rng, n_lambdas, min_ratio) -> Fig1Panel:
    fit_simple = simple_cv_lasso(train, weights, n_folds, cfg, folds=folds,
                                 n_lambdas=n_lambdas, min_ratio=min_ratio)
    fit_nested = nested_cv_lasso(train, weights, scheme, n_folds, cfg, rng,
                                 folds=folds, n_lambdas=n_lambdas,
                                 min_ratio=min_ratio)
    return _make_panel(method, train, test, weights, fit_simple.curve,
                       fit_nested.curve, cfg)


def _make_panel(method, train, test, weights, curve_simple, curve_nested,
                cfg) -> Fig1Panel:
    path = curve_simple.lambdas
    betas = lasso_path_fit(train, weights, path, cfg)
    if cfg.intercept:
        intercepts = train.y.mean() - betas @ train.X.mean(axis=0)
    else:
        intercepts = np.zeros(betas.shape[0])
    preds = betas @ test.X.T + intercepts[:, None]
    test_errors = np.mean((test.y[None, :] - preds) ** 2, axis=1)
    kwargs = {}
    if curve_nested is not None:
        if not np.array_equal(curve_nested.lambdas, path):
            raise AssertionError("panel curves must share one penalty path")
        kwargs = {"cv_nested": curve_nested.mean_errors,
                  "idx_nested": curve_nested.selected_index}
    return Fig1Panel(
        method=method,
        lambdas=path,
        cv_simple=curve_simple.mean_errors,
        test_errors=test_errors,
        idx_simple=curve_simple.selected_index,
        idx_test=int(np.argmin(test_errors)),
        **kwargs,
    )


FIG1_CURVE_FIELDS = ["lambda", "lambda_frac", "cv_simple", "cv_nested",
                     "test_error"]
FIG1_SELECTED_FIELDS = [
    "method",
    "lambda_simple", "test_error_at_simple",
    "lambda_nested", "test_error_at_nested",
    "lambda_test_opt", "test_error_min",
]


def write_fig1_outputs(result: Fig1Result, output_dir: str) -> list[str]:
    """Write per-method curve CSVs, the selection summary, and SVG plots."""
    from .svgplot import line_plot

    os.makedirs(output_dir, exist_ok=True)
    paths = []
    selected_rows = []
    for panel in result.panels:
        rows = []
        frac = panel.lambda_frac
        for r in range(panel.lambdas.shape[0]):
            rows.append({
                "lambda": float(panel.lambdas[r]),
                "lambda_frac": float(frac[r]),
                "cv_simple": float(panel.cv_simple[r]),
                "cv_nested": (None if panel.cv_nested is None
                              else float(panel.cv_nested[r])),
                "test_error": float(panel.test_errors[r]),
            })
        csv_path = os.path.join(output_dir, f"fig1_{panel.method}.csv")
        write_rows_csv(csv_path, rows, FIG1_CURVE_FIELDS, result.stamp)
        paths.append(csv_path)

        series = [
            ("test error", panel.test_errors, "#222222", None),
            ("simple CV", panel.cv_simple, "#c0392b", None),
        ]
        vlines = [
            (float(frac[panel.idx_test]), "test optimum", "#222222"),
            (float(frac[panel.idx_simple]), "simple CV pick", "#c0392b"),
        ]
        if panel.cv_nested is not None:
            series.append(("nested CV", panel.cv_nested, "#2471a3", None))
            vlines.append((float(frac[panel.idx_nested]), "nested CV pick",
                           "#2471a3"))
        svg_path = os.path.join(output_dir, f"fig1_{panel.method}.svg")
        line_plot(
            svg_path,
            title=f"{panel.method}: CV estimates vs. test error",
            xlabel="lambda / lambda_max (log scale)",
            ylabel="mean squared prediction error",
            x=frac,
            series=series,
            vlines=vlines,
            logx=True,
            comment="config: " + json.dumps(result.stamp, sort_keys=True),
        )
        paths.append(svg_path)

        sel = {
            "method": panel.method,
            "lambda_simple": float(panel.lambdas[panel.idx_simple]),
            "test_error_at_simple": float(panel.test_errors[panel.idx_simple]),
            "lambda_nested": (None if panel.idx_nested is None
                              else float(panel.lambdas[panel.idx_nested])),
            "test_error_at_nested": (None if panel.idx_nested is None
                                     else float(panel.test_errors[panel.idx_nested])),
            "lambda_test_opt": float(panel.lambdas[panel.idx_test]),
            "test_error_min": float(panel.test_errors[panel.idx_test]),
        }
        selected_rows.append(sel)
    sel_path = os.path.join(output_dir, "fig1_selected.csv")
    write_rows_csv(sel_path, selected_rows, FIG1_SELECTED_FIELDS, result.stamp)
    paths.append(sel_path)
    return paths
