"""Command-line front end.

Subcommands::

    gpconfound classify --p 1 --alpha 2 --gamma 0 --obs eigen
    gpconfound simulate --kappa 0.4 --sigma 1.3 --nu 2 --out field.csv
    gpconfound experiment {timeseries,spatial,application} --config run.toml --out results/
    gpconfound fit --data data.csv --response T --covariate P

Exit codes: 0 success, 2 usage or configuration error, 3 data error,
4 numerical failure. All randomness flows from ``--seed`` (default 0).
"""

import argparse
import datetime
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .covkernel import MaternParams
from .dataio import (
    atomic_write_csv,
    config_digest,
    load_config,
    read_locations,
    read_long_data,
    standardize_per_replicate,
    write_manifest,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DataFormatError,
    DegenerateColumnError,
    DuplicateLocationError,
    GPConfoundError,
    NotPositiveDefiniteError,
    ParameterDomainError,
    RankDeficiencyError,
)
from .experiments import (
    ExperimentConfig,
    MultiVariableData,
    NuSXMode,
    run_application_pipeline,
    run_spatial_experiment,
    run_timeseries_experiment,
    simulate_gp,
    synthetic_bivariate,
    synthetic_sites,
)
from .regression import COV_PARAM_NAMES, FitConfig, RegressionDataset, fit_ml
from .smoothing import LowessConfig
from .spectral import classify_limit

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

__all__ = ["main", "run", "standardize_per_replicate"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


class _UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gpconfound", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"gpconfound {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", help="print the limit regime of the regression coefficient")
    c.add_argument("--p", type=float, required=True, help="Sobolev index of the covariate")
    c.add_argument("--alpha", type=float, required=True, help="covariance exponent")
    c.add_argument("--gamma", type=float, required=True, help="exponent of the smoothing operator")
    c.add_argument("--obs", choices=("point", "eigen"), default="eigen")

    s = sub.add_parser("simulate", help="simulate a Matérn field and write it as CSV")
    s.add_argument("--locations", help="site CSV (site_id,x[,y]); default: synthetic sites")
    s.add_argument("--n-sites", type=int, default=620)
    s.add_argument("--kappa", type=float, default=0.4)
    s.add_argument("--sigma", type=float, default=1.3)
    s.add_argument("--nu", type=float, default=2.0)
    s.add_argument("--nugget", type=float, default=0.0, help="nugget variance")
    s.add_argument("--replicates", type=int, default=1)
    s.add_argument("--method", choices=("cholesky", "sqrt"), default="cholesky")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)

    e = sub.add_parser("experiment", help="run a simulation study or the application pipeline")
    e.add_argument("which", choices=("timeseries", "spatial", "application"))
    e.add_argument("--config", required=True)
    e.add_argument("--out", default=".", help="output directory")
    e.add_argument("--seed", type=int, default=0)

    f = sub.add_parser("fit", help="joint ML fit of regression and Matérn parameters")
    f.add_argument("--data", required=True, help="long-format data CSV")
    f.add_argument("--response", help="response variable (default: first variable)")
    f.add_argument("--covariate", action="append", default=[], help="covariate variable (repeatable)")
    f.add_argument("--free", default="kappa,sigma,nu", help="comma-separated free covariance parameters")
    f.add_argument("--no-standardize", action="store_true")
    return p


def _matern(section: dict, default: MaternParams, where: str) -> MaternParams:
    allowed = {"kappa", "sigma", "nu", "nugget_var"}
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    try:
        return default.replace(**{k: float(v) for k, v in section.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


_SECTIONS = {"experiment", "generator", "noise", "smoothing", "spatial", "application", "fit"}


def experiment_config(raw: dict, which: str, seed: int, path="config") -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from a parsed config file."""
    unknown = set(raw) - _SECTIONS
    if unknown:
        raise ConfigError(f"{path}: unknown sections {sorted(unknown)}")
    exp = dict(raw.get("experiment", {}))
    if which == "timeseries":
        kind = {"1": "timeseries1", "2": "timeseries2", "3": "timeseries3"}.get(str(exp.pop("variant", 1)))
        if kind is None:
            raise ConfigError(f"{path}: [experiment] variant must be 1, 2 or 3")
    else:
        kind = which
        exp.pop("variant", None)
    cfg = ExperimentConfig.default(kind, base_seed=seed)
    try:
        changes = {}
        if "n_grid" in exp:
            changes["n_grid"] = tuple(int(v) for v in exp.pop("n_grid"))
        if "replications" in exp:
            changes["replications"] = int(exp.pop("replications"))
        if "beta" in exp:
            changes["beta"] = float(exp.pop("beta"))
        if "domain" in exp:
            changes["domain"] = tuple(float(v) for v in exp.pop("domain"))
        if "workers" in exp:
            changes["workers"] = int(exp.pop("workers"))
        if exp:
            raise ConfigError(f"{path}: [experiment] unknown keys {sorted(exp)}")
        changes["generator"] = _matern(raw.get("generator", {}), cfg.generator, f"{path}: [generator]")
        changes["noise"] = _matern(raw.get("noise", {}), cfg.noise, f"{path}: [noise]")
        sm = dict(raw.get("smoothing", {}))
        iters = int(sm.pop("iterations", cfg.true_smoother.iterations))
        changes["true_smoother"] = LowessConfig(float(sm.pop("true_span", cfg.true_smoother.span)), iters)
        changes["fit_smoother"] = LowessConfig(float(sm.pop("fit_span", cfg.fit_smoother.span)), iters)
        if "powers" in sm:
            changes["smooth_powers"] = tuple(float(v) for v in sm.pop("powers"))
        if "rescale" in sm:
            changes["rescale_smoothed"] = bool(sm.pop("rescale"))
        if sm:
            raise ConfigError(f"{path}: [smoothing] unknown keys {sorted(sm)}")
        sp = dict(raw.get("spatial", {}))
        if "nu_x_grid" in sp:
            changes["nu_x_grid"] = tuple(float(v) for v in sp.pop("nu_x_grid"))
        if "nu_sx_mode" in sp:
            changes["nu_sx_mode"] = NuSXMode(sp.pop("nu_sx_mode"))
        if "n_sites" in sp:
            changes["n_sites"] = int(sp.pop("n_sites"))
        if "root_method" in sp:
            changes["root_method"] = str(sp.pop("root_method"))
        extra = {}
        if "locations" in sp:
            extra["locations"] = str(sp.pop("locations"))
        if sp:
            raise ConfigError(f"{path}: [spatial] unknown keys {sorted(sp)}")
        app = dict(raw.get("application", {}))
        if "n_pred" in app:
            changes["n_pred"] = int(app.pop("n_pred"))
        for key in ("data", "response_order"):
            if key in app:
                extra[key] = app.pop(key)
        for key in ("synthetic_replicates", "synthetic_beta", "nu_rough", "nu_smooth", "noise_sd"):
            if key in app:
                extra[key] = float(app.pop(key))
        if app:
            raise ConfigError(f"{path}: [application] unknown keys {sorted(app)}")
        fit = dict(raw.get("fit", {}))
        if "free" in fit:
            changes["fit_free"] = tuple(str(v) for v in fit.pop("free"))
        if fit:
            raise ConfigError(f"{path}: [fit] unknown keys {sorted(fit)}")
        changes["extra"] = extra
        return replace(cfg, **changes)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from None


def _resolve(base_dir, p):
    return p if os.path.isabs(p) else os.path.join(base_dir, p)


def _load_application_data(cfg: ExperimentConfig, base_dir) -> MultiVariableData:
    data_path = cfg.extra.get("data")
    if data_path:
        _, locs, _, variables = read_long_data(_resolve(base_dir, data_path))
        order = cfg.extra.get("response_order") or list(variables)
        missing = [v for v in order if v not in variables]
        if missing:
            raise DataFormatError(f"{data_path}: variables {missing} not present")
        return MultiVariableData(locs, {name: variables[name] for name in order})
    sites = synthetic_sites(cfg.n_sites, seed=[cfg.base_seed, 620])
    return synthetic_bivariate(
        sites,
        n_replicates=int(cfg.extra.get("synthetic_replicates", 24)),
        beta=float(cfg.extra.get("synthetic_beta", cfg.beta)),
        nu_rough=float(cfg.extra.get("nu_rough", 0.5)),
        nu_smooth=float(cfg.extra.get("nu_smooth", cfg.generator.nu)),
        params=cfg.generator,
        seed=[cfg.base_seed, 3],
        noise_sd=float(cfg.extra.get("noise_sd", 0.1)),
    )


def _cmd_experiment(args, out) -> int:
    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    raw = load_config(args.config)
    cfg = experiment_config(raw, args.which, args.seed, path=args.config)
    base_dir = os.path.dirname(os.path.abspath(args.config))
    os.makedirs(args.out, exist_ok=True)
    outputs = []
    if args.which == "timeseries":
        tables = {f"{cfg.experiment_kind.value}.csv": run_timeseries_experiment(cfg)}
    elif args.which == "spatial":
        locs = None
        if "locations" in cfg.extra:
            _, locs = read_locations(_resolve(base_dir, cfg.extra["locations"]))
        tables = {"spatial.csv": run_spatial_experiment(cfg, locations=locs)}
    else:
        plain, smooth = run_application_pipeline(_load_application_data(cfg, base_dir), cfg)
        tables = {"application_unsmoothed.csv": plain, "application_smoothed.csv": smooth}
    for name, table in tables.items():
        path = os.path.join(args.out, name)
        table.to_csv(path)
        outputs.append(name)
        print(f"wrote {path}", file=out)
    manifest = {
        "config_digest": config_digest(raw),
        "config_file": os.path.basename(args.config),
        "base_seed": args.seed,
        "artifact_version": __version__,
        "started": started,
        "finished": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": outputs,
    }
    write_manifest(os.path.join(args.out, "manifest.json"), manifest)
    return EXIT_OK


def _cmd_simulate(args, out) -> int:
    if args.locations:
        ids, locs = read_locations(args.locations)
    else:
        locs = synthetic_sites(args.n_sites, seed=[args.seed, 620])
        ids = [str(i) for i in range(locs.shape[0])]
    params = MaternParams(args.kappa, args.sigma, args.nu, args.nugget)
    header = ["site_id", *["x", "y"][: locs.shape[1]], "replicate_id", "value"]
    rows = []
    for r in range(args.replicates):
        values = simulate_gp(locs, params, seed=[args.seed, r], method=args.method)
        for sid, pt, v in zip(ids, locs, values):
            rows.append([sid, *map(repr, map(float, pt)), r, repr(float(v))])
    atomic_write_csv(args.out, header, rows)
    print(f"wrote {args.out}", file=out)
    return EXIT_OK


def _cmd_fit(args, out) -> int:
    _, locs, reps, variables = read_long_data(args.data)
    response = args.response or next(iter(variables))
    names = [response, *args.covariate]
    missing = [v for v in names if v not in variables]
    if missing:
        raise DataFormatError(f"{args.data}: variables {missing} not present")
    if not args.no_standardize:
        variables = {k: standardize_per_replicate(v.T).T for k, v in variables.items()}
    y = variables[response]
    design = np.stack([np.ones_like(y)] + [variables[c] for c in args.covariate], axis=-1)
    free = tuple(s for s in args.free.split(",") if s)
    if set(free) - set(COV_PARAM_NAMES):
        raise _UsageError(f"--free accepts {','.join(COV_PARAM_NAMES)}")
    result = fit_ml(RegressionDataset(locs, design, y), FitConfig(free=free))
    labels = ["intercept", *args.covariate]
    print(f"sites={result.n_used} replicates={len(reps)} loglik={result.loglik!r} evaluations={result.n_evals}", file=out)
    for lab, b, se, (lo, hi) in zip(labels, result.beta_hat, result.se, result.ci95):
        print(f"beta[{lab}]={b!r} se={se!r} ci95=({lo!r}, {hi!r})", file=out)
    p = result.cov_params
    print(f"kappa={p.kappa!r} sigma={p.sigma!r} nu={p.nu!r} nugget_var={p.nugget_var!r}", file=out)
    return EXIT_OK


def run(argv=None, out=None, err=None) -> int:
    """Run the CLI and return its exit status."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = _parser().parse_args(argv)
        if args.command == "classify":
            print(classify_limit(args.p, args.alpha, args.gamma, args.obs).tag.value, file=out)
            return EXIT_OK
        if args.command == "simulate":
            return _cmd_simulate(args, out)
        if args.command == "experiment":
            return _cmd_experiment(args, out)
        return _cmd_fit(args, out)
    except _UsageError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except (ConfigError, ParameterDomainError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except (DataFormatError, DuplicateLocationError, DegenerateColumnError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_DATA
    except (NotPositiveDefiniteError, RankDeficiencyError, ConvergenceError, np.linalg.LinAlgError) as exc:
        print(f"error: numerical failure: {exc}", file=err)
        return EXIT_NUMERIC
    except GPConfoundError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_DATA
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)


def main() -> None:
    sys.exit(run())
