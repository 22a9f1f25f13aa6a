"""Command-line interface.

Subcommands: estimate, sweep, landscape, isoperimetric, verify-bounds.
Each prints a one-line JSON summary to stdout and writes CSV artifacts.
Exit codes: 0 success, 2 bound violation, 3 config error, 4 I/O error.
"""

import argparse
import csv
import dataclasses
import sys

import numpy as np

from .contrasts import ContrastEvaluator, NoiseSchedule, default_horizon
from .estimators import OptimizerSpec, minimize
from .harness import (
    ConfigError,
    ExperimentSpec,
    run_landscape,
    run_isoperimetric,
    run_sweep,
    run_verify_bounds,
    summary_json,
)
from .model import ParamSpace

EXIT_OK = 0
EXIT_BOUND_VIOLATION = 2
EXIT_CONFIG = 3
EXIT_IO = 4


def _parse_floats(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip() != "")
    except ValueError as exc:
        raise ConfigError(f"bad float list {text!r}") from exc


def _parse_ints(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip() != "")
    except ValueError as exc:
        raise ConfigError(f"bad int list {text!r}") from exc


def read_config(path):
    """Flat key-value config: one `key = value` per line, # comments."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


def spec_from_config(values):
    kw = {}
    if "theta0" in values:
        kw["theta0"] = float(values["theta0"])
    if "mu_list" in values:
        kw["mu_list"] = _parse_floats(values["mu_list"])
    if "n_list" in values:
        kw["n_list"] = _parse_ints(values["n_list"])
    if "T_rule" in values:
        raw = values["T_rule"]
        kw["T_rule"] = raw if raw in ("2ln(mu)", "ln(mu^2)") else float(raw)
    if "replications" in values:
        kw["replications"] = int(values["replications"])
    if "seed" in values:
        kw["seed"] = int(values["seed"])
    if "estimators" in values:
        kw["estimators"] = tuple(
            v.strip().upper() for v in values["estimators"].split(",") if v.strip()
        )
    if "eta" in values:
        kw["eta"] = float(values["eta"])
    if "output_path" in values:
        kw["output_path"] = values["output_path"]
    if "dsm_t" in values:
        kw["dsm_t"] = float(values["dsm_t"])
    opt_kw = {}
    if "coarse_grid" in values:
        opt_kw["coarse_grid"] = int(values["coarse_grid"])
    if "refine_tol" in values:
        opt_kw["refine_tol"] = float(values["refine_tol"])
    if opt_kw:
        kw["optimizer"] = OptimizerSpec(**opt_kw)
    unknown = set(values) - {
        "theta0",
        "mu_list",
        "n_list",
        "T_rule",
        "replications",
        "seed",
        "estimators",
        "eta",
        "output_path",
        "dsm_t",
        "coarse_grid",
        "refine_tol",
    }
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        return ExperimentSpec(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _read_samples(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["x"]:
            raise ConfigError(f"{path}: expected a single-column CSV with header 'x'")
        try:
            return np.array([float(row[0]) for row in reader if row])
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"{path}: malformed sample row") from exc


def _cmd_estimate(args):
    data = _read_samples(args.data)
    if data.size == 0:
        raise ConfigError("no samples in input")
    kind = args.estimator.upper()
    if kind == "DDSM":
        T = args.T if args.T is not None else default_horizon(args.mu)
        ev = ContrastEvaluator(kind="DDSM", mu=args.mu, schedule=NoiseSchedule.make(T))
    elif kind in ("SM", "ML"):
        T = None
        ev = ContrastEvaluator(kind=kind, mu=args.mu)
    else:
        raise ConfigError(f"unknown estimator {args.estimator!r}")
    res = minimize(ev, data, OptimizerSpec(), ParamSpace(args.eta))
    print(
        summary_json(
            command="estimate",
            estimator=kind,
            mu=args.mu,
            T=T,
            n=int(data.size),
            theta_hat=res.theta_hat,
            loss_at_opt=res.loss_at_opt,
            boundary_hit=res.boundary_hit,
            evaluations=res.evaluations,
        )
    )
    return EXIT_OK


def _cmd_sweep(args):
    spec = spec_from_config(read_config(args.config))
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    if args.out is not None:
        spec = dataclasses.replace(spec, output_path=args.out)
    rows = run_sweep(spec, workers=args.workers)
    print(
        summary_json(
            command="sweep",
            rows=len(rows),
            output=spec.output_path,
            seed=spec.seed,
            estimators=sorted(spec.estimators),
        )
    )
    return EXIT_OK


def _cmd_landscape(args):
    T = args.T if args.T is not None else default_horizon(args.mu)
    out, dens = run_landscape(
        args.theta0, args.mu, args.n, T, args.grid, args.seed, args.out, args.eta
    )
    print(
        summary_json(
            command="landscape",
            output=str(out),
            densities=str(dens),
            mu=args.mu,
            theta0=args.theta0,
            n=args.n,
            T=T,
            grid=args.grid,
        )
    )
    return EXIT_OK


def _cmd_isoperimetric(args):
    theta_grid = (
        _parse_floats(args.theta_grid)
        if args.theta_grid
        else tuple(np.linspace(0.05, 0.95, 19))
    )
    rows = run_isoperimetric(_parse_floats(args.mu_list), theta_grid, args.out)
    print(
        summary_json(
            command="isoperimetric", rows=len(rows), output=args.out
        )
    )
    return EXIT_OK


def _cmd_verify_bounds(args):
    reports, ok = run_verify_bounds(_parse_floats(args.mu_list), args.eta, args.out)
    print(
        summary_json(
            command="verify-bounds",
            reports=len(reports),
            unsatisfied=sum(1 for r in reports if not r.satisfied),
            output=args.out,
        )
    )
    return EXIT_OK if ok else EXIT_BOUND_VIOLATION


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gmscore",
        description="Estimators and exact evaluators for the two-component "
        "Gaussian location mixture.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="fit one estimator to a sample CSV")
    p.add_argument("--estimator", required=True, choices=["ml", "sm", "ddsm"])
    p.add_argument("--data", required=True, help="single-column CSV with header x")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--eta", type=float, default=0.01)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("sweep", help="run a Monte Carlo estimator sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("landscape", help="loss landscape and density/score CSVs")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--theta0", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--grid", type=int, default=99)
    p.add_argument("--seed", type=int, default=20_240_901)
    p.add_argument("--eta", type=float, default=0.01)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_landscape)

    p = sub.add_parser("isoperimetric", help="isoperimetric constant tables")
    p.add_argument("--mu-list", required=True)
    p.add_argument("--theta-grid", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_isoperimetric)

    p = sub.add_parser("verify-bounds", help="evaluate the bound suite")
    p.add_argument("--mu-list", required=True)
    p.add_argument("--eta", type=float, default=0.01)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_verify_bounds)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
