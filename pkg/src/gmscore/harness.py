"""Configuration-driven experiment runner producing CSV artifacts.

run_sweep draws one dataset per (mu, n, replication) cell and fits every
requested estimator on the same data (paired design), so estimator
comparisons are within-cell.  Cell randomness comes from a named stream
seeded by (seed, mu-index, n-index, replication), making results
independent of execution order and worker count.  Rows are sorted before
writing; all floats are serialized with 17 significant digits.
"""

import csv
import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import bounds as bounds_mod
from .contrasts import ContrastEvaluator, NoiseSchedule, default_horizon
from .divergences import isoperimetric_constant
from .estimators import OptimizerSpec, minimize
from .gaussian import norm_pdf
from .model import MixtureParams, ParamSpace, density, sample, score

ESTIMATOR_NAMES = ("ML", "SM", "DDSM", "DSM")

SWEEP_COLUMNS = (
    "mu",
    "n",
    "T",
    "replication_index",
    "estimator",
    "theta_hat",
    "abs_error",
    "loss_at_opt",
    "wall_time_ms",
)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentSpec:
    """Monte Carlo sweep configuration.

    T_rule is either a fixed float or one of the strings "2ln(mu)" and
    "ln(mu^2)" (the same horizon, written both ways), clamped below at 1.
    """

    theta0: float = 0.5
    mu_list: tuple = (1.0, 2.0, 3.0, 4.0)
    n_list: tuple = (10_000,)
    T_rule: object = "2ln(mu)"
    replications: int = 200
    seed: int = 20_240_901
    estimators: tuple = ("ML", "SM", "DDSM")
    eta: float = 0.01
    output_path: str = "sweep.csv"
    dsm_t: float = 0.1
    optimizer: OptimizerSpec = field(default_factory=OptimizerSpec)

    def __post_init__(self):
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if not self.eta < self.theta0 < 1.0 - self.eta:
            raise ConfigError("theta0 must lie in [eta, 1-eta]")
        if any(mu <= 0.0 for mu in self.mu_list):
            raise ConfigError("mu_list entries must be positive")
        if any(n < 1 for n in self.n_list):
            raise ConfigError("n_list entries must be >= 1")
        unknown = set(self.estimators) - set(ESTIMATOR_NAMES)
        if unknown:
            raise ConfigError(f"unknown estimators: {sorted(unknown)}")

    def horizon(self, mu):
        if isinstance(self.T_rule, str):
            if self.T_rule in ("2ln(mu)", "ln(mu^2)"):
                return default_horizon(mu)
            raise ConfigError(f"unknown T_rule {self.T_rule!r}")
        return float(self.T_rule)


@dataclass(frozen=True)
class ExperimentRow:
    mu: float
    n: int
    T: float
    replication_index: int
    estimator: str
    theta_hat: float
    abs_error: float
    loss_at_opt: float
    wall_time_ms: float


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(path, columns, rows):
    """RFC-4180 CSV with an exact header row; floats at 17 significant digits.

    On write failure a .partial marker is left next to the target path so
    downstream consumers can detect truncated output.
    """
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    except OSError:
        try:
            with open(str(path) + ".partial", "w") as fh:
                fh.write("partial output: write failed\n")
        except OSError:
            pass
        raise
    return path


def _fit_cell(spec, i_mu, mu, i_n, n, rep):
    """Fit every requested estimator on one cell's shared dataset."""
    rng = np.random.default_rng([spec.seed, i_mu, i_n, rep])
    p_true = MixtureParams(spec.theta0, mu)
    data = sample(p_true, n, rng)
    T = spec.horizon(mu)
    space = ParamSpace(spec.eta)
    rows = []
    for name in sorted(spec.estimators):
        if name == "DDSM":
            ev = ContrastEvaluator(kind="DDSM", mu=mu, schedule=NoiseSchedule.make(T))
        elif name == "DSM":
            ev = ContrastEvaluator(kind="DSM", mu=mu, fixed_t=spec.dsm_t)
        else:
            ev = ContrastEvaluator(kind=name, mu=mu)
        t0 = time.perf_counter()
        res = minimize(ev, data, spec.optimizer, space)
        elapsed_ms = (time.perf_counter() - t0) * 1e3
        rows.append(
            ExperimentRow(
                mu=mu,
                n=n,
                T=T,
                replication_index=rep,
                estimator=name,
                theta_hat=res.theta_hat,
                abs_error=abs(res.theta_hat - spec.theta0),
                loss_at_opt=res.loss_at_opt,
                wall_time_ms=elapsed_ms,
            )
        )
    return rows


def _cell_worker(args):
    return _fit_cell(*args)


def run_sweep(spec, workers=1, write=True):
    """Run the sweep; returns the sorted rows (and writes the CSV).

    Replication cells are independent, so they parallelize over a worker
    pool; a single collector sorts rows by (mu, n, replication, estimator)
    before anything is written.
    """
    cells = [
        (spec, i_mu, mu, i_n, n, rep)
        for i_mu, mu in enumerate(spec.mu_list)
        for i_n, n in enumerate(spec.n_list)
        for rep in range(spec.replications)
    ]
    if workers > 1:
        import multiprocessing

        with multiprocessing.get_context("fork").Pool(workers) as pool:
            chunks = pool.map(_cell_worker, cells, chunksize=4)
    else:
        chunks = [_fit_cell(*cell) for cell in cells]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r.mu, r.n, r.replication_index, r.estimator))
    if write:
        write_csv(
            spec.output_path,
            SWEEP_COLUMNS,
            [
                (
                    r.mu,
                    r.n,
                    r.T,
                    r.replication_index,
                    r.estimator,
                    r.theta_hat,
                    r.abs_error,
                    r.loss_at_opt,
                    r.wall_time_ms,
                )
                for r in rows
            ],
        )
    return rows


LANDSCAPE_COLUMNS = ("theta", "loss_sm", "loss_ddsm", "loss_ml")
DENSITY_COLUMNS = ("theta", "x", "density", "score")
DENSITY_THETAS = (0.01, 0.1, 0.5, 0.9, 0.99)


def densities_path(output):
    stem, dot, ext = str(output).rpartition(".")
    if not dot:
        return str(output) + "_densities"
    return f"{stem}_densities.{ext}"


def run_landscape(theta0, mu, n, T, grid, seed, output, eta=0.01):
    """Empirical loss landscapes plus the density/score overlay data.

    Writes the landscape CSV (each loss centered by its own minimum over
    the theta grid) and a companion densities CSV on a fixed x grid.
    Returns (landscape_path, densities_path).
    """
    if grid < 2:
        raise ConfigError("grid must have at least 2 points")
    rng = np.random.default_rng([seed])
    data = sample(MixtureParams(theta0, mu), n, rng)
    thetas = np.linspace(eta, 1.0 - eta, grid)
    evaluators = {
        "sm": ContrastEvaluator(kind="SM", mu=mu),
        "ddsm": ContrastEvaluator(kind="DDSM", mu=mu, schedule=NoiseSchedule.make(T)),
        "ml": ContrastEvaluator(kind="ML", mu=mu),
    }
    curves = {}
    for key, ev in evaluators.items():
        bound = ev.bind(data)
        vals = np.array([bound.risk(float(t)) for t in thetas])
        curves[key] = vals - vals.min()
    write_csv(
        output,
        LANDSCAPE_COLUMNS,
        [
            (float(t), curves["sm"][i], curves["ddsm"][i], curves["ml"][i])
            for i, t in enumerate(thetas)
        ],
    )

    xs = np.linspace(-mu - 4.0, mu + 4.0, 401)
    dens_rows = []
    for th in DENSITY_THETAS:
        p = MixtureParams(th, mu)
        f = density(p, xs)
        s = score(p, xs)
        dens_rows.extend(
            (th, float(x), float(fv), float(sv)) for x, fv, sv in zip(xs, f, s)
        )
    dpath = densities_path(output)
    write_csv(dpath, DENSITY_COLUMNS, dens_rows)
    return output, dpath


ISO_COLUMNS = ("mu", "theta", "c_ip", "c_ip_family", "two_phi_mu")


def run_isoperimetric(mu_list, theta_grid, output):
    """Per-member and family isoperimetric constants against 2*phi(mu)."""
    if len(mu_list) == 0 or len(theta_grid) == 0:
        raise ConfigError("mu_list and theta_grid must be nonempty")
    rows = []
    for mu in mu_list:
        per_theta = {
            th: isoperimetric_constant(MixtureParams(th, mu)) for th in theta_grid
        }
        family = min(per_theta.values())
        two_phi = 2.0 * float(norm_pdf(mu))
        rows.extend(
            (mu, th, per_theta[th], family, two_phi) for th in theta_grid
        )
    write_csv(output, ISO_COLUMNS, rows)
    return rows


BOUNDS_COLUMNS = ("name", "lhs", "rhs", "margin", "satisfied")


def run_verify_bounds(mu_list, eta, output):
    """Evaluate the standard bound grid; returns (reports, all_satisfied)."""
    if len(mu_list) == 0:
        raise ConfigError("mu_list must be nonempty")
    reports = bounds_mod.standard_reports(tuple(mu_list), eta)
    write_csv(
        output,
        BOUNDS_COLUMNS,
        [(r.name, r.lhs, r.rhs, r.margin, r.satisfied) for r in reports],
    )
    return reports, all(r.satisfied for r in reports)


def summary_json(**kv):
    """One-line JSON summary printed by each CLI subcommand."""
    return json.dumps(kv, sort_keys=True)
