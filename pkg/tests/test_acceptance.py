"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest -s tests/test_acceptance.py` to see the per-criterion
lines as they complete.  The Monte Carlo criteria (8-10) share two sweep
fixtures and dominate the runtime; they parallelize over replication
cells via run_sweep(workers=N) on multi-core machines.
"""

import numpy as np
import pytest
from scipy.integrate import quad as scipy_quad
from scipy.stats import binom

from gmscore.bounds import ddsm_ratio, sm_ratio
from gmscore.contrasts import NoiseSchedule, default_horizon, m_ddsm, m_ddsm_mc, m_sm
from gmscore.divergences import (
    fisher_divergence,
    gaussian_isoperimetric_constant,
    isoperimetric_constant,
    isoperimetric_constant_family,
)
from gmscore.gaussian import norm_pdf
from gmscore.harness import ExperimentSpec, run_landscape, run_sweep, run_verify_bounds
from gmscore.model import (
    MixtureParams,
    density,
    evolve,
    log_density,
    score,
    score_diff,
    score_dx,
    score_ratio_kernel,
    stream,
    weight,
)
from gmscore.quadrature import composite_legendre

pytestmark = pytest.mark.acceptance


def report(num, desc, ok):
    print(f"[ACCEPTANCE] criterion {num:>2}: {desc}: {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {num} failed: {desc}"


# ---------------------------------------------------------------------------
# closed-form vs quadrature identities


def _convolution_density_oracle(p, t, x):
    """Literal quadrature of the forward-smoothing integral, normalized.

    The defining integral is f(e^t (x - tau)) phi(tau / s) d tau with
    s = sqrt(1 - e^{-2t}); its total x-mass is e^{-t} s.  The first factor
    is a pair of spikes of width e^{-t} in tau, so integration is
    restricted to their support window (the rest carries < 1e-18 mass)
    with breakpoints at the spike centers.
    """
    s = np.sqrt(-np.expm1(-2.0 * t))

    def integrand(tau):
        return float(density(p, np.exp(t) * (x - tau)) * norm_pdf(tau / s))

    reach = np.exp(-t) * (p.mu + 9.0)
    hints = sorted({x - np.exp(-t) * p.mu, x, x + np.exp(-t) * p.mu})
    val, _ = scipy_quad(
        integrand,
        x - reach,
        x + reach,
        points=hints,
        limit=800,
        epsabs=1e-14,
        epsrel=1e-12,
    )
    return val / (np.exp(-t) * s)


def test_criterion_1_evolved_density_equals_convolution():
    worst = 0.0
    for theta in (0.1, 0.5, 0.9):
        for mu in (1.0, 5.0):
            p = MixtureParams(theta, mu)
            for t in (0.1, 1.0, 3.0):
                ev = evolve(p, t)
                for x in np.linspace(-mu - 2.0, mu + 2.0, 7):
                    oracle = _convolution_density_oracle(p, t, float(x))
                    worst = max(worst, abs(oracle - float(density(ev, x))))
    report(1, f"evolved density = convolution quadrature (worst {worst:.2e})", worst < 1e-8)


def test_criterion_2_score_identities():
    ok = True
    for theta, mu in ((0.2, 0.5), (0.5, 1.0), (0.7, 2.0), (0.9, 5.0)):
        p = MixtureParams(theta, mu)
        # grid sized to keep the direct score subtraction meaningful in
        # float64 (the closed forms themselves are stable everywhere)
        half = min(mu + 4.0, 12.5 / mu)
        xs = np.linspace(-half, half, 1000)

        # part 1/2: weight via density ratio = logistic form; score closed form
        w_ratio = np.exp(
            np.log(theta) + (-0.5 * (xs - mu) ** 2 - 0.5 * np.log(2 * np.pi))
            - log_density(p, xs)
        )
        ok &= np.allclose(weight(p, xs), w_ratio, rtol=1e-10)
        s = score(p, xs)
        ok &= np.allclose(s, (2.0 * w_ratio - 1.0) * mu - xs, rtol=0, atol=1e-10)

        # finite-difference cross-checks
        h = 1e-5
        fd_s = (log_density(p, xs + h) - log_density(p, xs - h)) / (2 * h)
        ok &= bool(np.max(np.abs(s - fd_s)) < 1e-6)
        fd_sp = (score(p, xs + h) - score(p, xs - h)) / (2 * h)
        ok &= bool(np.max(np.abs(score_dx(p, xs) - fd_sp)) < 1e-6)

        # part 3: closed-form score difference vs subtraction
        q = MixtureParams(1.0 - theta if theta != 0.5 else 0.3, mu)
        diff = score_diff(p, q, xs)
        ok &= np.allclose(np.abs(diff), np.abs(score(p, xs) - score(q, xs)), rtol=1e-10, atol=1e-13)

        # part 4: kernel bounds
        kern = score_ratio_kernel(p, q, xs)
        base = np.exp(-2.0 * mu * np.abs(xs))
        m = min(p.theta * q.theta, (1 - p.theta) * (1 - q.theta))
        ok &= bool(np.all(kern >= base * (1 - 1e-12)))
        ok &= bool(np.all(kern <= base / m * (1 + 1e-12)))
    report(2, "score identities (closed forms 1e-10, finite differences 1e-6)", ok)


def test_criterion_3_scoring_rule_identity():
    worst = 0.0
    for theta0 in (0.3, 0.5, 0.7):
        for theta in (0.2, 0.45, 0.85):
            for mu in (0.5, 1.0, 3.0):
                p0 = MixtureParams(theta0, mu)
                x, w = composite_legendre(-mu - 12.0, mu + 12.0, 32)
                fw = density(p0, x) * w
                gap = float((m_sm(theta, mu, x) - m_sm(theta0, mu, x)) @ fw)
                fi = fisher_divergence(p0, MixtureParams(theta, mu))
                worst = max(worst, abs(gap - fi) / max(abs(fi), 1e-30))
    report(3, f"scoring-rule identity, 27-point grid (worst rel {worst:.2e})", worst < 1e-6)


def test_criterion_4_stein_form_equals_raw_mc():
    points = [
        (0.3, 2.0, 2.0, 1.0),
        (0.5, 1.0, 1.0, 0.0),
        (0.7, 3.0, 2.2, -3.0),
        (0.1, 2.0, 1.4, 2.0),
        (0.9, 5.0, 3.2, 5.0),
    ]
    worst_z = 0.0
    for i, (theta, mu, T, x0) in enumerate(points):
        det = float(m_ddsm(theta, mu, x0, NoiseSchedule.make(T)))
        est, se = m_ddsm_mc(theta, mu, x0, T, 1_000_000, stream(777, i))
        worst_z = max(worst_z, abs(est - det) / se)
    report(4, f"noise-free form = raw MC form at 1e6 draws (worst |z| {worst_z:.2f})", worst_z < 3.0)


# ---------------------------------------------------------------------------
# isoperimetric constants


def test_criterion_5_isoperimetric_constants():
    ok = True
    for mu in (0.5, 1.0, 2.0, 3.0):
        c_half = isoperimetric_constant(MixtureParams(0.5, mu))
        ok &= abs(c_half - 2.0 * float(norm_pdf(mu))) < 1e-6
        fam = isoperimetric_constant_family(mu, np.linspace(0.05, 0.95, 19))
        ok &= abs(fam - c_half) < 1e-6  # attained at theta = 1/2
    ok &= abs(gaussian_isoperimetric_constant() - np.sqrt(2.0 / np.pi)) < 1e-6
    report(5, "isoperimetric constants: 2 phi(mu) at theta=1/2, sqrt(2/pi) pure limit", ok)


# ---------------------------------------------------------------------------
# bound suite


def test_criterion_6_bound_suite(tmp_path):
    reports, ok = run_verify_bounds((0.5, 1.0, 2.0, 3.0, 4.0), 0.01, str(tmp_path / "bounds.csv"))
    from gmscore.bounds import psi, xi

    psis = [psi(m, 2.0 * np.log(m)) for m in (2.0, 5.0, 10.0)]
    ok &= max(psis) < 3.0 * min(psis)
    for mu in (2.0, 3.0, 4.0):
        ok &= xi(mu, 2.0 * np.log(mu)) >= 1.0 - mu ** (-2.0) - 1e-12
    report(6, f"bound suite satisfied ({len(reports)} reports)", ok)


def test_criterion_7_ratio_separation():
    smr = sm_ratio(4.0, 0.01)
    ddr = ddsm_ratio(4.0, 2.0 * np.log(4.0))
    ok = smr > 16.0 and smr > 5.0 * ddr
    report(7, f"ratio separation at mu=4 (SM {smr:.1f} vs DDSM {ddr:.1f})", ok)


# ---------------------------------------------------------------------------
# headline estimation experiment

WORKERS = 1  # run_sweep parallelizes across cells on multi-core machines


@pytest.fixture(scope="module")
def sweep_main():
    """theta0=0.5, n=1e4, R=200, mu in {1,2,3,4}, T = 2 ln mu clamped at 1."""
    spec = ExperimentSpec(
        theta0=0.5,
        mu_list=(1.0, 2.0, 3.0, 4.0),
        n_list=(10_000,),
        T_rule="2ln(mu)",
        replications=200,
        seed=61_001,
        estimators=("SM", "DDSM"),
        eta=0.01,
        output_path="unused.csv",
    )
    return spec, run_sweep(spec, workers=WORKERS, write=False)


@pytest.fixture(scope="module")
def sweep_efficiency():
    """R=500 arms for the efficiency criterion: DDSM at mu=2, SM at mu in {1,3}."""
    spec_dd = ExperimentSpec(
        theta0=0.5, mu_list=(2.0,), n_list=(10_000,), T_rule="2ln(mu)",
        replications=500, seed=61_002, estimators=("DDSM",), eta=0.01,
        output_path="unused.csv",
    )
    spec_sm = ExperimentSpec(
        theta0=0.5, mu_list=(1.0, 3.0), n_list=(10_000,), T_rule="2ln(mu)",
        replications=500, seed=61_003, estimators=("SM",), eta=0.01,
        output_path="unused.csv",
    )
    return (
        run_sweep(spec_dd, workers=WORKERS, write=False),
        run_sweep(spec_sm, workers=WORKERS, write=False),
    )


def _errors(rows, estimator, mu, n=None):
    return np.array(
        [
            r.abs_error
            for r in rows
            if r.estimator == estimator and r.mu == mu and (n is None or r.n == n)
        ]
    )


def test_criterion_8_error_separation(sweep_main):
    spec, rows = sweep_main
    dd1 = np.median(_errors(rows, "DDSM", 1.0))
    dd4 = np.median(_errors(rows, "DDSM", 4.0))
    sm1 = np.median(_errors(rows, "SM", 1.0))
    sm4 = np.median(_errors(rows, "SM", 4.0))
    ok_a = dd4 <= 2.0 * dd1 and dd1 <= 2.0 * dd4
    ok_b = sm4 >= 3.0 * sm1
    sm_err4 = _errors(rows, "SM", 4.0)
    dd_err4 = _errors(rows, "DDSM", 4.0)
    wins = int(np.sum(sm_err4 > dd_err4))
    decided = int(np.sum(sm_err4 != dd_err4))
    pvalue = float(binom.sf(wins - 1, decided, 0.5))
    ok_c = pvalue < 0.01
    report(
        8,
        f"error separation: DDSM med {dd1:.4f}->{dd4:.4f}, SM med {sm1:.4f}->{sm4:.4f}, "
        f"sign test p={pvalue:.2e}",
        ok_a and ok_b and ok_c,
    )


def test_criterion_9_efficiency(sweep_efficiency):
    from gmscore.estimators import crlb

    dd_rows, sm_rows = sweep_efficiency
    n = 10_000
    hats = np.array([r.theta_hat for r in dd_rows if r.estimator == "DDSM"])
    dd_var = n * np.var(hats - 0.5, ddof=1)
    bound = crlb(0.5, 2.0)
    ok_dd = 0.5 * bound <= dd_var <= 2.0 * bound

    factors = {}
    for mu in (1.0, 3.0):
        hats = np.array(
            [r.theta_hat for r in sm_rows if r.estimator == "SM" and r.mu == mu]
        )
        factors[mu] = n * np.var(hats - 0.5, ddof=1) / crlb(0.5, mu)
    ok_sm = factors[3.0] > 5.0 * factors[1.0]
    report(
        9,
        f"efficiency: DDSM var {dd_var:.3f} vs CRLB {bound:.3f}; "
        f"SM excess factor {factors[1.0]:.1f}->{factors[3.0]:.1f}",
        ok_dd and ok_sm,
    )


@pytest.fixture(scope="module")
def sweep_small_n():
    spec = ExperimentSpec(
        theta0=0.5, mu_list=(2.0,), n_list=(1_000,), T_rule="2ln(mu)",
        replications=200, seed=61_001, estimators=("DDSM",), eta=0.01,
        output_path="unused.csv",
    )
    return run_sweep(spec, workers=WORKERS, write=False)


def test_criterion_10_root_n_rate(sweep_main, sweep_small_n):
    _, rows_large = sweep_main
    med_small = np.median(_errors(sweep_small_n, "DDSM", 2.0, n=1_000))
    med_large = np.median(_errors(rows_large, "DDSM", 2.0, n=10_000))
    scaled_small = med_small * np.sqrt(1_000)
    scaled_large = med_large * np.sqrt(10_000)
    ratio = scaled_large / scaled_small
    report(10, f"sqrt(n)-rate stability for DDSM (ratio {ratio:.2f})", 0.5 <= ratio <= 2.0)


# ---------------------------------------------------------------------------
# figure-data regeneration


def test_criterion_11_landscape(tmp_path):
    import csv

    out = str(tmp_path / "landscape.csv")
    mu = 5.0
    run_landscape(
        theta0=0.5, mu=mu, n=10_000, T=default_horizon(mu),
        grid=99, seed=61_010, output=out,
    )
    with open(out, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in r] for r in reader]
    thetas = np.array([r[header.index("theta")] for r in rows])
    loss_sm = np.array([r[header.index("loss_sm")] for r in rows])
    loss_ml = np.array([r[header.index("loss_ml")] for r in rows])
    dyn_ratio = (loss_sm.max() - loss_sm.min()) / (loss_ml.max() - loss_ml.min())
    cell = thetas[1] - thetas[0]
    argmin_gap = abs(thetas[int(np.argmin(loss_ml))] - 0.5)
    ok = dyn_ratio < 0.05 and argmin_gap <= 2.0 * cell + 1e-12
    report(
        11,
        f"landscape regeneration (SM/ML range ratio {dyn_ratio:.4f}, "
        f"ML argmin gap {argmin_gap:.4f})",
        ok,
    )
