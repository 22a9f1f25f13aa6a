import numpy as np
import pytest

from gmscore.bounds import exp_abs_moment_quadrature
from gmscore.gaussian import norm_pdf
from gmscore.model import (
    EvolvedParams,
    MixtureParams,
    ParamSpace,
    cdf,
    density,
    evolve,
    log_density,
    sample,
    sample_components,
    sample_forward,
    score,
    score_diff,
    score_dx,
    score_ratio_kernel,
    sf,
    stream,
    weight,
    weight_midpoint,
)
from gmscore.quadrature import composite_legendre

PHI_5 = 1.4867195147342977e-06  # phi(5), 50-digit evaluation


def test_param_validation():
    with pytest.raises(ValueError):
        MixtureParams(0.0, 1.0)
    with pytest.raises(ValueError):
        MixtureParams(1.0, 1.0)
    with pytest.raises(ValueError):
        MixtureParams(0.5, 0.0)
    with pytest.raises(ValueError):
        ParamSpace(0.5)
    space = ParamSpace(0.01)
    assert (space.lo, space.hi) == (0.01, 0.99)


def test_density_values():
    assert density(MixtureParams(0.5, 5.0), 0.0) == pytest.approx(PHI_5, rel=1e-12)
    # 50-digit oracle for an asymmetric point
    assert density(MixtureParams(0.3, 2.0), 1.5) == pytest.approx(
        0.10623047591582187538, rel=1e-13
    )


def test_density_symmetry():
    xs = np.linspace(-8, 8, 101)
    for theta in (0.1, 0.3, 0.7):
        p = MixtureParams(theta, 2.0)
        q = MixtureParams(1.0 - theta, 2.0)
        np.testing.assert_allclose(density(p, xs), density(q, -xs), rtol=1e-14)
        np.testing.assert_allclose(cdf(p, xs), 1.0 - cdf(q, -xs), atol=1e-14)


def test_density_normalization():
    for mu in (0.5, 1.0, 3.0, 10.0):
        p = MixtureParams(0.3, mu)
        x, w = composite_legendre(-mu - 12.0, mu + 12.0, 48)
        assert abs(float(density(p, x) @ w) - 1.0) < 1e-8


def test_cdf_values():
    assert cdf(MixtureParams(0.5, 3.0), 0.0) == pytest.approx(0.5, abs=1e-15)
    assert cdf(MixtureParams(0.2, 1.0), 40.0) == pytest.approx(1.0, abs=1e-12)
    assert cdf(MixtureParams(0.7, 1.0), 0.0) == pytest.approx(
        0.36346210157258282057, rel=1e-13
    )
    # monotone, and sf complements without cancellation
    xs = np.linspace(-9.0, 9.0, 301)
    vals = cdf(MixtureParams(0.7, 1.0), xs)
    assert np.all(np.diff(vals) > 0)
    np.testing.assert_allclose(
        sf(MixtureParams(0.7, 1.0), xs), 1.0 - vals, atol=1e-12
    )


def test_weight_values():
    assert weight(MixtureParams(0.5, 2.0), 0.0) == pytest.approx(0.5, abs=1e-15)
    assert weight(MixtureParams(0.9, 2.0), -50.0) < 1e-60
    assert weight(MixtureParams(0.3, 1.0), 0.5) == pytest.approx(
        0.53810152622444889329, rel=1e-13
    )


def test_weight_no_overflow_far_out():
    p = MixtureParams(0.3, 10.0)
    vals = weight(p, np.array([-1e3, -31.0, 31.0, 1e3]))
    assert np.all(np.isfinite(vals))
    assert np.all((vals >= 0.0) & (vals <= 1.0))


def test_weight_midpoint_sign():
    # midpoint at log((1-theta)/theta)/(2 mu); flipping the log's sign
    # puts the half-weight point on the wrong side of the origin
    for theta, mu in ((0.2, 0.7), (0.5, 2.0), (0.9, 3.0)):
        p = MixtureParams(theta, mu)
        b = weight_midpoint(p)
        assert weight(p, b) == pytest.approx(0.5, abs=1e-12)
        if theta != 0.5:
            assert weight(p, -b) != pytest.approx(0.5, abs=1e-3)


def _fd(fn, x, h=1e-5):
    return (fn(x + h) - fn(x - h)) / (2.0 * h)


@pytest.mark.parametrize("theta,mu", [(0.5, 1.0), (0.2, 2.0), (0.99, 5.0), (0.7, 0.5)])
def test_score_matches_log_density_derivative(theta, mu):
    p = MixtureParams(theta, mu)
    xs = np.linspace(-mu - 5.0, mu + 5.0, 211)
    fd = _fd(lambda x: log_density(p, x), xs)
    np.testing.assert_allclose(score(p, xs), fd, atol=1e-6)


def test_score_at_symmetric_origin():
    assert score(MixtureParams(0.5, 3.0), 0.0) == pytest.approx(0.0, abs=1e-15)


def test_scores_nearly_coincide_away_from_midpoint():
    # at mu=5 the family's scores differ only on a set of tiny mass
    mu = 5.0
    thetas = (0.01, 0.1, 0.5, 0.9, 0.99)
    xs = np.linspace(-mu - 6.0, mu + 6.0, 4001)
    for ta in thetas:
        pa = MixtureParams(ta, mu)
        for tb in thetas:
            if tb <= ta:
                continue
            gap = np.abs(score(pa, xs) - score(MixtureParams(tb, mu), xs))
            big = gap > 0.5
            x, w = composite_legendre(-mu - 6.0, mu + 6.0, 32)
            gapq = np.abs(score(pa, x) - score(MixtureParams(tb, mu), x))
            mass = float(((gapq > 0.5) * density(pa, x)) @ w)
            assert mass < 1e-3


@pytest.mark.parametrize("theta,mu", [(0.5, 0.1), (0.3, 2.0), (0.9, 4.0)])
def test_score_dx_matches_score_derivative(theta, mu):
    p = MixtureParams(theta, mu)
    xs = np.linspace(-mu - 5.0, mu + 5.0, 211)
    fd = _fd(lambda x: score(p, x), xs)
    np.testing.assert_allclose(score_dx(p, xs), fd, atol=1e-6)


def test_score_dx_closed_form_point():
    # 4 mu^2 w(1-w) - 1 at the symmetric origin
    assert score_dx(MixtureParams(0.5, 0.1), 0.0) == pytest.approx(-0.99, rel=1e-14)


def test_score_dx_unimodal_regime_negative():
    mu = 0.9 * np.sqrt(27.0 / 32.0)  # below the bimodality threshold
    xs = np.linspace(-10, 10, 2001)
    for theta in (0.1, 0.5, 0.8):
        assert np.all(score_dx(MixtureParams(theta, mu), xs) < 0.0)


def test_score_dx_tail_limit():
    p = MixtureParams(0.4, 2.0)
    np.testing.assert_allclose(
        score_dx(p, np.array([-80.0, 80.0])), -1.0, atol=1e-12
    )


def test_score_diff_closed_form():
    p1 = MixtureParams(0.2, 1.0)
    p2 = MixtureParams(0.8, 1.0)
    xs = np.linspace(-3, 3, 41)
    direct = score(p1, xs) - score(p2, xs)
    np.testing.assert_allclose(score_diff(p1, p2, xs), direct, rtol=1e-12)
    assert np.all(np.abs(score_diff(p1, p1, xs)) == 0.0)
    with pytest.raises(ValueError):
        score_diff(p1, MixtureParams(0.8, 2.0), 0.0)


def test_score_ratio_kernel_bounds():
    # exp(-2 mu |x|) <= kernel <= exp(-2 mu |x|)/m, m = tt* ^ (1-t)(1-t*)
    for t1, t2, mu in ((0.2, 0.8, 1.0), (0.1, 0.3, 2.5), (0.6, 0.6, 0.5)):
        p1, p2 = MixtureParams(t1, mu), MixtureParams(t2, mu)
        xs = np.linspace(-12, 12, 401)
        kern = score_ratio_kernel(p1, p2, xs)
        base = np.exp(-2.0 * mu * np.abs(xs))
        m = min(t1 * t2, (1 - t1) * (1 - t2))
        assert np.all(kern >= base * (1 - 1e-12))
        assert np.all(kern <= base / m * (1 + 1e-12))


def test_evolve_basics():
    p = MixtureParams(0.3, 5.0)
    assert evolve(p, 0.0).mu == 5.0
    assert evolve(p, np.log(2.0)).mu == pytest.approx(2.5, rel=1e-15)
    assert evolve(p, 1.0).theta == 0.3
    with pytest.raises(ValueError):
        evolve(p, -0.1)


def test_evolve_semigroup():
    p = MixtureParams(0.3, 5.0)
    two_step = evolve(evolve(p, 0.7), 0.5)
    one_step = evolve(p, 1.2)
    assert two_step.mu == pytest.approx(one_step.mu, rel=1e-14)
    assert isinstance(two_step, EvolvedParams)


def test_evolved_params_work_everywhere():
    ev = evolve(MixtureParams(0.4, 2.0), 0.8)
    xs = np.linspace(-6, 6, 51)
    fd = _fd(lambda x: log_density(ev, x), xs)
    np.testing.assert_allclose(score(ev, xs), fd, atol=1e-6)


def test_sample_clt_band():
    p = MixtureParams(0.5, 3.0)
    x = sample(p, 100_000, stream(42))
    # E X = 0, Var X = 1 + mu^2 = 10
    se = np.sqrt(10.0 / 100_000)
    assert abs(x.mean()) < 3.0 * se


def test_sample_label_fraction():
    p = MixtureParams(0.9, 3.0)
    _, labels = sample_components(p, 100_000, stream(43))
    se = np.sqrt(0.9 * 0.1 / 100_000)
    assert abs(labels.mean() - 0.9) < 3.0 * se


def test_sample_determinism():
    p = MixtureParams(0.42, 1.5)
    a = sample(p, 1000, stream(7, 3))
    b = sample(p, 1000, stream(7, 3))
    np.testing.assert_array_equal(a, b)
    c = sample(p, 1000, stream(7, 4))
    assert not np.array_equal(a, c)


def test_sample_forward_degenerate_at_zero():
    out = sample_forward(np.array([1.3, -0.2]), 0.0, stream(1))
    np.testing.assert_array_equal(out, [1.3, -0.2])


def test_sample_forward_long_time_variance():
    x0 = np.full(100_000, 5.0)
    xt = sample_forward(x0, 20.0, stream(5))
    # Var -> 1; chi-square band for the sample variance
    assert abs(xt.var(ddof=1) - 1.0) < 3.0 * np.sqrt(2.0 / 100_000)


def test_sample_forward_marginal_matches_evolve():
    p = MixtureParams(0.3, 2.0)
    t = 0.7
    n = 100_000
    rng = stream(11)
    x0 = sample(p, n, rng)
    xt = np.sort(sample_forward(x0, t, rng))
    grid_cdf = cdf(evolve(p, t), xt)
    emp_hi = np.arange(1, n + 1) / n
    emp_lo = np.arange(0, n) / n
    ks = max(np.max(np.abs(emp_hi - grid_cdf)), np.max(np.abs(grid_cdf - emp_lo)))
    assert ks < 1.63 / np.sqrt(n)


def test_exp_abs_moment_family_oracle():
    # E_{P_theta}[exp(-t|X|)] equals the single-Gaussian value by symmetry
    # and obeys the derivation's capped-sum bound for t >= mu.  (The
    # stated combined min-form is violated near t = mu; see the ledger.)
    for theta in (0.2, 0.5, 0.8):
        for mu in (0.5, 1.0, 2.0):
            for fac in (1.1, 1.5, 3.0):
                t = fac * mu
                p = MixtureParams(theta, mu)
                lo, hi = -mu - 12.0, mu + 12.0
                val = 0.0
                for a, b in ((lo, 0.0), (0.0, hi)):
                    x, w = composite_legendre(a, b, 32)
                    val += float((np.exp(-t * np.abs(x)) * density(p, x)) @ w)
                single = exp_abs_moment_quadrature(mu, t)
                assert val == pytest.approx(single, rel=1e-10)
                cap = np.sqrt(np.pi / 2.0)
                bound = (min(cap, 1.0 / (t - mu)) + min(cap, 1.0 / (t + mu))) * float(
                    norm_pdf(mu)
                )
                assert val <= bound * (1 + 1e-10)


def test_log_density_matches_density():
    p = MixtureParams(0.25, 2.0)
    xs = np.linspace(-7, 7, 101)
    np.testing.assert_allclose(np.exp(log_density(p, xs)), density(p, xs), rtol=1e-12)
