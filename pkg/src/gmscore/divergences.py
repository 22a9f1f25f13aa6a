"""Fisher divergence, Fisher information, and isoperimetric constants.

The Fisher divergence between two family members has the closed-form
integrand (2*mu*(theta-theta*))^2 * kernel(x)^2 from the score-difference
identity; fisher_divergence evaluates both that form and the direct
score-subtraction form and insists they agree.

The isoperimetric constant of a measure on the real line is the infimum
over x of f(x)/min(F(x), 1-F(x)); for this family the infimum over the
whole family equals 2*phi(mu), attained at theta = 1/2, x = 0.
"""

import numpy as np

from .gaussian import norm_cdf, norm_pdf, norm_sf
from .model import (
    MixtureParams,
    cdf,
    density,
    dlogf_dtheta,
    score,
    score_ratio_kernel,
    sf,
)
from .quadrature import QuadratureError, QuadratureSpec, composite_legendre, support_interval

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _expect(values_fn, p, spec):
    """Integrate values_fn(x) * f_p(x) over the truncated support."""
    lo, hi = support_interval(p.mu, spec)
    x, w = composite_legendre(lo, hi, spec.nodes)
    return float((values_fn(x) * density(p, x)) @ w)


def fisher_divergence(p_true, p_model, spec=QuadratureSpec()):
    """Fisher divergence FI(P_true, P_model) = E_true[(s_model - s_true)^2].

    Computed two ways -- direct score subtraction and the closed-form
    kernel integrand -- which must agree to 1e-8 relative; disagreement
    raises QuadratureError with the achieved agreement.
    """
    if p_true.mu != p_model.mu:
        raise ValueError("family members must share mu")
    direct = _expect(
        lambda x: (score(p_model, x) - score(p_true, x)) ** 2, p_true, spec
    )
    dtheta = p_model.theta - p_true.theta
    closed = _expect(
        lambda x: (2.0 * p_true.mu * dtheta * score_ratio_kernel(p_true, p_model, x)) ** 2,
        p_true,
        spec,
    )
    scale = max(abs(direct), abs(closed), 1e-30)
    agreement = abs(direct - closed) / scale
    if scale > 1e-25 and agreement > 1e-8:
        raise QuadratureError(
            f"direct and closed-form Fisher divergence disagree "
            f"(relative {agreement:.2e})",
            achieved=agreement,
        )
    return closed


def fisher_information(p, spec=QuadratureSpec()):
    """Fisher information for theta, I(theta) = E[(d/dtheta log f)^2]."""
    return _expect(lambda x: dlogf_dtheta(p, x) ** 2, p, spec)


def isoperimetric_profile(p, x):
    """Boundary-to-mass profile f(x) / min(F(x), 1-F(x))."""
    f = density(p, x)
    return f / np.minimum(cdf(p, x), sf(p, x))


def _golden_min(fn, a, b, tol=1e-10):
    """Golden-section minimum of a unimodal scalar function on [a, b]."""
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    while (b - a) > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fn(d)
    return min(fc, fd)


def _profile_minimum(profile_fn, lo, hi, grid_points=4096):
    """Global grid scan plus golden-section refinement in the best cell.

    The grid-first strategy avoids assuming the profile is unimodal.
    """
    xs = np.linspace(lo, hi, grid_points)
    vals = profile_fn(xs)
    i = int(np.argmin(vals))
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, grid_points - 1)]
    refined = _golden_min(lambda x: float(profile_fn(np.asarray([x]))[0]), a, b)
    return min(float(vals[i]), refined)


def isoperimetric_constant(p, spec=QuadratureSpec()):
    """Isoperimetric constant of one mixture member via the 1-d profile."""
    lo, hi = -p.mu - 8.0, p.mu + 8.0
    return _profile_minimum(lambda x: isoperimetric_profile(p, x), lo, hi)


def gaussian_isoperimetric_constant():
    """Same machinery applied to N(0,1); equals 2*phi(0) = sqrt(2/pi)."""

    def profile(x):
        return norm_pdf(x) / np.minimum(norm_cdf(x), norm_sf(x))

    return _profile_minimum(profile, -8.0, 8.0)


def isoperimetric_constant_family(mu, theta_grid=None, spec=QuadratureSpec()):
    """Family constant: min over theta of the per-member constant.

    The default 21-point theta grid is a chosen resolution; the family
    infimum is attained at theta = 1/2, which every grid here contains.
    """
    if theta_grid is None:
        theta_grid = np.linspace(0.01, 0.99, 21)
    theta_grid = np.asarray(theta_grid, dtype=float)
    if theta_grid.size == 0:
        raise ValueError("theta_grid must be nonempty")
    if np.any((theta_grid <= 0.0) | (theta_grid >= 1.0)):
        raise ValueError("theta_grid must lie inside (0,1)")
    return min(
        isoperimetric_constant(MixtureParams(float(t), mu), spec) for t in theta_grid
    )
