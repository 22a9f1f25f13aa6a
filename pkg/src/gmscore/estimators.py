"""Empirical risk minimization over the compact weight space.

All four estimators reduce to minimizing a smooth scalar function of
theta on [eta, 1-eta].  Because the SM loss can be nearly flat,
derivative-based local optimizers are unreliable; the minimizer is a
global coarse-grid scan followed by golden-section refinement within the
bracketing cell, with ties broken toward smaller theta.  Deterministic by
construction.

Also provides the sandwich asymptotic variance of the SM estimator and
the Cramer-Rao lower bound.
"""

from dataclasses import dataclass

import numpy as np

from .contrasts import dm_sm_dtheta
from .divergences import fisher_information
from .model import MixtureParams, ParamSpace, density
from .quadrature import QuadratureSpec, composite_legendre, support_interval

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizerSpec:
    """Coarse-grid density and refinement tolerance for minimize()."""

    coarse_grid: int = 512
    refine_tol: float = 1e-9
    tie_break: str = "smallest-theta"

    def __post_init__(self):
        if self.coarse_grid < 64:
            raise ValueError("coarse_grid must be >= 64")
        if not self.refine_tol > 0.0:
            raise ValueError("refine_tol must be positive")
        if self.tie_break != "smallest-theta":
            raise ValueError("only smallest-theta tie breaking is supported")


@dataclass(frozen=True)
class EstimationResult:
    theta_hat: float
    loss_at_opt: float
    evaluations: int
    boundary_hit: bool


class VarianceOverflowError(RuntimeError):
    """Sandwich denominator numerically zero; carries the partial values."""

    def __init__(self, numerator, denominator):
        super().__init__(
            f"sandwich variance overflow: numerator={numerator:.6g}, "
            f"curvature={denominator:.6g}"
        )
        self.numerator = numerator
        self.denominator = denominator


def pairwise_sum(values):
    """Pairwise (tree) summation with the tree shape fixed by index."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("cannot sum an empty sequence")
    block = values
    while block.size > 1:
        half = block.size // 2
        head = block[: 2 * half]
        block = np.concatenate([head[0::2] + head[1::2], block[2 * half :]])
    return float(block[0])


def empirical_risk(evaluator, theta, data):
    """(1/n) sum of contrast values, accumulated pairwise.

    The contrast values are sorted before summation, so the result is
    bit-identical under any permutation of the data.
    """
    data = np.asarray(data, dtype=float)
    if data.size == 0:
        raise ValueError("data must be nonempty")
    vals = np.sort(np.asarray(evaluator.contrast(theta, data), dtype=float))
    return pairwise_sum(vals) / data.size


def minimize(evaluator, data, opt=OptimizerSpec(), space=ParamSpace()):
    """Minimize the empirical risk over [eta, 1-eta].

    Global scan on a coarse_grid-point uniform grid, then golden-section
    refinement inside the two cells bracketing the grid argmin.  A flat
    loss still returns a valid argmin (ties toward smaller theta) with
    the boundary_hit diagnostic set when the optimum touches the edge.
    """
    bound = evaluator.bind(np.asarray(data, dtype=float))
    evals = 0

    def risk(theta):
        nonlocal evals
        evals += 1
        return bound.risk(theta)

    grid = np.linspace(space.lo, space.hi, opt.coarse_grid)
    values = [risk(t) for t in grid]
    i = int(np.argmin(values))  # argmin takes the first (smallest theta) on ties

    # Golden-section refinement; exact ties discard the right part, so flat
    # losses drift toward smaller theta.  theta_hat is the midpoint of the
    # final bracket: a constant shift of the loss can flip comparisons
    # between near-equal values in the last iterations (float rounding), but
    # moves the returned point by at most refine_tol.
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, opt.coarse_grid - 1)]
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = risk(c), risk(d)
    while (b - a) > opt.refine_tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = risk(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = risk(d)

    theta_hat = float(0.5 * (a + b))
    boundary = (
        abs(theta_hat - space.lo) <= opt.refine_tol
        or abs(theta_hat - space.hi) <= opt.refine_tol
    )
    loss = empirical_risk(evaluator, theta_hat, data)
    return EstimationResult(
        theta_hat=theta_hat,
        loss_at_opt=loss,
        evaluations=evals,
        boundary_hit=boundary,
    )


def _population_dm_sm(theta, p0, x, fw):
    return float(dm_sm_dtheta(theta, p0.mu, x) @ fw)


def avar_sm(theta0, mu, spec=QuadratureSpec()):
    """Sandwich asymptotic variance of the SM estimator at theta0.

    Numerator: E[(d/dtheta m_SM at theta0)^2] by quadrature.  Denominator:
    the population curvature d^2/dtheta^2 E[m_SM] at theta0, by central
    finite differences of the closed-form first derivative, Richardson
    extrapolated; the plain and extrapolated values must agree to 1e-6
    relative (a step-size sanity check, not a tolerance on the result).
    """
    if not 0.0 < theta0 < 1.0:
        raise ValueError("theta0 must lie in (0,1)")
    p0 = MixtureParams(theta0, mu)
    lo, hi = support_interval(mu, spec)
    x, w = composite_legendre(lo, hi, spec.nodes)
    fw = density(p0, x) * w

    numerator = float((dm_sm_dtheta(theta0, mu, x) ** 2) @ fw)

    def gprime(step):
        return (
            _population_dm_sm(theta0 + step, p0, x, fw)
            - _population_dm_sm(theta0 - step, p0, x, fw)
        ) / (2.0 * step)

    h = 1e-5
    plain = gprime(h)
    curvature = (4.0 * gprime(h / 2.0) - plain) / 3.0  # Richardson
    if abs(curvature) < 1e-30:
        raise VarianceOverflowError(numerator, curvature)
    if abs(plain - curvature) > 1e-4 * abs(curvature):
        raise VarianceOverflowError(numerator, curvature)
    return numerator / curvature**2


def crlb(theta0, mu, spec=QuadratureSpec()):
    """Cramer-Rao lower bound 1/I(theta0) for the mixture weight."""
    if not 0.0 < theta0 < 1.0:
        raise ValueError("theta0 must lie in (0,1)")
    return 1.0 / fisher_information(MixtureParams(theta0, mu), spec)
