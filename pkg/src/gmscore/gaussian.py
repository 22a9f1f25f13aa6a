"""Standard normal pdf/cdf helpers shared across the package.

All deterministic operations go through these erf/erfc based closed forms,
which are accurate to ~1e-16 relative over the ranges used here (scipy's
ndtr/log_ndtr are erfc-based).  No stochastic approximation anywhere.
"""

import numpy as np
from scipy.special import log_ndtr as _log_ndtr
from scipy.special import ndtr as _ndtr

SQRT_2PI = float(np.sqrt(2.0 * np.pi))
LOG_SQRT_2PI = float(0.5 * np.log(2.0 * np.pi))


def norm_pdf(x):
    """Standard normal density phi(x)."""
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / SQRT_2PI


def norm_logpdf(x):
    """log phi(x), exact for large |x| where phi underflows."""
    x = np.asarray(x, dtype=float)
    return -0.5 * x * x - LOG_SQRT_2PI


def norm_cdf(x):
    """Standard normal distribution function Phi(x)."""
    return _ndtr(np.asarray(x, dtype=float))


def norm_sf(x):
    """Complementary cdf 1 - Phi(x) without cancellation for large x."""
    return _ndtr(-np.asarray(x, dtype=float))


def norm_logcdf(x):
    """log Phi(x), stable far into the left tail."""
    return _log_ndtr(np.asarray(x, dtype=float))


def sigmoid(z):
    """Logistic function 1/(1+exp(-z)) evaluated without overflow."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out
