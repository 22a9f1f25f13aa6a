"""Two-component Gaussian location mixture on the real line.

The family has densities theta*phi(x-mu) + (1-theta)*phi(x+mu) with known
location mu > 0 and unknown weight theta in (0,1).  This module provides
exact densities, scores, weight functions, samplers, and the forward
(Ornstein-Uhlenbeck) time evolution, which maps a member to the member
with location exp(-t)*mu.
"""

from dataclasses import dataclass

import numpy as np

from .gaussian import norm_cdf, norm_logpdf, norm_pdf, norm_sf, sigmoid


@dataclass(frozen=True)
class MixtureParams:
    """A member of the mixture family: weight theta, location mu."""

    theta: float
    mu: float

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must lie in (0,1), got {self.theta}")
        if not self.mu > 0.0:
            raise ValueError(f"mu must be positive, got {self.mu}")


@dataclass(frozen=True)
class ParamSpace:
    """Compact weight space [eta, 1-eta] with boundary margin eta."""

    eta: float = 0.01

    def __post_init__(self):
        if not 0.0 < self.eta < 0.5:
            raise ValueError(f"eta must lie in (0, 1/2), got {self.eta}")

    @property
    def lo(self):
        return self.eta

    @property
    def hi(self):
        return 1.0 - self.eta

    def clip(self, theta):
        return min(max(theta, self.lo), self.hi)


@dataclass(frozen=True)
class EvolvedParams:
    """Forward-diffused member at time t: same theta, location exp(-t)*mu.

    Exposes .theta and .mu so every mixture operation applies unchanged.
    """

    base: MixtureParams
    t: float
    mu_t: float

    @property
    def theta(self):
        return self.base.theta

    @property
    def mu(self):
        return self.mu_t


def _theta_mu(p):
    return float(p.theta), float(p.mu)


def density(p, x):
    """Mixture density theta*phi(x-mu) + (1-theta)*phi(x+mu)."""
    theta, mu = _theta_mu(p)
    x = np.asarray(x, dtype=float)
    return theta * norm_pdf(x - mu) + (1.0 - theta) * norm_pdf(x + mu)


def log_density(p, x):
    """log of the mixture density via log-sum-exp; safe for |x| ~ 1e3."""
    theta, mu = _theta_mu(p)
    x = np.asarray(x, dtype=float)
    return np.logaddexp(
        np.log(theta) + norm_logpdf(x - mu),
        np.log1p(-theta) + norm_logpdf(x + mu),
    )


def cdf(p, x):
    """Mixture distribution function theta*Phi(x-mu) + (1-theta)*Phi(x+mu)."""
    theta, mu = _theta_mu(p)
    x = np.asarray(x, dtype=float)
    return theta * norm_cdf(x - mu) + (1.0 - theta) * norm_cdf(x + mu)


def sf(p, x):
    """Complementary cdf, computed from Phi(-x) terms to avoid cancellation."""
    theta, mu = _theta_mu(p)
    x = np.asarray(x, dtype=float)
    return theta * norm_sf(x - mu) + (1.0 - theta) * norm_sf(x + mu)


def weight(p, x):
    """Posterior weight of the +mu component, w = theta*phi(x-mu)/f(x).

    Evaluated in the logistic form sigmoid(2*mu*x + log(theta/(1-theta)))
    (the direct density ratio overflows once |x|*mu is large).  The
    midpoint w = 1/2 sits at x = log((1-theta)/theta)/(2*mu).
    """
    theta, mu = _theta_mu(p)
    x = np.asarray(x, dtype=float)
    return sigmoid(2.0 * mu * x + np.log(theta / (1.0 - theta)))


def weight_midpoint(p):
    """The x where weight(p, x) = 1/2."""
    theta, mu = _theta_mu(p)
    return np.log((1.0 - theta) / theta) / (2.0 * mu)


def score(p, x):
    """Score d/dx log f(x) = (2*w(x) - 1)*mu - x."""
    theta, mu = _theta_mu(p)
    x = np.asarray(x, dtype=float)
    w = weight(p, x)
    return (2.0 * w - 1.0) * mu - x


def score_dx(p, x):
    """Score derivative s'(x) = 4*mu^2*w(1-w) - 1."""
    theta, mu = _theta_mu(p)
    w = weight(p, x)
    return 4.0 * mu * mu * w * (1.0 - w) - 1.0


def score_ratio_kernel(p1, p2, x):
    """The factor phi(x-mu)*phi(x+mu) / (f_p1(x)*f_p2(x)).

    Expanding the denominator gives 1/(A*e^{2mux} + B + C*e^{-2mux}) with
    A = t1*t2, B = t1*(1-t2)+t2*(1-t1), C = (1-t1)*(1-t2); factoring out
    exp(-2*mu*|x|) keeps every exponent nonpositive, so the expression is
    stable for all x.  Requires p1.mu == p2.mu.
    """
    t1, mu = _theta_mu(p1)
    t2, mu2 = _theta_mu(p2)
    if mu != mu2:
        raise ValueError(f"mismatched locations: {mu} != {mu2}")
    x = np.asarray(x, dtype=float)
    a = t1 * t2
    b = t1 * (1.0 - t2) + t2 * (1.0 - t1)
    c = (1.0 - t1) * (1.0 - t2)
    ax = np.abs(x)
    denom = (
        a * np.exp(2.0 * mu * (x - ax))
        + b * np.exp(-2.0 * mu * ax)
        + c * np.exp(-2.0 * mu * (x + ax))
    )
    return np.exp(-2.0 * mu * ax) / denom


def score_diff(p1, p2, x):
    """Signed score difference s_p1(x) - s_p2(x) in closed form.

    Equals 2*mu*(theta1-theta2)*phi(x-mu)*phi(x+mu)/(f_p1(x)*f_p2(x)).
    """
    t1, mu = _theta_mu(p1)
    t2, _ = _theta_mu(p2)
    return 2.0 * mu * (t1 - t2) * score_ratio_kernel(p1, p2, x)


def dlogf_dtheta(p, x):
    """Weight-space score d/dtheta log f = w/theta - (1-w)/(1-theta)."""
    theta, _ = _theta_mu(p)
    w = weight(p, x)
    return w / theta - (1.0 - w) / (1.0 - theta)


def evolve(p, t):
    """Forward-diffused member at time t >= 0 (location exp(-t)*mu)."""
    if t < 0.0:
        raise ValueError(f"diffusion time must be >= 0, got {t}")
    base = p.base if isinstance(p, EvolvedParams) else p
    mu0 = p.mu if isinstance(p, EvolvedParams) else base.mu
    return EvolvedParams(base=base, t=float(t), mu_t=float(np.exp(-t) * mu0))


def sample_components(p, n, rng):
    """Draw n iid points plus their component labels (True = +mu)."""
    if n < 1:
        raise ValueError("need n >= 1")
    theta, mu = _theta_mu(p)
    labels = rng.random(n) < theta
    x = np.where(labels, mu, -mu) + rng.standard_normal(n)
    return x, labels


def sample(p, n, rng):
    """Draw n iid points from the mixture; deterministic given the stream."""
    return sample_components(p, n, rng)[0]


def sample_forward(x0, t, rng):
    """One forward-noised draw X_t | X_0 = x0 ~ N(e^{-t} x0, 1 - e^{-2t})."""
    if t < 0.0:
        raise ValueError(f"diffusion time must be >= 0, got {t}")
    x0 = np.asarray(x0, dtype=float)
    sd = np.sqrt(-np.expm1(-2.0 * t))
    return np.exp(-t) * x0 + sd * rng.standard_normal(x0.shape)


def stream(seed, *path):
    """Named per-task random stream: default_rng seeded by (seed, *path).

    Deriving streams from the (seed, index...) tuple makes replications
    independent of execution order and worker count.
    """
    return np.random.default_rng([int(seed)] + [int(i) for i in path])
