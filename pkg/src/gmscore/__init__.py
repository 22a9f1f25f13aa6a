"""Estimation and exact analysis for the two-component Gaussian mixture
theta*N(mu,1) + (1-theta)*N(-mu,1) with known mu and unknown weight theta.

Provides maximum likelihood, vanilla score matching, and diffusion-based
denoising score matching estimators; exact Fisher divergence and
isoperimetric-constant evaluators; the closed-form bound suite; and a
seeded Monte Carlo experiment harness with a CLI.
"""

from .bounds import (
    BoundReport,
    bound_ratio_report,
    curvature_sm,
    ddsm_ratio,
    exp_abs_moment,
    gaussian_tail_bounds,
    lipschitz_norm_sm,
    psi,
    sm_ratio,
    xi,
)
from .contrasts import (
    ContrastEvaluator,
    NoiseSchedule,
    default_horizon,
    dm_sm_dtheta,
    m_ddsm,
    m_ddsm_mc,
    m_dsm_fixed_t,
    m_ml,
    m_sm,
)
from .divergences import (
    fisher_divergence,
    fisher_information,
    gaussian_isoperimetric_constant,
    isoperimetric_constant,
    isoperimetric_constant_family,
    isoperimetric_profile,
)
from .estimators import (
    EstimationResult,
    OptimizerSpec,
    VarianceOverflowError,
    avar_sm,
    crlb,
    empirical_risk,
    minimize,
)
from .harness import (
    ExperimentRow,
    ExperimentSpec,
    run_landscape,
    run_isoperimetric,
    run_sweep,
    run_verify_bounds,
)
from .model import (
    EvolvedParams,
    MixtureParams,
    ParamSpace,
    cdf,
    density,
    evolve,
    log_density,
    sample,
    sample_forward,
    score,
    score_diff,
    score_dx,
    weight,
)
from .quadrature import QuadratureError, QuadratureSpec

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
