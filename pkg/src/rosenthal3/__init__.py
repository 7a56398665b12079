"""Sharp third-moment bounds for sums of independent summands.

Summands satisfy ``E X_i <= 0``, ``sum E X_i^2 <= 1`` and
``sum E (X_i)_+^3 <= beta``.  The package computes the bounds, the finite-cap
Gaussian/Poisson mixture bound behind them, and checks everything against
exact and Monte Carlo expectations over finite-support summands.
"""

from .bounds import (
    BoundResult,
    Constraints,
    PreconditionError,
    abs_cube_bound,
    corollary_bound,
    cube_plus_bound,
    mean_plus_bound,
    mean_plus_majorant,
    optimize_corollary,
    sup_ratio,
    theorem_bound,
)
from .function_class import (
    ExpTerm,
    F3Function,
    Hinge,
    evaluate,
    expect_gaussian_affine,
    parse_literal,
    third_derivative_at_infinity,
)
from .mixture import MixtureParams, convergence_profile, mixture_expectation, truncation_index
from .normal_kernels import (
    GaussianAffine,
    abs_moment3,
    expect_exp,
    expect_hinge,
    partial_moment_plus,
    std_normal_cdf,
    std_normal_pdf,
)
from .verification import (
    AtomicVariable,
    ConstraintReport,
    DistributionSpec,
    check_conditions,
    exact_expectation,
    exact_expectation_truncated,
    extremal_spec,
    monte_carlo_expectation,
    random_valid_spec,
    verify_inequality,
)

__version__ = "0.1.0"
