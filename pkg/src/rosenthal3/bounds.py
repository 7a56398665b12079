"""Third-moment bounds for sums of independent summands.

Every summand satisfies ``E X_i <= 0``; jointly ``sum E X_i^2 <= 1`` and
``sum E (X_i)_+^3 <= beta``.  ``Z`` is standard normal throughout.
"""

from dataclasses import dataclass, field
import math

from .function_class import F3Function, expect_gaussian_affine, third_derivative_at_infinity
from .normal_kernels import abs_moment3, partial_moment_plus

INEQUALITIES = ("theorem", "cube_plus", "abs_cube", "corollary", "mean_plus", "mixture")

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class PreconditionError(ValueError):
    """Raised when a bound is requested outside its hypotheses."""


@dataclass(frozen=True)
class Constraints:
    """Moment conditions on the summands.

    ``beta = 0`` is accepted as the continuous extension of the bounds; it is
    flagged in the parameters of every result built from it.
    """

    beta: float
    zero_means: bool = False
    variance_budget: float = 1.0
    means_nonpositive: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise PreconditionError(f"beta must be finite and >= 0, got {self.beta}")
        if self.variance_budget != 1.0:
            raise PreconditionError("the variance budget is normalized to 1")

    def describe(self):
        out = {"beta": self.beta, "zero_means": self.zero_means}
        if self.beta == 0:
            out["beta_zero_extension"] = True
        return out


@dataclass
class BoundResult:
    """A certified upper bound and how it was obtained.

    ``value`` already includes ``error_budget``.
    """

    value: float
    inequality_id: str
    parameters: dict = field(default_factory=dict)
    error_budget: float = 0.0

    def __post_init__(self):
        if self.inequality_id not in INEQUALITIES:
            raise ValueError(f"unknown inequality id {self.inequality_id!r}")

    def to_dict(self):
        return {
            "value": self.value,
            "inequality_id": self.inequality_id,
            "parameters": dict(self.parameters),
            "error_budget": self.error_budget,
        }


def _as_constraints(c):
    return c if isinstance(c, Constraints) else Constraints(beta=float(c))


def theorem_bound(f, c):
    """``E f(Z) + f'''(inf-) beta / 6``; infinite when ``f'''`` is unbounded."""
    c = _as_constraints(c)
    d3 = third_derivative_at_infinity(f)
    params = {"f": f.to_dict(), "third_derivative_at_infinity": d3, **c.describe()}
    if math.isinf(d3):
        return BoundResult(math.inf, "theorem", params)
    value = expect_gaussian_affine(f) + d3 / 6.0 * c.beta
    return BoundResult(value, "theorem", params)


def cube_plus_bound(x, c):
    """Bound on ``E(S - x)_+^3``: ``E(Z - x)_+^3 + beta``."""
    c = _as_constraints(c)
    gauss = partial_moment_plus(x, 3)
    return BoundResult(gauss + c.beta, "cube_plus", {"x": float(x), "gaussian_term": gauss, **c.describe()})


def abs_cube_bound(x, sum_abs3, c):
    """Bound on ``E|S - x|^3`` for zero-mean summands.

    ``sum_abs3`` is ``sum E|X_i|^3``; it cannot be recovered from ``beta``
    because the negative parts are unconstrained.
    """
    c = _as_constraints(c)
    if not c.zero_means:
        raise PreconditionError("the absolute third-moment bound requires zero-mean summands")
    if not sum_abs3 >= 0:
        raise PreconditionError(f"sum_abs3 must be >= 0, got {sum_abs3}")
    gauss = abs_moment3(x)
    return BoundResult(
        gauss + sum_abs3,
        "abs_cube",
        {"x": float(x), "sum_abs3": float(sum_abs3), "gaussian_term": gauss, **c.describe()},
    )


def _check_p_a(p, a):
    if not 0 < p < 3:
        raise PreconditionError(f"p must lie in (0, 3), got {p}")
    if not (a > 0 and math.isfinite(a)):
        raise PreconditionError(f"a must be a positive real, got {a}")


def sup_ratio(p, a):
    """``sup_{u >= 0} u^p / (u + a)^3``, attained at ``u = p a / (3 - p)``."""
    _check_p_a(p, a)
    return p ** p * (3.0 - p) ** (3.0 - p) / (27.0 * a ** (3.0 - p))


def corollary_bound(p, a, c):
    """Bound on ``E S_+^p`` for ``0 < p < 3`` through the threshold ``-a``.

    Since ``u^p <= sup_ratio(p, a) (u + a)^3`` on ``u >= 0``, the cube bound at
    ``x = -a`` transfers.  The result is affine in beta with slope
    ``sup_ratio(p, a)``; both pieces are reported.
    """
    c = _as_constraints(c)
    ratio = sup_ratio(p, a)
    gauss = partial_moment_plus(-a, 3)
    params = {
        "p": float(p),
        "a": float(a),
        "constant": ratio * gauss,
        "beta_coefficient": ratio,
        **c.describe(),
    }
    return BoundResult(ratio * (gauss + c.beta), "corollary", params)


def golden_section(func, lo, hi, tol=1e-10, max_iter=500):
    """Minimize a unimodal ``func`` on ``[lo, hi]``; returns ``(x, func(x))``."""
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = func(x1), func(x2)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = func(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = func(x2)
    x = x1 if f1 <= f2 else x2
    return x, min(f1, f2)


def _bracket_log(func, start=0.0, step=1.0, max_expand=60):
    """Expand a bracket ``(lo, mid, hi)`` with ``func(mid)`` below both ends."""
    lo, mid, hi = start - step, start, start + step
    flo, fmid, fhi = func(lo), func(mid), func(hi)
    for _ in range(max_expand):
        if fmid <= flo and fmid <= fhi:
            return lo, hi
        if flo < fmid:
            hi, fhi = mid, fmid
            mid, fmid = lo, flo
            step *= 2.0
            lo = mid - step
            flo = func(lo)
        else:
            lo, flo = mid, fmid
            mid, fmid = hi, fhi
            step *= 2.0
            hi = mid + step
            fhi = func(hi)
    raise RuntimeError("could not bracket the minimizer of the corollary bound")


def optimize_corollary(p, c, tol=1e-6):
    """Choose ``a`` to minimize :func:`corollary_bound`; returns ``(a_star, result)``.

    Golden-section search on ``log a``; the objective blows up as ``a -> 0``
    and as ``a -> inf``, so an expanding bracket always closes.
    """
    c = _as_constraints(c)
    _check_p_a(p, 1.0)

    def objective(log_a):
        return corollary_bound(p, math.exp(log_a), c).value

    lo, hi = _bracket_log(objective)
    # Width in log a below tol / a_max gives width in a below tol.
    log_tol = tol / math.exp(hi) / 4.0
    log_a, _ = golden_section(objective, lo, hi, tol=log_tol)
    a_star = math.exp(log_a)
    result = corollary_bound(p, a_star, c)
    result.parameters["optimized"] = True
    return a_star, result


def mean_plus_majorant(mean, second_moment):
    """``(E S^2 + 2 E S + 1) / 4``, an upper bound on ``E S_+`` via ``4 u_+ <= (u + 1)^2``."""
    return (second_moment + 2.0 * mean + 1.0) / 4.0


def mean_plus_bound(c=None):
    """``E S_+ <= 1/2``, attained by ``P(S = 1) = P(S = -1) = 1/2``."""
    params = {
        "majorant": "4 u_+ <= u^2 + 2 u + 1",
        "attained_by": {"values": [-1.0, 1.0], "probs": [0.5, 0.5]},
    }
    if c is not None:
        params.update(_as_constraints(c).describe())
    return BoundResult(0.5, "mean_plus", params)


def round_sig(value, sig=3):
    """Round to ``sig`` significant figures."""
    if value == 0 or not math.isfinite(value):
        return value
    digits = sig - 1 - math.floor(math.log10(abs(value)))
    return round(value, digits)


def hinge3(x):
    """Shorthand for the cube hinge ``(s - x)_+^3``."""
    return F3Function.hinge(1.0, x, 3.0)
