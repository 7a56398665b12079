"""Gaussian plus scaled centered-Poisson mixture bound at a finite cap ``y``.

For summands capped at ``y > beta`` the sharp bound is

    E f(S_y) <= E f(sqrt(1 - beta/y) Z + y (Pi_theta - theta)),  theta = beta / y^3,

and conditioning on the Poisson count ``j`` turns the right side into the series

    sum_j  pois(j; theta) * E f(scale Z + y j + drift),  drift = -theta y.

The series is summed until a certified geometric tail bound drops below
``eps``; that tail is added to the reported value.
"""

from collections import namedtuple
from dataclasses import dataclass
import math

from scipy import special

from .bounds import BoundResult, PreconditionError, theorem_bound
from .function_class import F3Function, expect_gaussian_affine, third_derivative_at_infinity
from .normal_kernels import GaussianAffine

J_MAX = 10 ** 6

ProfileRow = namedtuple("ProfileRow", "y mixture theorem gap")


@dataclass(frozen=True)
class MixtureParams:
    beta: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise PreconditionError(f"beta must be finite and >= 0, got {self.beta}")
        if not (math.isfinite(self.y) and self.y > self.beta and self.y > 0):
            raise PreconditionError(f"need y > beta, got y={self.y}, beta={self.beta}")

    @property
    def theta(self):
        return self.beta / self.y ** 3

    @property
    def scale(self):
        return math.sqrt(1.0 - self.beta / self.y)

    @property
    def drift(self):
        return -self.theta * self.y

    def describe(self):
        return {
            "beta": self.beta,
            "y": self.y,
            "theta": self.theta,
            "scale": self.scale,
            "drift": self.drift,
        }


def log_poisson_pmf(j, theta):
    if theta == 0.0:
        return 0.0 if j == 0 else -math.inf
    return j * math.log(theta) - theta - math.lgamma(j + 1)


def _abs_moment_norm(alpha):
    # (E|Z|^alpha)^(1/alpha)
    log_m = 0.5 * alpha * math.log(2.0) + math.lgamma(0.5 * (alpha + 1.0)) - 0.5 * math.log(math.pi)
    return math.exp(log_m / alpha)


class _TailCertificate:
    """Dominating sequence for the non-affine part of the series terms.

    For ``j`` with every hinge base ``y j + drift - t`` nonnegative,

        E c (scale Z + y j + drift - t)_+^alpha <= c (scale ||Z||_alpha + y j + drift - t)^alpha

    by Minkowski, and exponential terms are computed exactly.  The ratio of
    consecutive dominating terms is nonincreasing in ``j`` from there on, so
    once it is at most 1/2 the remaining tail is bounded by a geometric series.
    """

    def __init__(self, f, mp):
        self.mp = mp
        self.hinges = [
            (math.log(h.coeff), h.alpha, mp.scale * _abs_moment_norm(h.alpha) - h.threshold)
            for h in f.hinges
            if h.coeff > 0
        ]
        self.exps = [(math.log(e.coeff), e.rate) for e in f.exps if e.coeff > 0]
        thresholds = [h.threshold for h in f.hinges if h.coeff > 0]
        j = 1
        if thresholds:
            j = max(1, math.ceil((max(thresholds) - mp.drift) / mp.y))
            while mp.y * j + mp.drift - max(thresholds) < 0:
                j += 1
        self.first_valid = j

    def log_dominant(self, j):
        """Log of the dominating bound on ``E h(scale Z + y j + drift)``."""
        mp = self.mp
        center = mp.y * j + mp.drift
        logs = [lc + alpha * math.log(offset + center) for lc, alpha, offset in self.hinges]
        logs += [lc + rate * center + 0.5 * (rate * mp.scale) ** 2 for lc, rate in self.exps]
        return float(special.logsumexp(logs))

    def ratio(self, j):
        """Upper bound on term(j+1)/term(j), valid for all later indices too."""
        mp = self.mp
        center = mp.y * j + mp.drift
        worst = 0.0
        for _, alpha, offset in self.hinges:
            base = offset + center
            worst = max(worst, alpha * math.log1p(mp.y / base))
        for _, rate in self.exps:
            worst = max(worst, rate * mp.y)
        return math.exp(math.log(mp.theta) - math.log(j + 1) + worst)

    def tail_after(self, J):
        """Certified bound on ``sum_{j > J} term(j)``, or ``None`` if not yet available."""
        k = J + 1
        if k < self.first_valid:
            return None
        rho = self.ratio(k)
        if rho > 0.5:
            return None
        log_first = log_poisson_pmf(k, self.mp.theta) + self.log_dominant(k)
        return math.exp(log_first) / (1.0 - rho)


def _nonaffine(f):
    return F3Function(
        hinges=tuple(h for h in f.hinges if h.coeff > 0),
        exps=tuple(e for e in f.exps if e.coeff > 0),
    )


def _series(f, mp, eps):
    """Return ``(partial_sum, J, tail)`` for the non-affine part of ``f``."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    g = _nonaffine(f)
    if g.is_affine or mp.theta == 0.0:
        base = expect_gaussian_affine(g, GaussianAffine(mp.scale, mp.drift))
        return base, 0, 0.0
    cert = _TailCertificate(g, mp)
    total = 0.0
    for j in range(J_MAX + 1):
        log_w = log_poisson_pmf(j, mp.theta)
        w = math.exp(log_w)
        if w > 0.0:
            total += w * expect_gaussian_affine(g, GaussianAffine(mp.scale, mp.y * j + mp.drift))
        tail = cert.tail_after(j)
        if tail is not None and tail <= eps:
            return total, j, tail
    raise RuntimeError(f"tail bound did not reach eps={eps} within {J_MAX} terms")


def truncation_index(f, mp, eps):
    """Smallest ``J`` for which the certified tail after term ``J`` is ``<= eps``."""
    return _series(f, mp, eps)[1]


def mixture_expectation(f, mp, eps=1e-9):
    """Certified upper value of ``E f(scale Z + y (Pi_theta - theta))``.

    The affine part of ``f`` contributes its intercept exactly, since the
    mixture variable has mean zero.
    """
    partial, J, tail = _series(f, mp, eps)
    value = f.intercept + partial + tail
    params = {"f": f.to_dict(), "eps": eps, "truncation_index": J, **mp.describe()}
    return BoundResult(value, "mixture", params, error_budget=tail)


def mixture_variance(mp, n_terms=60):
    """``sum_j pois(j) (scale^2 + (y j + drift)^2)``; equals 1 when the mixture is centered."""
    total = 0.0
    for j in range(n_terms):
        w = math.exp(log_poisson_pmf(j, mp.theta))
        total += w * (mp.scale ** 2 + (mp.y * j + mp.drift) ** 2)
    return total


def convergence_profile(f, beta, y_grid, eps=1e-12):
    """Mixture value against the limiting bound along ``y_grid``."""
    if math.isinf(third_derivative_at_infinity(f)):
        raise PreconditionError("f''' is unbounded at infinity; there is no finite limit to approach")
    limit = theorem_bound(f, beta).value
    rows = []
    for y in y_grid:
        value = mixture_expectation(f, MixtureParams(beta, y), eps).value
        rows.append(ProfileRow(float(y), value, limit, value - limit))
    return rows
