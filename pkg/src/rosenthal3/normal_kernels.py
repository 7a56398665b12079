"""Standard normal kernels: density, distribution function, partial moments.

Partial moments ``E(Z - t)_+^k`` for ``k <= 3`` use closed forms in ``phi``
and ``1 - Phi``.  For ``t > 1`` those forms subtract nearly equal numbers,
so the upper tail is evaluated instead as ``phi(t) * I_k(t)`` where

    I_k(t) = int_0^inf u^k exp(-t u - u^2 / 2) du,

with ``I_0`` the Mills ratio (via ``erfcx``) and ``I_k / I_{k-1}`` obtained
from the continued fraction ``r_k = k / (t + r_{k+1})`` run backwards.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy import integrate, special

SQRT_2PI = math.sqrt(2.0 * math.pi)
INV_SQRT_2PI = 1.0 / SQRT_2PI
SQRT_HALF_PI = math.sqrt(0.5 * math.pi)

# Integration window half-width, in standard deviations; phi(40) underflows.
QUAD_SPAN = 40.0

_CF_DEPTH = 500
_TAIL_SWITCH = 1.0


@dataclass(frozen=True)
class GaussianAffine:
    """The random variable ``scale * Z + shift`` with ``Z`` standard normal."""

    scale: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.scale) and math.isfinite(self.shift)):
            raise ValueError("scale and shift must be finite")
        if self.scale < 0:
            raise ValueError(f"scale must be nonnegative, got {self.scale}")

    @property
    def degenerate(self):
        return self.scale == 0.0


def _check_finite(t, name="t"):
    t = float(t)
    if not math.isfinite(t):
        raise ValueError(f"{name} must be finite, got {t}")
    return t


def std_normal_pdf(t):
    """Standard normal density at ``t``."""
    t = _check_finite(t)
    return math.exp(-0.5 * t * t) * INV_SQRT_2PI


def std_normal_cdf(t):
    """Standard normal distribution function at ``t``."""
    return float(special.ndtr(_check_finite(t)))


def std_normal_sf(t):
    """Upper tail ``1 - Phi(t)``, computed without cancellation."""
    return float(special.ndtr(-_check_finite(t)))


def _mills_ratios(t, kmax):
    """Return ``[I_0(t), ..., I_kmax(t)]`` for ``t > 0``."""
    r = 0.0
    ratios = [0.0] * (kmax + 1)
    for k in range(_CF_DEPTH, 0, -1):
        r = k / (t + r)
        if k <= kmax:
            ratios[k] = r
    out = [SQRT_HALF_PI * float(special.erfcx(t / math.sqrt(2.0)))]
    for k in range(1, kmax + 1):
        out.append(out[-1] * ratios[k])
    return out


def partial_moment_plus(t, k):
    """Return ``E(Z - t)_+^k`` for standard normal ``Z`` and ``k`` in 0..3."""
    t = _check_finite(t)
    if k not in (0, 1, 2, 3):
        raise ValueError(f"order k must be one of 0, 1, 2, 3; got {k!r}")
    if t > _TAIL_SWITCH:
        # phi(t) underflows for t > ~38.6; the moment is then 0 in binary64.
        return std_normal_pdf(t) * _mills_ratios(t, k)[k]
    pdf = std_normal_pdf(t)
    sf = std_normal_sf(t)
    if k == 0:
        return sf
    if k == 1:
        return pdf - t * sf
    if k == 2:
        return (1.0 + t * t) * sf - t * pdf
    return (t * t + 2.0) * pdf - (t ** 3 + 3.0 * t) * sf


def abs_moment3(x):
    """Return ``E|Z - x|^3``."""
    x = _check_finite(x, "x")
    return partial_moment_plus(x, 3) + partial_moment_plus(-x, 3)


def quad_partial_moment(t, alpha, epsrel=1e-12):
    """Adaptive-quadrature value of ``E(Z - t)_+^alpha`` for real ``alpha >= 0``.

    Integrates ``(z - t)^alpha phi(z)`` over ``[max(t, -40), max(t, 0) + 40]``
    with a breakpoint at 0 when it falls inside.
    """
    t = _check_finite(t)
    lo = max(t, -QUAD_SPAN)
    hi = max(t, 0.0) + QUAD_SPAN

    def integrand(z):
        return (z - t) ** alpha * math.exp(-0.5 * z * z) * INV_SQRT_2PI

    pieces = [lo]
    for b in (-5.0, 0.0, 5.0):
        if lo < b < hi:
            pieces.append(b)
    pieces.append(hi)
    total = 0.0
    for a, b in zip(pieces[:-1], pieces[1:]):
        val, _ = integrate.quad(integrand, a, b, epsabs=0.0, epsrel=epsrel, limit=200)
        total += val
    return total


def _quad_hinge(scale, gap, alpha, epsrel=1e-12):
    """Quadrature for ``E(scale*Z + gap)_+^alpha`` in the original variable.

    The integrand vanishes left of the kink ``z = -gap / scale``, which is
    used as a breakpoint; ``z`` is confined to ``[-40, 40]``.
    """
    with np.errstate(divide="ignore", over="ignore"):
        kink = float(np.float64(-gap) / np.float64(scale))
    lo, hi = max(kink, -QUAD_SPAN), QUAD_SPAN
    if lo >= hi:
        return 0.0

    def integrand(z):
        return max(scale * z + gap, 0.0) ** alpha * math.exp(-0.5 * z * z) * INV_SQRT_2PI

    edges = [lo] + [b for b in (-5.0, 0.0, 5.0) if lo < b < hi] + [hi]
    return math.fsum(
        integrate.quad(integrand, a, b, epsabs=0.0, epsrel=epsrel, limit=200)[0]
        for a, b in zip(edges[:-1], edges[1:])
    )


def expect_hinge(ga, t, alpha, method="auto"):
    """Return ``E(scale*Z + shift - t)_+^alpha`` for ``alpha >= 3``.

    ``method="auto"`` uses the closed form when ``alpha == 3`` and quadrature
    otherwise; ``method="quad"`` forces quadrature.
    """
    t = _check_finite(t)
    alpha = float(alpha)
    if not alpha >= 3.0:
        raise ValueError(f"hinge exponent must be >= 3, got {alpha}")
    gap = ga.shift - t
    if ga.degenerate:
        return max(gap, 0.0) ** alpha
    if alpha == 3.0 and method == "auto":
        if gap > QUAD_SPAN * ga.scale:
            # P(scale*Z + gap < 0) < 1e-300, so the hinge is the full cube
            return gap ** 3 + 3.0 * gap * ga.scale ** 2
        if -gap > QUAD_SPAN * ga.scale:
            return 0.0
        return ga.scale ** 3 * partial_moment_plus(-gap / ga.scale, 3)
    return _quad_hinge(ga.scale, gap, alpha)


def expect_exp(ga, rate):
    """Return ``E exp(rate * (scale*Z + shift))``.

    Overflow gives ``inf`` and a ``RuntimeWarning``.
    """
    rate = float(rate)
    if not rate >= 0.0:
        raise ValueError(f"rate must be nonnegative, got {rate}")
    exponent = rate * ga.shift + 0.5 * (rate * ga.scale) ** 2
    try:
        return math.exp(exponent)
    except OverflowError:
        warnings.warn(f"exp({exponent}) overflows; returning inf", RuntimeWarning, stacklevel=2)
        return math.inf


def partial_moment_plus_array(t, k):
    """Vectorized :func:`partial_moment_plus` over an array of thresholds."""
    t = np.asarray(t, dtype=float)
    return np.vectorize(partial_moment_plus, otypes=[float])(t, k)
