"""Members of the cone F3: f, f', f'', f''' all nondecreasing.

The representable functions are

    f(x) = a + b x + sum_i c_i (x - t_i)_+^alpha_i + sum_j c_j exp(lambda_j x)

with ``b, c_i, c_j, lambda_j >= 0`` and ``alpha_i >= 3``.  Each generator is
in F3, and F3 is a convex cone, so every such ``f`` is too.
"""

from dataclasses import dataclass, field
import json
import math
import warnings

import numpy as np

from .normal_kernels import GaussianAffine, expect_exp, expect_hinge


@dataclass(frozen=True)
class Hinge:
    """The term ``coeff * (x - threshold)_+^alpha``."""

    coeff: float
    threshold: float
    alpha: float = 3.0

    def __post_init__(self):
        for name in ("coeff", "threshold", "alpha"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"hinge {name} must be finite")
        if self.coeff < 0:
            raise ValueError(f"hinge coefficient must be >= 0, got {self.coeff}")
        if self.alpha < 3:
            raise ValueError(f"hinge exponent must be >= 3, got {self.alpha}")


@dataclass(frozen=True)
class ExpTerm:
    """The term ``coeff * exp(rate * x)``."""

    coeff: float
    rate: float

    def __post_init__(self):
        if not (math.isfinite(self.coeff) and math.isfinite(self.rate)):
            raise ValueError("exp term parameters must be finite")
        if self.coeff < 0:
            raise ValueError(f"exp coefficient must be >= 0, got {self.coeff}")
        if self.rate < 0:
            raise ValueError(f"exp rate must be >= 0, got {self.rate}")


@dataclass(frozen=True)
class F3Function:
    """A nonnegative combination of affine, hinge-power and exponential terms.

    Exponential terms with zero rate are folded into ``intercept`` on
    construction, so two equal functions compare equal.
    """

    intercept: float = 0.0
    slope: float = 0.0
    hinges: tuple = field(default_factory=tuple)
    exps: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not (math.isfinite(self.intercept) and math.isfinite(self.slope)):
            raise ValueError("affine part must be finite")
        if self.slope < 0:
            raise ValueError(f"affine slope must be >= 0, got {self.slope}")
        hinges = tuple(h if isinstance(h, Hinge) else Hinge(*h) for h in self.hinges)
        exps = tuple(e if isinstance(e, ExpTerm) else ExpTerm(*e) for e in self.exps)
        intercept = float(self.intercept)
        kept = []
        for e in exps:
            if e.rate == 0.0:
                intercept += e.coeff
            else:
                kept.append(e)
        object.__setattr__(self, "intercept", intercept)
        object.__setattr__(self, "slope", float(self.slope))
        object.__setattr__(self, "hinges", hinges)
        object.__setattr__(self, "exps", tuple(kept))

    # constructors -----------------------------------------------------

    @classmethod
    def hinge(cls, coeff=1.0, threshold=0.0, alpha=3.0):
        return cls(hinges=(Hinge(coeff, threshold, alpha),))

    @classmethod
    def affine(cls, intercept=0.0, slope=0.0):
        return cls(intercept=intercept, slope=slope)

    @classmethod
    def exponential(cls, coeff=1.0, rate=1.0):
        return cls(exps=(ExpTerm(coeff, rate),))

    def __add__(self, other):
        if not isinstance(other, F3Function):
            return NotImplemented
        return F3Function(
            self.intercept + other.intercept,
            self.slope + other.slope,
            self.hinges + other.hinges,
            self.exps + other.exps,
        )

    def scaled(self, factor):
        """Return ``factor * f`` for ``factor >= 0``."""
        if factor < 0:
            raise ValueError("F3 is a cone: only nonnegative multiples stay inside")
        return F3Function(
            factor * self.intercept,
            factor * self.slope,
            tuple(Hinge(factor * h.coeff, h.threshold, h.alpha) for h in self.hinges),
            tuple(ExpTerm(factor * e.coeff, e.rate) for e in self.exps),
        )

    # calculus ---------------------------------------------------------

    def __call__(self, x):
        return evaluate(self, x)

    @property
    def is_affine(self):
        return not self.hinges and not self.exps

    @property
    def third_derivative_at_infinity(self):
        return third_derivative_at_infinity(self)

    # serialization ----------------------------------------------------

    def to_dict(self):
        return {
            "affine": {"a": self.intercept, "b": self.slope},
            "hinges": [{"c": h.coeff, "t": h.threshold, "alpha": h.alpha} for h in self.hinges],
            "exps": [{"c": e.coeff, "lambda": e.rate} for e in self.exps],
        }

    @classmethod
    def from_dict(cls, doc):
        affine = doc.get("affine", {})
        return cls(
            intercept=float(affine.get("a", 0.0)),
            slope=float(affine.get("b", 0.0)),
            hinges=tuple(
                Hinge(float(h["c"]), float(h["t"]), float(h.get("alpha", 3.0)))
                for h in doc.get("hinges", ())
            ),
            exps=tuple(ExpTerm(float(e["c"]), float(e["lambda"])) for e in doc.get("exps", ())),
        )

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def parse_literal(text):
    """Parse ``hinge:c,t[,alpha]``, ``exp:c,lambda`` or ``affine:a,b``."""
    kind, _, args = text.partition(":")
    try:
        nums = [float(v) for v in args.split(",")] if args else []
    except ValueError as exc:
        raise ValueError(f"bad numbers in function literal {text!r}") from exc
    kind = kind.strip().lower()
    if kind == "hinge" and len(nums) in (2, 3):
        return F3Function.hinge(*nums)
    if kind == "exp" and len(nums) == 2:
        return F3Function.exponential(*nums)
    if kind == "affine" and len(nums) == 2:
        return F3Function.affine(*nums)
    raise ValueError(
        f"cannot parse function literal {text!r}; expected hinge:c,t[,alpha], exp:c,lambda or affine:a,b"
    )


def parse_literals(texts):
    """Sum of several function literals."""
    f = F3Function()
    for text in texts:
        f = f + parse_literal(text)
    return f


def evaluate(f, x):
    """Pointwise value of ``f``; accepts scalars or arrays.

    Overflow produces ``inf`` and a ``RuntimeWarning``.
    """
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("evaluation points must be finite")
    with np.errstate(over="ignore"):
        out = f.intercept + f.slope * x
        for h in f.hinges:
            out = out + h.coeff * np.maximum(x - h.threshold, 0.0) ** h.alpha
        for e in f.exps:
            out = out + e.coeff * np.exp(e.rate * x)
    if np.any(np.isinf(out)):
        warnings.warn("F3Function evaluation overflowed to inf", RuntimeWarning, stacklevel=2)
    return float(out) if scalar else out


def third_derivative_at_infinity(f):
    """Limit of ``f'''(x)`` as ``x -> inf``; ``math.inf`` when unbounded.

    Only cubic hinges contribute a finite amount (``6 c`` each).  Any active
    hinge with exponent above 3 or exponential with positive rate makes the
    limit infinite.
    """
    for h in f.hinges:
        if h.alpha > 3 and h.coeff > 0:
            return math.inf
    for e in f.exps:
        if e.rate > 0 and e.coeff > 0:
            return math.inf
    return sum(6.0 * h.coeff for h in f.hinges if h.alpha == 3)


def expect_gaussian_affine(f, ga=GaussianAffine()):
    """Return ``E f(scale*Z + shift)``, term by term."""
    total = f.intercept + f.slope * ga.shift
    for h in f.hinges:
        if h.coeff:
            total += h.coeff * expect_hinge(ga, h.threshold, h.alpha)
    for e in f.exps:
        if e.coeff:
            total += e.coeff * expect_exp(ga, e.rate)
    return total
