"""Ground truth for the bounds: finite-support independent summands.

Exact expectations come from convolving the summand laws.  Identical summands
are grouped first and their k-fold sum is enumerated by multinomial counts,
so long i.i.d. runs (as in the near-extremal constructions) stay small.
"""

from collections import namedtuple
from dataclasses import dataclass
from itertools import combinations_with_replacement
import json
import math

import numpy as np
from scipy.special import gammaln

from .bounds import PreconditionError

PROB_TOL = 1e-12
MEAN_TOL = 1e-12
MAX_SUPPORT = 10 ** 7


class SupportTooLarge(ValueError):
    """The exact convolution would exceed the support guard."""

    def __init__(self, size, limit=MAX_SUPPORT):
        super().__init__(f"convolution support {size} exceeds the limit {limit}; use Monte Carlo")
        self.size = size


class ConstraintViolation(PreconditionError):
    """A distribution fails the moment conditions a bound relies on."""


@dataclass(frozen=True)
class AtomicVariable:
    """A finite-support law, atoms sorted by value."""

    values: tuple
    probs: tuple

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        probs = tuple(float(p) for p in self.probs)
        if not values or len(values) != len(probs):
            raise ValueError("need the same positive number of values and probabilities")
        if not all(math.isfinite(v) for v in values):
            raise ValueError("atom values must be finite")
        if not all(p > 0 for p in probs):
            raise ValueError("atom probabilities must be positive")
        if abs(math.fsum(probs) - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {math.fsum(probs)!r}, not 1")
        if len(set(values)) != len(values):
            raise ValueError("atom values must be distinct")
        order = sorted(range(len(values)), key=values.__getitem__)
        object.__setattr__(self, "values", tuple(values[i] for i in order))
        object.__setattr__(self, "probs", tuple(probs[i] for i in order))

    @classmethod
    def from_pairs(cls, pairs):
        """Build from ``(value, prob)`` pairs, merging repeated values."""
        merged = {}
        for v, p in pairs:
            merged[float(v)] = merged.get(float(v), 0.0) + float(p)
        return cls(tuple(merged), tuple(merged.values()))

    def expect(self, g):
        return math.fsum(p * g(v) for v, p in zip(self.values, self.probs))

    @property
    def mean(self):
        return self.expect(lambda v: v)

    @property
    def second_moment(self):
        return self.expect(lambda v: v * v)

    @property
    def plus_cube(self):
        return self.expect(lambda v: max(v, 0.0) ** 3)

    @property
    def abs_cube(self):
        return self.expect(lambda v: abs(v) ** 3)

    def truncated(self, y):
        return AtomicVariable.from_pairs((min(v, y), p) for v, p in zip(self.values, self.probs))

    def centered(self):
        m = self.mean
        return AtomicVariable(tuple(v - m for v in self.values), self.probs)

    def scaled(self, factor):
        return AtomicVariable.from_pairs((factor * v, p) for v, p in zip(self.values, self.probs))


@dataclass(frozen=True)
class DistributionSpec:
    """Independent summands; their sum is ``S``."""

    variables: tuple

    def __post_init__(self):
        variables = tuple(
            v if isinstance(v, AtomicVariable) else AtomicVariable.from_pairs(v) for v in self.variables
        )
        if not variables:
            raise ValueError("a distribution spec needs at least one variable")
        object.__setattr__(self, "variables", variables)

    def __len__(self):
        return len(self.variables)

    @property
    def max_atom(self):
        return max(v.values[-1] for v in self.variables)

    def truncated(self, y):
        return DistributionSpec(tuple(v.truncated(y) for v in self.variables))

    def centered(self):
        return DistributionSpec(tuple(v.centered() for v in self.variables))

    def to_dict(self):
        return {
            "variables": [
                [{"v": v, "p": p} for v, p in zip(var.values, var.probs)] for var in self.variables
            ]
        }

    @classmethod
    def from_dict(cls, doc):
        return cls(tuple(
            AtomicVariable.from_pairs((a["v"], a["p"]) for a in var) for var in doc["variables"]
        ))

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class ConstraintReport:
    per_variable_means: tuple
    variance_total: float
    beta_total: float
    abs3_total: float
    satisfies_conditions: bool
    zero_means: bool
    declared_beta: float


def check_conditions(spec, declared_beta):
    """Check ``E X_i <= 0``, ``sum E X_i^2 <= 1`` and ``sum E (X_i)_+^3 <= beta``."""
    if not isinstance(spec, DistributionSpec):
        raise TypeError("expected a DistributionSpec")
    means = tuple(v.mean for v in spec.variables)
    variance_total = math.fsum(v.second_moment for v in spec.variables)
    beta_total = math.fsum(v.plus_cube for v in spec.variables)
    abs3_total = math.fsum(v.abs_cube for v in spec.variables)
    ok = (
        all(m <= MEAN_TOL for m in means)
        and variance_total <= 1.0 + 1e-12
        and beta_total <= declared_beta + 1e-12
    )
    return ConstraintReport(
        per_variable_means=means,
        variance_total=variance_total,
        beta_total=beta_total,
        abs3_total=abs3_total,
        satisfies_conditions=ok,
        zero_means=all(abs(m) <= MEAN_TOL for m in means),
        declared_beta=float(declared_beta),
    )


def _iid_sum(var, k):
    """Exact law of the sum of ``k`` independent copies of ``var``."""
    values = np.array(var.values)
    log_p = np.log(np.array(var.probs))
    m = len(values)
    if k == 1:
        return values.copy(), np.array(var.probs)
    counts = np.array(
        [np.bincount(c, minlength=m) for c in combinations_with_replacement(range(m), k)], dtype=float
    )
    log_w = gammaln(k + 1) - gammaln(counts + 1).sum(axis=1) + counts @ log_p
    return counts @ values, np.exp(log_w)


def _merge(values, probs):
    uniq, inverse = np.unique(values, return_inverse=True)
    return uniq, np.bincount(inverse, weights=probs, minlength=len(uniq))


def sum_distribution(spec, max_support=MAX_SUPPORT):
    """Return ``(values, probs)`` of ``S``; exactly equal sums are merged."""
    groups = {}
    for var in spec.variables:
        groups[var] = groups.get(var, 0) + 1
    values, probs = np.zeros(1), np.ones(1)
    for var, k in groups.items():
        gv, gp = _iid_sum(var, k)
        size = len(values) * len(gv)
        if size > max_support:
            raise SupportTooLarge(size, max_support)
        values = (values[:, None] + gv[None, :]).ravel()
        probs = (probs[:, None] * gp[None, :]).ravel()
        values, probs = _merge(values, probs)
    return values, probs


def exact_expectation(spec, f, max_support=MAX_SUPPORT):
    """``E f(S)`` by full convolution; ``f`` is any vectorized callable."""
    values, probs = sum_distribution(spec, max_support)
    return math.fsum(probs * np.asarray(f(values), dtype=float))


def exact_expectation_truncated(spec, f, y, max_support=MAX_SUPPORT):
    """``E f(S_y)`` where every summand is replaced by ``min(X_i, y)``."""
    return exact_expectation(spec.truncated(y), f, max_support)


def monte_carlo_expectation(spec, f, n_samples, seed=0, n_workers=1, chunk=1 << 17):
    """Sample-mean estimate of ``E f(S)`` and its standard error.

    Each worker draws from its own Philox stream spawned from ``seed``;
    the workers run in order here and their moments are pooled, so the
    result depends only on ``(seed, n_samples, n_workers)``.
    """
    if n_samples < 100:
        raise ValueError("n_samples must be at least 100")
    tables = []
    for var in spec.variables:
        cdf = np.cumsum(var.probs)
        cdf[-1] = 1.0
        tables.append((np.array(var.values), cdf))
    shares = [n_samples // n_workers + (w < n_samples % n_workers) for w in range(n_workers)]
    count, mean, m2 = 0, 0.0, 0.0
    for child, share in zip(np.random.SeedSequence(seed).spawn(n_workers), shares):
        rng = np.random.Generator(np.random.Philox(child))
        done = 0
        while done < share:
            n = min(chunk, share - done)
            s = np.zeros(n)
            for values, cdf in tables:
                s += values[np.searchsorted(cdf, rng.random(n), side="right")]
            fx = np.asarray(f(s), dtype=float)
            c_mean = fx.mean()
            c_m2 = float(((fx - c_mean) ** 2).sum())
            delta = c_mean - mean
            total = count + n
            mean += delta * n / total
            m2 += c_m2 + delta * delta * count * n / total
            count = total
            done += n
    stderr = math.sqrt(m2 / (count - 1) / count)
    return float(mean), stderr


def _random_variable(rng, skew_level):
    """A zero-mean two- or three-point law with a random skew, before scaling.

    ``q``, the probability of the top atom, sets the skew; ``logit(q)`` is
    drawn around ``skew_level`` and clipped to [-6, 6], which keeps both
    ``q`` and ``1 - q`` above 0.0024.
    """
    q = 1.0 / (1.0 + math.exp(-float(np.clip(skew_level + rng.normal(), -6.0, 6.0))))
    if rng.random() < 0.5:
        values, probs = [1.0, -q / (1.0 - q)], [q, 1.0 - q]
    else:
        r = rng.uniform(0.05, 0.9) * (1.0 - q)
        mid = rng.uniform(-0.5, 0.5)
        rest = 1.0 - q - r
        low = -(q + r * mid) / rest
        if low < mid:
            values, probs = [1.0, mid, low], [q, r, rest]
        else:
            values, probs = [1.0, -q / (1.0 - q)], [q, 1.0 - q]
    var = AtomicVariable.from_pairs(zip(values, probs))
    if rng.random() < 0.3:
        # negative mean: shift left by up to half a standard deviation
        shift = rng.uniform(0.0, 0.5) * math.sqrt(var.second_moment)
        var = AtomicVariable(tuple(v - shift for v in var.values), var.probs)
    return var


def random_valid_spec(seed, n_vars, beta_target=0.0):
    """Random summands satisfying the moment conditions exactly.

    Returns ``(spec, achieved_beta)``.  ``sum E X_i^2`` is scaled to 1 and
    ``achieved_beta = sum E (X_i)_+^3``; the result passes
    :func:`check_conditions` for any declared beta at least
    ``max(beta_target, achieved_beta)``.
    """
    if not 1 <= n_vars <= 12:
        raise ValueError("n_vars must lie in 1..12")
    rng = np.random.Generator(np.random.Philox(seed))
    skew_level = rng.uniform(-6.0, 6.0)
    raw = [_random_variable(rng, skew_level) for _ in range(n_vars)]
    weights = rng.dirichlet(np.ones(n_vars))
    variables = [v.scaled(math.sqrt(w / v.second_moment)) for v, w in zip(raw, weights)]
    total = math.fsum(v.second_moment for v in variables)
    factor = 1.0 / math.sqrt(total)
    while True:
        scaled = [v.scaled(factor) for v in variables]
        if math.fsum(v.second_moment for v in scaled) <= 1.0:
            break
        factor *= 1.0 - 2.0 ** -50
    spec = DistributionSpec(tuple(scaled))
    achieved = math.fsum(v.plus_cube for v in spec.variables)
    return spec, achieved


ExtremalConstruction = namedtuple(
    "ExtremalConstruction", "spec spike_prob spike_low filler_prob filler_beta effective_beta"
)


def extremal_spec(beta, y, n_spikes, n_fillers, filler_scale):
    """Spikes plus small symmetric fillers approximating the extremal law.

    Each of ``n_spikes`` summands equals ``y`` with probability
    ``q = beta / (n_spikes y^3)`` and ``-y q / (1 - q)`` otherwise, so the
    spikes have zero mean and total positive cube exactly ``beta``.  Each
    filler is ``+-filler_scale`` with probability ``pi / 2`` apiece and 0
    otherwise, with ``pi`` chosen so the total second moment is 1.  The
    fillers add ``n_fillers pi filler_scale^3 / 2`` to the positive cube;
    ``effective_beta`` includes it.
    """
    if not (beta > 0 and y > beta):
        raise PreconditionError(f"need 0 < beta < y, got beta={beta}, y={y}")
    if n_spikes < 1 or n_fillers < 1 or not filler_scale > 0:
        raise PreconditionError("n_spikes, n_fillers and filler_scale must be positive")
    q = beta / (n_spikes * y ** 3)
    if q >= 1:
        raise PreconditionError(f"spike probability {q} is not below 1")
    low = -y * q / (1.0 - q)
    spike_var = n_spikes * y * y * q / (1.0 - q)
    remaining = 1.0 - spike_var
    if remaining <= 0:
        raise PreconditionError(f"spike second moment {spike_var} already exceeds the budget")
    pi = remaining / (n_fillers * filler_scale ** 2)
    if pi > 1.0:
        raise PreconditionError(
            f"fillers cannot absorb variance {remaining}: need n_fillers * filler_scale^2 >= it"
        )
    spike = AtomicVariable((y, low), (q, 1.0 - q))
    if pi == 1.0:
        filler = AtomicVariable((-filler_scale, filler_scale), (0.5, 0.5))
    else:
        filler = AtomicVariable((-filler_scale, 0.0, filler_scale), (pi / 2, 1.0 - pi, pi / 2))
    spec = DistributionSpec((spike,) * n_spikes + (filler,) * n_fillers)
    filler_beta = n_fillers * pi * filler_scale ** 3 / 2.0
    return ExtremalConstruction(spec, q, low, pi, filler_beta, beta + filler_beta)


def verify_inequality(spec, f, bound, tol=1e-12):
    """Return ``(margin, passed)`` with ``margin = bound - E f(S)``.

    The summands must satisfy the conditions for the beta recorded in the bound
    (and have zero means for the absolute-moment bound).
    """
    declared = bound.parameters.get("beta", math.inf)
    report = check_conditions(spec, declared)
    if not report.satisfies_conditions:
        raise ConstraintViolation(
            f"spec violates the moment conditions (variance {report.variance_total}, "
            f"beta {report.beta_total} vs declared {declared}, means {report.per_variable_means})"
        )
    if bound.inequality_id == "abs_cube" and not report.zero_means:
        raise ConstraintViolation("the absolute third-moment bound needs zero-mean summands")
    margin = bound.value - exact_expectation(spec, f)
    return margin, margin >= -tol
