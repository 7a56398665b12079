"""Exit criteria for the package, shared by the test suite and ``selftest``.

Each ``criterion_*`` function returns a :class:`CriterionResult`; nothing
here asserts.  Tolerances and runtime limits are fixed constants.
"""

from dataclasses import dataclass, field
import math
import time

import numpy as np

from .bounds import (
    abs_cube_bound,
    corollary_bound,
    cube_plus_bound,
    mean_plus_bound,
    round_sig,
    sup_ratio,
    Constraints,
)
from .function_class import F3Function
from .mixture import MixtureParams, convergence_profile, mixture_expectation
from .normal_kernels import partial_moment_plus, quad_partial_moment
from .verification import (
    DistributionSpec,
    check_conditions,
    exact_expectation,
    extremal_spec,
    monte_carlo_expectation,
    random_valid_spec,
    sum_distribution,
    verify_inequality,
)

THRESHOLDS = (-2.0, -1.0, 0.0, 1.0, 2.0)
SWEEP_TOL = 1e-12
MIXTURE_TOL = 1e-9


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0
    time_limit: float = math.inf

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d}. {self.name} ({self.seconds:.2f}s / limit {self.time_limit:g}s)"


def _timed(number, name, limit):
    """Decorator: time the body and fold the runtime limit into the verdict."""

    def wrap(body):
        def run():
            start = time.perf_counter()
            passed, detail = body()
            elapsed = time.perf_counter() - start
            if elapsed >= limit:
                detail["runtime_exceeded"] = True
            return CriterionResult(number, name, bool(passed) and elapsed < limit, detail, elapsed, limit)

        run.__name__ = body.__name__
        run.__doc__ = body.__doc__
        return run

    return wrap


def fixture_specs(count, first_seed=0):
    """Seeded valid specs with 1..12 summands; returns ``[(seed, spec, beta)]``."""
    out = []
    for seed in range(first_seed, first_seed + count):
        spec, beta = random_valid_spec(seed, 1 + seed % 12)
        out.append((seed, spec, beta))
    return out


def _expect(values, probs, g):
    return math.fsum(probs * g(values))


@_timed(1, "corollary constants 0.514 + 0.0486 beta and 0.555 + 0.232 beta", 1.0)
def criterion_corollary_constants():
    r1 = corollary_bound(1, 1.746, 0.0)
    r2 = corollary_bound(2, 0.639, 0.0)
    c1, k1 = r1.value, sup_ratio(1, 1.746)
    c2, k2 = r2.value, sup_ratio(2, 0.639)
    checks = {
        "constant_p1": abs(c1 - 0.514) <= 1e-3 and round_sig(c1) == 0.514,
        "coefficient_p1": abs(k1 - 0.0486) <= 5e-5 and round_sig(k1) == 0.0486,
        "constant_p2": abs(c2 - 0.555) <= 1e-3 and round_sig(c2) == 0.555,
        "coefficient_p2": abs(k2 - 0.232) <= 5e-4 and round_sig(k2) == 0.232,
    }
    detail = {"p1": (c1, k1), "p2": (c2, k2), **checks}
    return all(checks.values()), detail


@_timed(2, "sup-ratio closed form vs 10^6-point log grid", 30.0)
def criterion_sup_ratio(n_pairs=50, seed=2):
    rng = np.random.default_rng(seed)
    grid = np.concatenate(([0.0], np.logspace(-4.0, 4.0, 10 ** 6 - 1)))
    worst = 0.0
    for _ in range(n_pairs):
        p = rng.uniform(0.1, 2.9)
        a = 10.0 ** rng.uniform(-2.0, 2.0)
        grid_max = float(np.max(grid ** p / (grid + a) ** 3))
        worst = max(worst, abs(sup_ratio(p, a) - grid_max) / grid_max)
    return worst <= 1e-6, {"worst_relative_error": worst, "pairs": n_pairs}


@_timed(3, "partial-moment closed forms vs adaptive quadrature", 30.0)
def criterion_partial_moments():
    worst, where = 0.0, None
    for t in np.linspace(-8.0, 8.0, 1000):
        for k in range(4):
            closed = partial_moment_plus(t, k)
            quad = quad_partial_moment(t, k)
            rel = abs(closed - quad) / quad
            if rel > worst:
                worst, where = rel, (float(t), k)
    return worst <= 1e-10, {"worst_relative_error": worst, "at": where}


@_timed(4, "cube-plus soundness sweep on 200 specs x 5 thresholds", 60.0)
def criterion_cube_plus_sweep(count=200):
    violations = []
    worst = math.inf
    for seed, spec, beta in fixture_specs(count):
        values, probs = sum_distribution(spec)
        for x in THRESHOLDS:
            lhs = _expect(values, probs, lambda s: np.maximum(s - x, 0.0) ** 3)
            margin = cube_plus_bound(x, beta).value - lhs
            worst = min(worst, margin)
            if margin < -SWEEP_TOL:
                violations.append({"seed": seed, "x": x, "margin": margin, "spec": spec.to_dict()})
    return not violations, {"violations": violations, "smallest_margin": worst}


@_timed(5, "absolute-cube soundness sweep on 200 zero-mean specs x 5 thresholds", 60.0)
def criterion_abs_cube_sweep(count=200):
    violations = []
    worst, best_ratio = math.inf, 0.0
    for seed, spec, _ in fixture_specs(count):
        spec = spec.centered()
        report = check_conditions(spec, math.inf)
        if not (report.satisfies_conditions and report.zero_means):
            violations.append({"seed": seed, "reason": "centering failed"})
            continue
        c = Constraints(beta=report.beta_total, zero_means=True)
        values, probs = sum_distribution(spec)
        for x in THRESHOLDS:
            lhs = _expect(values, probs, lambda s: np.abs(s - x) ** 3)
            bound = abs_cube_bound(x, report.abs3_total, c).value
            margin = bound - lhs
            worst = min(worst, margin)
            best_ratio = max(best_ratio, lhs / bound)
            if margin < -SWEEP_TOL:
                violations.append({"seed": seed, "x": x, "margin": margin, "spec": spec.to_dict()})
    # tightness is only explored here: the largest lhs/bound ratio is reported, not asserted
    return not violations, {"violations": violations, "smallest_margin": worst, "largest_ratio": best_ratio}


def positive_part(s):
    return np.maximum(s, 0.0)


@_timed(6, "E S_+ <= 1/2, attained by P(S = +-1) = 1/2", 60.0)
def criterion_mean_plus(count=200):
    bound = mean_plus_bound()
    attaining = DistributionSpec(([(-1.0, 0.5), (1.0, 0.5)],))
    margin, _ = verify_inequality(attaining, positive_part, bound)
    attained = abs(margin) <= 1e-12
    worst = -math.inf
    violations = []
    for seed, spec, _ in fixture_specs(count):
        value = exact_expectation(spec, positive_part)
        worst = max(worst, value)
        if value > 0.5 + 1e-12:
            violations.append({"seed": seed, "value": value})
    return attained and not violations, {
        "attaining_margin": margin,
        "largest_sweep_value": worst,
        "violations": violations,
    }


@_timed(7, "mixture domination for capped summands, y in {2, 5, 10}", 120.0)
def criterion_mixture_domination(count=100, ys=(2.0, 5.0, 10.0)):
    f = F3Function.hinge(1.0, 0.0, 3.0)
    violations = []
    worst = math.inf
    for seed, spec, _ in fixture_specs(count):
        for y in ys:
            capped = spec.truncated(y)
            beta_y = check_conditions(capped, math.inf).beta_total
            lhs = exact_expectation(capped, f)
            rhs = mixture_expectation(f, MixtureParams(beta_y, y), MIXTURE_TOL).value
            margin = rhs - lhs
            worst = min(worst, margin)
            if margin < -MIXTURE_TOL:
                violations.append({"seed": seed, "y": y, "margin": margin, "spec": capped.to_dict()})
    return not violations, {"violations": violations, "smallest_margin": worst}


@_timed(8, "mixture gap to the limiting bound shrinks as y grows", 60.0)
def criterion_mixture_convergence():
    rows = convergence_profile(F3Function.hinge(1.0, 0.0, 3.0), 0.2, (10.0, 100.0, 1000.0))
    gaps = [abs(r.gap) for r in rows]
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    return decreasing and gaps[-1] < 1e-2, {"y": [r.y for r in rows], "abs_gaps": gaps}


@_timed(9, "spike-plus-filler constructions approach the cube bound", 60.0)
def criterion_extremal(n_fillers=200, filler_scale=0.07):
    f = F3Function.hinge(1.0, 0.0, 3.0)
    values, ratios, dominated = [], [], True
    for n in (2, 8, 32):
        ex = extremal_spec(0.2, 2.0, n, n_fillers, filler_scale)
        value = exact_expectation(ex.spec, f)
        bound = cube_plus_bound(0.0, ex.effective_beta).value
        dominated &= value <= bound + SWEEP_TOL
        values.append(value)
        ratios.append(value / bound)
    monotone = all(b >= a - 1e-3 for a, b in zip(values, values[1:]))
    return monotone and dominated, {
        "values": values,
        "ratios": ratios,
        "final_ratio": ratios[-1],
        "effective_beta": ex.effective_beta,
    }


MC_FUNCTIONS = (
    F3Function.hinge(1.0, 0.0, 3.0),
    F3Function.hinge(1.0, -1.0, 3.0),
    F3Function.hinge(1.0, 0.5, 3.0) + F3Function.affine(0.0, 1.0),
    F3Function.exponential(1.0, 0.5),
    F3Function.hinge(0.5, 0.0, 3.5),
)


@_timed(10, "Monte Carlo within 4 standard errors of exact on >= 95% of 50 fixtures", 120.0)
def criterion_monte_carlo(count=50, n_samples=10 ** 6):
    misses = []
    for i, (seed, spec, _) in enumerate(fixture_specs(count, first_seed=1000)):
        f = MC_FUNCTIONS[i % len(MC_FUNCTIONS)]
        exact = exact_expectation(spec, f)
        estimate, stderr = monte_carlo_expectation(spec, f, n_samples, seed=seed)
        if abs(estimate - exact) > 4.0 * stderr:
            misses.append({"seed": seed, "exact": exact, "estimate": estimate, "stderr": stderr})
    hit_rate = 1.0 - len(misses) / count
    return hit_rate >= 0.95, {"hit_rate": hit_rate, "misses": misses}


CRITERIA = (
    criterion_corollary_constants,
    criterion_sup_ratio,
    criterion_partial_moments,
    criterion_cube_plus_sweep,
    criterion_abs_cube_sweep,
    criterion_mean_plus,
    criterion_mixture_domination,
    criterion_mixture_convergence,
    criterion_extremal,
    criterion_monte_carlo,
)


def run_all(report=print):
    results = []
    for criterion in CRITERIA:
        result = criterion()
        if report is not None:
            report(result.line())
        results.append(result)
    return results
