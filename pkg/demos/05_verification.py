"""Checking the inequalities on discrete sums, exactly and by sampling.

Random two- and three-point summands are scaled so that sum E X_i^2 = 1 and
E X_i <= 0.  The exact law of S comes from convolution, and Monte Carlo
estimates are compared with it.
"""

import numpy as np

from rosenthal3.bounds import Constraints, abs_cube_bound, cube_plus_bound
from rosenthal3.verification import (
    check_conditions,
    exact_expectation,
    monte_carlo_expectation,
    random_valid_spec,
    verify_inequality,
)


def cube(s):
    return np.maximum(s, 0.0) ** 3


spec, beta = random_valid_spec(seed=42, n_vars=6)
report = check_conditions(spec, beta)
print(f"6 summands, sum E X^2 = {report.variance_total:.15f}, beta = {beta:.6f}")

margin, ok = verify_inequality(spec, cube, cube_plus_bound(0.0, beta))
print(f"E S_+^3 bound holds: {ok} (margin {margin:.6f})")

centered = spec.centered()
rep0 = check_conditions(centered, np.inf)
bound = abs_cube_bound(0.5, rep0.abs3_total, Constraints(rep0.beta_total, zero_means=True))
margin, ok = verify_inequality(centered, lambda s: np.abs(s - 0.5) ** 3, bound)
print(f"E|S - 0.5|^3 bound holds after centering: {ok} (margin {margin:.6f})")

exact = exact_expectation(spec, cube)
mean, se = monte_carlo_expectation(spec, cube, 10 ** 6, seed=7, n_workers=4)
print(f"exact {exact:.6f}, Monte Carlo {mean:.6f} +- {se:.6f} ({(mean - exact) / se:+.2f} se)")
