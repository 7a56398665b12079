"""Exact bounds on E f(S) for functions with nondecreasing f, f', f''.

The bound for a general function of the class is E f(Z) + f'''(inf-) beta / 6.
For the cube hinge f(x) = (x - t)_+^3 this becomes E(Z - t)_+^3 + beta.  Below
we compare the bound with E f(S) for a few random sums whose summands meet
the moment conditions exactly.
"""

import numpy as np

from rosenthal3 import F3Function, cube_plus_bound, theorem_bound
from rosenthal3.verification import exact_expectation, random_valid_spec

f = F3Function.hinge(1.0, 0.0, 3.0) + F3Function.affine(0.5, 1.0)
print("f =", f.to_json())
print("bound with beta = 0.1:", theorem_bound(f, 0.1).value)
print("a function growing faster than a cube has no finite bound:",
      theorem_bound(F3Function.exponential(1.0, 0.5), 0.1).value)

print("\nseed  n  beta      t    E(S - t)_+^3   bound       margin")
for seed in range(8):
    spec, beta = random_valid_spec(seed, 2 + seed)
    for t in (-1.0, 0.0, 1.0):
        lhs = exact_expectation(spec, lambda s: np.maximum(s - t, 0.0) ** 3)
        rhs = cube_plus_bound(t, beta).value
        print(f"{seed:4d} {2 + seed:2d} {beta:7.4f} {t:5.1f} {lhs:13.6f} {rhs:11.6f} {rhs - lhs:10.6f}")
