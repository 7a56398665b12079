"""Partial moments of the standard normal, closed form against quadrature.

E(Z - t)_+^k for k <= 3 has an elementary expression in phi and 1 - Phi.
For large t that expression cancels badly, so the library switches to a
Mills-ratio form.  This script prints both and the quadrature reference.
"""

import numpy as np
from scipy.special import ndtr

from rosenthal3.normal_kernels import partial_moment_plus, quad_partial_moment

print(f"{'t':>6} {'k':>2} {'closed form':>24} {'quadrature':>24} {'rel. diff':>10}")
for t in (-3.0, -1.746, 0.0, 1.0, 4.0, 8.0):
    for k in range(4):
        closed = partial_moment_plus(t, k)
        quad = quad_partial_moment(t, k)
        rel = abs(closed - quad) / quad
        print(f"{t:6.3f} {k:2d} {closed:24.17g} {quad:24.17g} {rel:10.1e}")

# Far in the tail the naive formula loses every digit; the tail form does not.
t = 8.0
naive = (t * t + 2) * np.exp(-t * t / 2) / np.sqrt(2 * np.pi) - (t ** 3 + 3 * t) * (1.0 - ndtr(t))
print(f"\nt = 8, k = 3: naive {naive:.3e}, stable {partial_moment_plus(t, 3):.6e}")
