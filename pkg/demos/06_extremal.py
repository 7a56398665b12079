"""How close discrete sums come to the cube bound.

Rare large spikes carry the positive cube beta and many small symmetric
fillers carry the rest of the variance.  As the spikes become rarer and the
fillers smaller, E S_+^3 climbs towards E Z_+^3 + beta.
"""

from rosenthal3.bounds import cube_plus_bound
from rosenthal3.function_class import F3Function
from rosenthal3.verification import exact_expectation, extremal_spec

f = F3Function.hinge(1.0, 0.0, 3.0)
print("spikes  fillers  scale  effective beta   E S_+^3     bound    ratio")
for n_spikes, n_fillers, scale in ((1, 20, 0.25), (2, 60, 0.15), (4, 200, 0.07), (8, 200, 0.07)):
    ex = extremal_spec(0.2, 2.0, n_spikes, n_fillers, scale)
    value = exact_expectation(ex.spec, f)
    bound = cube_plus_bound(0.0, ex.effective_beta).value
    print(f"{n_spikes:6d} {n_fillers:8d} {scale:6.2f} {ex.effective_beta:15.5f} "
          f"{value:10.5f} {bound:9.5f} {value / bound:8.4f}")
