"""Bounds on E S_+^p for 0 < p < 3 through the cube hinge.

For a > 0, u^p is at most sup_u u^p / (u + a)^3 times (u + a)^3, which turns
the cube bound into  E S_+^p <= sup_ratio(p, a) (E(Z + a)_+^3 + beta).  The
choices a = 1.746 for p = 1 and a = 0.639 for p = 2 give the constants
0.514 + 0.0486 beta and 0.555 + 0.232 beta; optimizing a recovers them.
"""

from rosenthal3.bounds import corollary_bound, optimize_corollary, round_sig

for p, a in ((1.0, 1.746), (2.0, 0.639)):
    fixed = corollary_bound(p, a, 0.0)
    a_star, best = optimize_corollary(p, 0.0)
    print(f"p = {p:g}: a = {a} gives {round_sig(fixed.value)} + "
          f"{round_sig(fixed.parameters['beta_coefficient'])} beta "
          f"(optimal a = {a_star:.8f}, constant {best.value:.12f})")

print("\nThe best a depends on beta; for large beta it moves right:")
for beta in (0.0, 0.1, 1.0, 10.0, 1000.0):
    row = []
    for p in (0.5, 1.0, 2.0, 2.5):
        a_star, best = optimize_corollary(p, beta)
        row.append(f"p={p:g}: a*={a_star:7.3f} bound={best.value:10.4f}")
    print(f"beta={beta:7g}  " + "  ".join(row))
