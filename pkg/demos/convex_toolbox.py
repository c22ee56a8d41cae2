"""Grid-based convex analysis on synthetic pressures.

The convex layer never sees formulas, only tabulated values, so the
same operations that post-process numerical pressure curves run here on
two synthetic inputs stored as data: P(q) = q + 1 and P(q) = 1 + |q|.
"""

import numpy as np

from thermolyap import (GridFunction, asymptotic_slope, biconjugate_check,
                        conjugate, legendre_infimum, load_example,
                        subdifferential)

line = load_example("ex6_1").pressure.grid_function()
vee = load_example("ex6_2").pressure.grid_function()

print("Legendre infima of P(q) - alpha q")
print("-" * 50)
for name, gf, domain, alphas in (("q + 1 on (0, 4]", line, "positive-q",
                                  (0.5, 1.0, 2.0)),
                                 ("1 + |q| on [-4, 4]", vee, "all-q",
                                  (0.0, 0.9, 1.5))):
    print(name)
    for a in alphas:
        res = legendre_infimum(gf, a, domain=domain)
        if res.finite:
            print(f"  alpha = {a}: value {res.value:.6f} at q = {res.argmin:.3f}")
        else:
            print(f"  alpha = {a}: unbounded descent past the grid edge (-inf)")
print()

iv = subdifferential(vee, 0.0)
print(f"subdifferential of 1 + |q| at 0: [{iv.left:.6f}, {iv.right:.6f}]")
sl = asymptotic_slope(vee, +1)
print(f"slope toward +inf: {sl.slope:.6f}, approach {np.round(sl.quotients, 6)}")
print()

# Biconjugation flattens concave bumps onto the convex hull.
grid = np.linspace(0, 4, 41)
vals = np.abs(grid - 2.0)
vals[17:24] += 0.4
bumpy = GridFunction(grid, vals)
rep = biconjugate_check(bumpy)
print("biconjugation of |q - 2| with a concave bump:")
print(f"  deviation on hull points  {rep.max_deviation:.2e} (bound {rep.bound:.2e})")
print(f"  bump flattened by up to   {np.abs(rep.fstarstar.values - vals).max():.3f}")

# Conjugation is exact for affine data: (q + 1)* at slope 1 is -1.
star = conjugate(line, np.array([0.8, 1.0, 1.2]))
print(f"\nconjugate of q + 1 at s = 1: {star.values[1]:.6f} (edge-active "
      f"elsewhere: {star.meta['edge_active'].tolist()})")
