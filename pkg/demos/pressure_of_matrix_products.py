"""Pressure of a matrix-product potential, bracketed from both sides.

The built-in "ex1_1" system is a full shift on four symbols whose
potential is the operator norm of a product of diagonal matrices.  The
products collapse onto a handful of diagonal branches, so the true
pressure is max(log 4, q log 4) with a kink at q = 1, and the cylinder
sums converge like log(3)/n near the kink.  This script shows the
finite-depth values, the subadditivity (Fekete) upper bracket, and a
bridging-certificate lower bracket converging around the true value.
"""

import numpy as np

from thermolyap import (finite_pressure, load_example, pressure_estimate,
                        search_bridging_constant)

cfg = load_example("ex1_1")
space, phi = cfg.space, cfg.primary_potential()

print("Pressure of the diagonal matrix family")
print("=" * 60)

# A bridging certificate: every pair of symbols can be glued with a
# short connecting word at a uniform multiplicative cost.  Here the
# worst pair is (third, fourth symbol), whose only surviving diagonal
# entry is the unit one, giving the constant 1/(3*4).
cert = search_bridging_constant(space, phi, 1, 2)
print(f"bridging constant c = {cert.c:.6f} (= 1/12), bridge length <= {cert.t}")
print()

for q in (0.5, 1.0, 2.0):
    truth = max(np.log(4), q * np.log(4))
    est = pressure_estimate(space, phi, q, 10, certificate=cert)
    print(f"q = {q}:")
    print(f"  finite-depth value P_10(q)   {est.value:.6f}")
    print(f"  Fekete upper bracket         {est.upper:.6f}")
    print(f"  certificate lower bracket    {est.lower:.6f}")
    print(f"  ideal limit                  {truth:.6f}")
    print()

print("depth-by-depth convergence at q = 1 (slowest point, the kink):")
for n in (2, 4, 6, 8, 10, 12):
    v = finite_pressure(space, phi, 1.0, n)
    print(f"  n = {n:2d}: {v:.6f}   (excess over log 4: {v - np.log(4):.6f})")
print("the excess decays like log(3)/n: three branches share the lead")
