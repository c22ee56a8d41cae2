"""Reconstructing a two-dimensional subgradient set from support data.

The synthetic pressure max(1 + q1, 1 + 2 q1 - q2) is differentiable off
the diagonal, where its gradient is (1, 0) on one side and (2, -1) on
the other.  On the diagonal the subgradient set is the whole segment
between those gradients.  Sampling one-sided directional derivatives
and intersecting the resulting support halfplanes recovers the set.
"""

import numpy as np

from thermolyap import directional_derivative, load_example, \
    subgradient_polygon

P = load_example("ex6_3").pressure

for q in (np.array([1.0, 2.0]), np.array([2.0, 1.0]), np.array([1.0, 1.0])):
    poly = subgradient_polygon(P, q, n_directions=64)
    where = "q1 < q2" if q[0] < q[1] else ("q1 > q2" if q[0] > q[1]
                                           else "on the kink")
    print(f"q = {q.tolist()} ({where}):")
    print(f"  subgradient set vertices:\n{np.round(poly, 9)}")
    print()

q = np.array([1.0, 1.0])
print("support function samples at the kink point:")
for v in ([1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]):
    d = directional_derivative(P, q, np.asarray(v))
    print(f"  direction {v}: one-sided derivative {d.value:+.6f}")
print("opposite directions do not cancel: the set has positive width")
