"""A constant conformal factor lifts to a geodesic sphere.

Run with ``python demos/geodesic_sphere.py``.
"""
import math

import numpy as np

from horolift import factors, lift, metric

# rho = t on S^3.  The metric e^{2t} g_0 is a round sphere of radius e^t, its
# Schouten eigenvalues are all e^{-2t}/2, and the lift is the hyperbolic
# sphere of radius t centred at (1, 0, ..., 0).
n, t = 3, 1.0
rho = factors.Constant(n, t)
x = np.random.default_rng(0).standard_normal((500, n + 1))
x /= np.linalg.norm(x, axis=1, keepdims=True)

sample = lift.lift(rho, x)
print("quadric defects:", sample.quadric_defects())
print("distance from centre:", np.unique(np.round(np.arccosh(sample.phi[:, 0]), 12)))
print("principal curvatures range:", sample.kappa.min(), sample.kappa.max(), " coth t =", 1 / math.tanh(t))

# The curvatures and the Schouten eigenvalues obey lambda = 1/2 - 1/(1 + kappa).
lam = metric.schouten_tensor(rho, x).eigenvalues
print("lambda:", lam[0], " lambda-kappa residual:", lift.lambda_kappa_residual(lam, sample.kappa))

# The Gauss map is the identity of the sphere: the normal geodesic through
# phi(x) ends at x.
print("Gauss map error:", np.max(np.abs(lift.gauss_map(sample) - x)))
