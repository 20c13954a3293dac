"""Sampled ellipticity checks for curvature functions of the Schouten tensor.

Run with ``python demos/ellipticity.py``.
"""
import numpy as np

from horolift import elliptic

for k in (1, 2, 3):
    data = elliptic.sigma_k_data(3, k)
    rep = elliptic.check_ellipticity(data, 1000, seed=1)
    print(f"sigma_{k}: lambda0 = {data.lambda0}, conditions pass = {rep['pass']}")

# A user-supplied function: sigma_2 / sigma_1, normalised so that the round
# metric solves it.  The normalising constant lambda0 is found numerically.
data = elliptic.expression_data("s2 / s1", 3)
print("s2/s1: lambda0 =", data.lambda0)
rep = elliptic.check_ellipticity(data, 500, seed=2)
for key in ("i", "ii", "iii", "iv"):
    print(f"  condition ({key}): pass = {rep[key]['pass']}")
print("  condition (ii) note:", rep["ii"]["note"])

# The same data written in terms of principal curvatures of the lift.
cd, info = elliptic.make_curvature_data(elliptic.sigma_k_data(3, 2), 500, seed=3)
kappa = np.array([[1.0, 2.0, 3.0]])
print("W(1, 2, 3) =", cd.W(kappa), " umbilical value:", cd.umbilical_value())
print("transferred checks pass:", info["transfer"]["pass"])
