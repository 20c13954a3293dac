"""Annuli bounded by two minimal hypersurfaces.

On ``r <= theta <= pi/2`` the shooting solver looks for a rotationally
symmetric solution whose two boundary components have vanishing mean
curvature.  For sigma_1 in dimension 3 the solution is the hyperbolic
cylinder ``rho = -log(3)/2 - log(sin theta)``.  For Gauss curvature 1 in
dimension 2 no solution exists: Gauss-Bonnet on an annulus with geodesic
boundary forces the total curvature to vanish.

Run with ``python demos/annulus.py``.
"""
import math

import numpy as np

from horolift import elliptic, radial
from horolift.errors import NoSolutionFound

r = math.pi / 3
prof = radial.shoot_annulus(elliptic.sigma_k_data(3, 1), r, 3)
exact = -0.5 * math.log(3.0) - np.log(np.sin(prof.theta))
print("sigma_1, n = 3")
print("  max |rho - cylinder|:", np.max(np.abs(prof.rho - exact)))
print("  residuals:", prof.residuals)
print("  reflection across the equator:", radial.reflection_extension_residual(prof))
print("  lift symmetry under rotations about the pole:", radial.lift_symmetry_defect(prof))

try:
    radial.shoot_annulus(elliptic.trace_form_2d(), r, 2)
except NoSolutionFound as exc:
    print("K = 1, n = 2:", exc)
