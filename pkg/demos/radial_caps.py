"""Rotationally symmetric solutions on the hemisphere by shooting.

Two experiments:

1. Gauss curvature 1 on the 2-dimensional hemisphere with boundary
   curvature 1.  The solution is a spherical cap of angular radius pi/4,
   so its boundary length and area are known in closed form.
2. sigma_1 of the Schouten tensor equal to its round value on the
   3-dimensional hemisphere, for several boundary curvatures.  Each solution
   is matched against the Moebius family of round caps.

Run with ``python demos/radial_caps.py``.
"""
import math

from horolift import elliptic, radial

prof = radial.shoot_cap(elliptic.trace_form_2d(), 1.0)
ref = radial.cap_geometry(math.pi / 4, 2)
print("K = 1, h = 1")
print("  boundary length", prof.boundary_area(), " reference", ref)
print("  area           ", prof.volume())
print("  residuals      ", prof.residuals)

data = elliptic.sigma_k_data(3, 1)
for c in (0.0, 0.5, 1.0, -0.5):
    fit = radial.fit_mobius(radial.shoot_cap(data, c))
    print(f"sigma_1, c = {c:+.1f}: s = {fit['s']:+.6f}, t = {fit['t']:+.6f}, "
          f"sup deviation {fit['sup_deviation']:.1e}, equator h {fit['equator_h']:+.6f}")
