"""Boundary behaviour of a dilated Moebius cap on the upper hemisphere.

The factor is the pullback of the round metric by a conformal map that
shrinks the hemisphere onto a smaller cap.  Dilating it by ``t = ln 2`` gives
boundary curvature ``h = -1/2`` along the equator, and the lifted boundary
lies on the equidistant plane at level 1/2 meeting the hypersurface at a
constant angle.

Run with ``python demos/mobius_cap_boundary.py``.
"""
import math

import numpy as np

from horolift import boundary, factors, metric, sphere

n = 3
dom = sphere.DomainSpec.hemisphere(n)
rho = metric.dilate(factors.MobiusCap(n, math.asinh(1.0), 0.0), math.log(2.0))

_, edge = sphere.domain_grid(dom, 1, 64)
h = metric.boundary_mean_curvature(rho, dom, "outer", edge["outer"])
print("boundary mean curvature along the equator:", h.min(), h.max())

plane = boundary.boundary_plane(dom, "outer", float(np.mean(h)))
print("plane:", plane.label, " unit normal:", plane.normal)

for check in (boundary.check_boundary_in_plane(rho, dom, "outer", plane),
              boundary.check_angle(rho, dom, "outer", plane),
              boundary.check_halfspace(rho, dom, plane.level),
              boundary.check_convexity_bound(rho, dom, plane.level)):
    print(f"{check.name:22s} passed={check.passed}  deviation={check.deviation:.2e}")

print("expected <eta, n> along the boundary:", plane.angle_target())
