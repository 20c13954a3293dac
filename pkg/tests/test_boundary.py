import math

import numpy as np
import pytest

from horolift import boundary, factors, lift, lorentz, metric, radial, sphere
from horolift import elliptic as E


def test_plane_encodings():
    p = boundary.PlaneSpec.equidistant(2, 0.5)
    assert np.allclose(p.normal, [0, 0, 0, 1]) and p.level == 0.5
    q = boundary.PlaneSpec.latitude(2, 1.0)
    assert abs(float(np.dot(q.normal[1:], q.normal[1:]) - q.normal[0] ** 2) - 1) < 1e-14
    with pytest.raises(ValueError):
        boundary.PlaneSpec(np.array([1.0, 0, 0, 0]))


def test_field_normal_algebra():
    c = 0.8
    plane = boundary.PlaneSpec.equidistant(2, c)
    rng = np.random.default_rng(0)
    spatial = rng.standard_normal((50, 3))
    spatial[:, 2] = c
    from horolift.lorentz import hyperbolic_point, minkowski_inner
    y = hyperbolic_point(spatial)
    n = plane.field_normal(y)
    assert np.max(np.abs(minkowski_inner(n, n) - 1)) <= 1e-12
    assert np.max(np.abs(minkowski_inner(n, y))) <= 1e-12


def test_constant_factor_battery():
    dom = sphere.DomainSpec.hemisphere(3)
    rho = factors.Constant(3, 1.0)
    plane = boundary.boundary_plane(dom, "outer", 0.0)
    assert boundary.check_boundary_in_plane(rho, dom, "outer", plane).deviation <= 1e-15
    ang = boundary.check_angle(rho, dom, "outer", plane)
    assert ang.passed and ang.detail["target"] == 0.0
    hs = boundary.check_halfspace(rho, dom, 0.0)
    assert hs.passed and abs(hs.detail["min_margin"]) < 1e-15 and hs.detail["interior_min_margin"] > 0
    cb = boundary.check_convexity_bound(rho, dom, 0.0)
    assert cb.passed and cb.detail["margin"] == pytest.approx(1 / math.tanh(1.0))


def test_convexity_bound_arithmetic():
    dom = sphere.DomainSpec.hemisphere(2)
    t = math.atanh(0.5)  # coth t = 2
    cb = boundary.check_convexity_bound(factors.Constant(2, t), dom, 1.0)
    assert cb.detail["margin"] == pytest.approx(2 - 1 / math.sqrt(2), abs=1e-12)


@pytest.mark.parametrize("c", [1.0, 0.5])
def test_mobius_battery(c):
    dom = sphere.DomainSpec.hemisphere(2)
    s, t = math.asinh(2 * c), math.log(2.0)
    rho = factors.Dilated(factors.MobiusCap(2, s, 0.0), t)
    plane = boundary.boundary_plane(dom, "outer", rho.base.equator_curvature() * math.exp(-t))
    assert plane.level == pytest.approx(c)
    fd = factors.FiniteDifference.of(rho, richardson=True)
    assert boundary.check_boundary_in_plane(fd, dom, "outer", plane).deviation <= 1e-6
    ang = boundary.check_angle(fd, dom, "outer", plane)
    assert ang.passed and ang.detail["target"] == pytest.approx(c / math.sqrt(1 + c * c))
    hs = boundary.check_halfspace(rho, dom, c)
    assert hs.passed and hs.detail["interior_min_margin"] > 0


def test_angle_skipped_without_containment():
    dom = sphere.DomainSpec.hemisphere(2)
    rep = boundary.check_angle(factors.Constant(2, 1.0), dom, "outer", boundary.PlaneSpec.equidistant(2, 0.3))
    assert not rep.passed and "skipped" in rep.detail


def test_dimple_fails_halfspace():
    dom = sphere.DomainSpec.hemisphere(2)
    c = (math.sqrt(1 - 0.09), 0.0, 0.3)
    rho = factors.Dimple(factors.Constant(2, 1.0), -1.0, 0.2, c)
    t0, _ = metric.normalize_for_lift(rho, dom)
    assert not boundary.check_halfspace(metric.dilate(rho, t0), dom, 0.0).passed


def test_annulus_inner_boundary_on_latitude_plane():
    prof = radial.shoot_annulus(E.sigma_k_data(3, 1), math.pi / 3)
    dom = sphere.DomainSpec("annulus", 3, math.pi / 3)
    rho = prof.as_factor()
    for comp in ("inner", "outer"):
        rep = boundary.check_boundary_in_plane(rho, dom, comp, boundary.boundary_plane(dom, comp))
        assert rep.deviation <= 1e-6
    assert boundary.check_halfspace(rho, dom).passed


def test_symmetry_defect():
    dom = sphere.DomainSpec("cap", 2, 1.2)
    x, _ = sphere.domain_grid(dom, 16, 32)
    rng = np.random.default_rng(0)
    s = lift.lift(factors.MobiusCap(2, 0.4, 0.8), x)
    assert boundary.symmetry_defect(s, lorentz.identity(2)) == 0.0
    spacing = boundary.sample_spacing(s)
    rot = lorentz.random_axial_rotation(2, rng)
    assert boundary.symmetry_defect(s, rot) <= 2 * spacing
    q = factors.Quadratic(2, ((0.8, 0.3, 0), (0.3, -0.5, 0.2), (0, 0.2, 0.1)), 1.0)
    sq = lift.lift(q, x)
    tilt = lorentz.rotation(2, 1, 3, 0.9)
    assert boundary.symmetry_defect(sq, tilt) > 2 * boundary.sample_spacing(sq)


def test_reflection_symmetry_of_doubled_annulus():
    r = math.pi / 3
    prof = radial.shoot_annulus(E.sigma_k_data(3, 1), r)
    rho = prof.as_factor()
    dom = sphere.DomainSpec("annulus", 3, r)
    x, _ = sphere.domain_grid(dom, 16, 32)
    mirror = x * np.array([1, 1, 1, -1.0])
    t0, _ = metric.normalize_for_lift(rho, dom)
    rt = metric.dilate(rho, t0)
    upper = lift.lift_point(rt, x)[0]
    # the factor of the doubled domain is even in the last coordinate
    lower = lift.lift_point(metric.dilate(radial.ProfileFactor(prof, -sphere.north_pole(3)), t0), mirror)[0]
    doubled = np.vstack([upper, lower])
    refl = lorentz.reflection_across_plane(np.eye(5)[4])
    assert boundary.symmetry_defect(doubled, refl) <= 2 * boundary.sample_spacing(doubled)


def test_self_proximity_scan_clean():
    x, _ = sphere.domain_grid(sphere.DomainSpec.hemisphere(2), 16, 16)
    rep = boundary.self_proximity_scan(lift.lift(factors.Constant(2, 1.0), x), 1e-3, 0.5)
    assert rep.passed
