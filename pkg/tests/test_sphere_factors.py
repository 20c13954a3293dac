import math

import numpy as np
import pytest

from horolift import factors, sphere
from horolift.errors import DomainError
from conftest import random_sphere


def test_tangent_frame_orthonormal():
    x = random_sphere(3, 200)
    f = sphere.tangent_frame(x)
    gram = np.swapaxes(f, 1, 2) @ f
    assert np.allclose(gram, np.eye(3), atol=1e-13)
    assert np.allclose(np.einsum("mi,mia->ma", x, f), 0, atol=1e-13)


def test_chart_roundtrip():
    x = random_sphere(2, 100)
    ch = sphere.chart_of(x)
    u = sphere.to_chart(x, ch)
    assert np.all(np.linalg.norm(u, axis=1) <= 1 + 1e-12)
    assert np.allclose(sphere.from_chart(u, ch), x, atol=1e-13)


def test_domain_validation():
    with pytest.raises(DomainError):
        sphere.DomainSpec("cap", 2, 2.0)
    with pytest.raises(DomainError):
        sphere.DomainSpec("annulus", 2, math.pi / 2)
    with pytest.raises(DomainError):
        sphere.DomainSpec("disk", 2)


def test_reference_curvatures():
    assert sphere.DomainSpec.hemisphere(2).reference_curvature("outer") == 0.0
    assert sphere.DomainSpec("cap", 2, math.pi / 4).reference_curvature("outer") == pytest.approx(1.0)
    ann = sphere.DomainSpec("annulus", 3, math.pi / 3)
    assert ann.reference_curvature("inner") == pytest.approx(-1 / math.sqrt(3))
    assert ann.reference_curvature("outer") == 0.0


def test_grid_points_inside():
    dom = sphere.DomainSpec("annulus", 3, 0.8)
    inter, bnd = sphere.domain_grid(dom, 16, 16)
    assert np.all(dom.contains(inter))
    assert np.all(dom.on_component("inner", bnd["inner"]))
    assert np.all(dom.on_component("outer", bnd["outer"]))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_finite_difference_matches_closed_form(n):
    x = random_sphere(n, 300, seed=n)
    for fac in (factors.MobiusCap(n, 0.7, 0.2),
                factors.Quadratic(n, tuple(map(tuple, np.diag(np.linspace(-0.5, 0.5, n + 1)))), 0.1),
                factors.Linear(n, tuple(np.linspace(0.1, 0.4, n + 1)))):
        _, g, h = fac.derivatives(x)
        h_step = 1e-3
        _, gf, hf = factors.FiniteDifference.of(fac, h=h_step).derivatives(x)
        assert np.max(np.abs(g - gf)) <= 5 * h_step**2 + 1e-9
        assert np.max(np.abs(h - hf)) <= 5 * h_step**2 + 1e-9


def test_chart_agreement_with_richardson():
    x = random_sphere(2, 100, seed=9)
    x = x[np.abs(x[:, -1]) < 0.5]
    fac = factors.MobiusCap(2, 0.5, 0.0)
    a = factors.FiniteDifference.of(fac, chart=0, richardson=True).derivatives(x)
    b = factors.FiniteDifference.of(fac, chart=1, richardson=True).derivatives(x)
    assert np.max(np.abs(a[2] - b[2])) <= 1e-8


def test_radial_pole_limit():
    fac = factors.MobiusCap(3, 0.6, 0.0)
    near = np.array([[1e-9, 0, 0, math.sqrt(1 - 1e-18)]])
    pole = np.array([[0, 0, 0, 1.0]])
    h_near = factors.RadialFactor.derivatives(fac, near)[2]
    h_pole = factors.RadialFactor.derivatives(fac, pole)[2]
    assert np.allclose(h_near, h_pole, atol=1e-7)
    assert np.allclose(h_pole, fac.derivatives(pole)[2], atol=1e-12)


def test_grid_csv_roundtrip(tmp_path):
    fac = factors.MobiusCap(2, 0.4, 0.1)
    path = tmp_path / "rho.csv"
    factors.write_grid_csv(path, fac, points=41)
    g = factors.grid_factor_from_csv(path, 2)
    x = random_sphere(2, 50, seed=2)
    assert np.max(np.abs(g.evaluate(x) - fac.evaluate(x))) < 1e-4


def test_grid_csv_rejects_nan(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("chart,u0,u1,rho\n0,0,0,nan\n0,0,1,abc\n")
    with pytest.raises(ValueError, match="row 2"):
        factors.read_grid_csv(path)


def test_cylinder_singular_at_pole():
    with pytest.raises(DomainError):
        factors.Cylinder(2).evaluate(np.array([[0, 0, 1.0]]))
