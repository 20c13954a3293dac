import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from horolift import factors, lift, lorentz, metric
from horolift.errors import LiftDegeneracyError
from conftest import random_sphere


def test_constant_factor_lift():
    t = 0.9
    x = random_sphere(3, 20)
    phi, eta, psi = lift.lift_point(factors.Constant(3, t), x)
    assert np.allclose(phi[:, 0], math.cosh(t)) and np.allclose(phi[:, 1:], math.sinh(t) * x)
    assert np.allclose(eta[:, 0], -math.sinh(t)) and np.allclose(eta[:, 1:], -math.cosh(t) * x)
    assert np.allclose(psi, math.exp(t) * np.hstack([np.ones((20, 1)), x]))


def test_constant_factor_forms():
    t = 0.7
    first, second, _ = lift.fundamental_forms(factors.Constant(2, t), random_sphere(2, 10))
    assert np.allclose(first, math.sinh(t) ** 2 * np.eye(2), atol=1e-14)
    assert np.allclose(second, math.sinh(t) * math.cosh(t) * np.eye(2), atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 4.0))
def test_orientation_calibration(t):
    s = lift.lift(factors.Constant(2, t), random_sphere(2, 5))
    assert np.allclose(s.kappa, 1 / math.tanh(t), rtol=1e-9)
    assert np.all(s.kappa > 1)


@pytest.mark.parametrize("n", [2, 3])
def test_quadric_invariants(n):
    x = random_sphere(n, 500, seed=n)
    for fac in (factors.MobiusCap(n, 0.8, 0.4), factors.Linear(n, tuple(np.linspace(-0.3, 0.3, n + 1)), 0.5)):
        d = lift.lift(fac, x).quadric_defects()
        assert max(d.values()) <= 1e-10


def test_gauss_map_identity():
    x = random_sphere(3, 200)
    for fac in (factors.MobiusCap(3, 0.5, 0.4), factors.FiniteDifference.of(factors.MobiusCap(3, 0.5, 0.4))):
        assert np.max(np.abs(lift.gauss_map(lift.lift(fac, x)) - x)) <= 1e-10


def test_psi_first_form_is_the_metric():
    x = random_sphere(2, 100)
    step = 1e-4
    assert lift.psi_metric_defect(factors.Quadratic(2, ((0.2, 0, 0), (0, -0.1, 0), (0, 0, 0.3)), 0.1), x, step) <= 5 * step**2


@pytest.mark.parametrize("n", [2, 3])
def test_lambda_kappa_relation(n):
    x = random_sphere(n, 300, seed=10 + n)
    fac = metric.dilate(factors.MobiusCap(n, 0.6, 0.0), 0.8)
    assert lift.verify_lambda_kappa(fac, x) <= 1e-8
    assert lift.verify_lambda_kappa(fac, x, step=1e-3) <= 5e-4
    quad = factors.Quadratic(n, tuple(map(tuple, 0.3 * np.eye(n + 1)[::-1])), 1.0)
    assert lift.verify_lambda_kappa(quad, x) <= 1e-8
    assert lift.verify_lambda_kappa(factors.FiniteDifference.of(quad), x) <= 5e-4


def test_dilated_mobius_is_umbilic():
    s = lift.lift(factors.FiniteDifference.of(factors.MobiusCap(3, 0.9, 0.5)), random_sphere(3, 100))
    assert np.max(s.kappa[:, -1] - s.kappa[:, 0]) <= 1e-6


def test_concavity_flag_and_degeneracy():
    first = np.eye(2)
    kappa, concave = lift.principal_curvatures(first, np.diag([-1.2, 0.5]))
    assert kappa[0] == pytest.approx(-1.2) and not concave
    with pytest.raises(LiftDegeneracyError):
        lift.principal_curvatures(np.diag([1.0, 1e-10]), np.eye(2))
    with pytest.raises(LiftDegeneracyError):
        lift.principal_curvatures(np.diag([1.0, -1.0]), np.eye(2))


def test_lambda_kappa_residual_singular():
    with pytest.raises(ValueError):
        lift.lambda_kappa_residual([0.1, 0.2], [-1.0, 3.0])
    assert lift.lambda_kappa_residual([0.0], [1.0]) == 0.0


@pytest.mark.parametrize("n", [2, 3])
def test_isometry_equivariance(n):
    # boosting the geodesic sphere of radius t gives the lift of the Mobius factor
    s, t = 0.7, 0.5
    y = random_sphere(n, 200)
    boost = lorentz.hyperbolic_translation(np.eye(n + 1)[n], s)
    x = lift.boundary_map(boost, y)
    phi_sphere, eta_sphere, _ = lift.lift_point(factors.Constant(n, t), y)
    phi_mob, eta_mob, _ = lift.lift_point(factors.MobiusCap(n, s, t), x)
    assert np.max(np.abs(boost(phi_sphere) - phi_mob)) <= 1e-6
    assert np.max(np.abs(boost(eta_sphere) - eta_mob)) <= 1e-6


def test_samples_csv(tmp_path):
    s = lift.lift(factors.Constant(2, 1.0), random_sphere(2, 4))
    path = tmp_path / "lift.csv"
    lift.write_samples_csv(path, s)
    lines = path.read_text().splitlines()
    assert len(lines) == 5 and lines[0].startswith("x0,x1,x2,phi0")
