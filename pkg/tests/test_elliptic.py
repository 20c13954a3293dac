import math
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from horolift import elliptic as E


def test_sigma_normalization_examples():
    assert float(E.sigma_k_data(3, 1)(np.full(3, 0.5))) == pytest.approx(1.0, abs=1e-15)
    s2 = E.sigma_k_data(3, 2)
    assert float(s2(np.ones(3))) == pytest.approx(4.0, abs=1e-14)
    assert s2.lambda0 == 0.5


def test_sigma_k_range():
    with pytest.raises(ValueError):
        E.sigma_k_data(3, 0)
    with pytest.raises(ValueError):
        E.sigma_k_data(3, 4)


def test_gamma_1_membership():
    d = E.sigma_k_data(3, 1)
    assert d.in_cone(np.array([2.0, -1.0, -0.5]))
    assert not d.in_cone(np.array([1.0, -1.0, -0.5]))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_homogeneity_and_symmetry(k, rng):
    d = E.sigma_k_data(3, k)
    lam = rng.uniform(-1, 2, size=(200, 3))
    c = 1.7
    assert np.allclose(d(c * lam), c**k * d(lam), rtol=1e-12, atol=1e-12)
    for p in permutations(range(3)):
        assert np.allclose(d(lam[:, p]), d(lam), atol=1e-12)


def test_ellipticity_reports():
    r1 = E.check_ellipticity(E.sigma_k_data(3, 1), 1000, 0)
    assert r1["pass"] and r1["ii"]["pass"]
    assert r1["iv"]["lambda0"] == pytest.approx(0.5, abs=1e-10)
    r2 = E.check_ellipticity(E.sigma_k_data(3, 2), 1000, 0)
    assert r2["i"]["pass"] and r2["iii"]["pass"] and r2["iv"]["pass"]


def test_negated_gradient_detected():
    base = E.sigma_k_data(3, 1)
    bad = E.EllipticData(3, lambda l: (2 * l[..., 0] - l[..., 1] + 2 * l[..., 2]) / 1.5,
                         base.cone, 0.5, name="negated")
    rep = E.check_ellipticity(bad, 300, 1)
    assert not rep["iii"]["pass"] and rep["iii"]["violations"] > 0
    with pytest.raises(ValueError):
        E.make_curvature_data(bad, 100)


def test_transform_examples():
    assert np.allclose(E.curvature_transform(np.ones(3)), 0.0)
    assert E.curvature_transform(np.array([2.0]))[0] == pytest.approx(1 / 6)
    t = 0.8
    assert E.curvature_transform(np.array([1 / math.tanh(t)]))[0] == pytest.approx(math.exp(-2 * t) / 2, abs=1e-15)
    with pytest.raises(ValueError):
        E.curvature_transform(np.array([1.0, -1.0]))


def test_transform_consistency(rng):
    kappa = rng.uniform(-1, 50, size=(1000, 3))
    kappa = kappa[kappa.min(axis=1) > -1]
    assert np.max(np.abs(E.curvature_transform(kappa) - (0.5 - 1 / (1 + kappa)))) <= 1e-14


@settings(max_examples=100, deadline=None)
@given(st.floats(-0.99, 40), st.floats(0.001, 5))
def test_transform_increasing(x, dx):
    a, b = E.curvature_transform(np.array([x, x + dx]))
    assert a < b < 0.5


def test_curvature_data():
    d = E.sigma_k_data(3, 1)
    cd, rep = E.make_curvature_data(d, 1000, 0)
    assert rep["transfer"]["pass"]
    t = 0.6
    assert float(cd.W(np.full(3, 1 / math.tanh(t)))) == pytest.approx(math.exp(-2 * t), abs=1e-14)
    assert float(cd.W(np.ones(3))) == 0.0
    assert cd.umbilical_value() == {"value": 0.0, "defined": True}
    assert cd.r0() == math.inf
    assert E.CurvatureData(E.dilate_data(d, 0.5)).r0() == pytest.approx(
        float(E.inverse_curvature_transform(math.exp(-1.0) / 2)))


def test_p2_examples():
    ok, slack = E.check_P2(np.full(3, 1 / 6), 0.0)
    assert ok and slack == pytest.approx(2.0)
    ok, slack = E.check_P2(np.full(3, -0.4), 10.0)
    assert not ok and slack == pytest.approx(1 / 9 - 10 / math.sqrt(101))
    with pytest.raises(ValueError):
        E.check_P2(np.array([0.5, 0.1]), 0.0)


def test_dilated_data():
    d = E.dilate_data(E.sigma_k_data(3, 2), math.log(2))
    assert d.lambda0 == pytest.approx(0.125)
    assert float(d(np.full(3, 0.125))) == pytest.approx(1.0)
    assert E.solve_lambda0(d) == pytest.approx(0.125, abs=1e-10)


def test_expression_data():
    d = E.expression_data("s1**2 - s2", 3)
    assert d.lambda0 == pytest.approx(0.5, abs=1e-10)
    assert float(d(np.full(3, 0.5))) == pytest.approx(1.0)
    for bad in ("__import__('os')", "s4", "s1 ** s2", "abs(s1)"):
        with pytest.raises(ValueError):
            E.expression_data(bad, 3)


def test_solve_slot_matches_closed_form(rng):
    d = E.sigma_k_data(3, 2)
    for _ in range(20):
        t = rng.uniform(0.05, 1.0)
        assert d.solve_slot(np.full(2, t)) == pytest.approx(d.radial_slot(t), abs=1e-10)
