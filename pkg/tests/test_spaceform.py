import math

import numpy as np
import pytest

from solitonlab import spaceform
from solitonlab.spaceform import (chc, cotc, rho_hessian, sample_geodesic_sphere,
                                  shc, support_value)


def test_flat_values():
    assert shc(0.0, 2.5) == 2.5
    assert chc(0.0, 7.0) == 1.0


def test_hyperbolic_values():
    assert shc(-1.0, 1.0) == pytest.approx(math.sinh(1.0), rel=1e-15)
    assert chc(-1.0, 1.0) == pytest.approx(math.cosh(1.0), rel=1e-15)


def test_spherical_values():
    assert shc(4.0, 0.5) == pytest.approx(math.sin(1.0) / 2.0, rel=1e-14)
    assert chc(4.0, 0.5) == pytest.approx(math.cos(1.0), rel=1e-14)


def test_continuity_across_zero():
    assert abs(shc(-1e-12, 1.0) - shc(0.0, 1.0)) < 1e-12
    assert abs(chc(1e-12, 1.0) - chc(0.0, 1.0)) < 1e-12
    # |shc(c,t) - t| <= K |c| with K ~ t^3/6 on t in [0, 10]
    for c in (1e-6, -1e-6, 1e-9, -1e-9):
        for t in np.linspace(0.0, 10.0, 21):
            assert abs(shc(c, t) - shc(0.0, t)) <= 170.0 * abs(c)


def test_derivative_identities():
    e = 1e-5
    for c in np.linspace(-4.0, 4.0, 17):
        for t in np.linspace(0.1, 3.0, 7):
            sh, ch = shc(c, t), chc(c, t)
            dsh = (shc(c, t + e) - shc(c, t - e)) / (2.0 * e)
            dch = (chc(c, t + e) - chc(c, t - e)) / (2.0 * e)
            assert abs(dsh - ch) <= 1e-8 * max(1.0, abs(ch))
            assert abs(dch + c * sh) <= 1e-8 * max(1.0, abs(c * sh))
            assert abs(ch * ch + c * sh * sh - 1.0) <= 1e-12 * max(1.0, ch * ch + abs(c) * sh * sh)


def test_rho_hessian():
    assert rho_hessian(0.0, 2.0, "orthogonal") == pytest.approx(0.5, rel=1e-15)
    assert rho_hessian(-1.0, 1.0, "orthogonal") == pytest.approx(
        math.cosh(1.0) / math.sinh(1.0), rel=1e-14)
    assert rho_hessian(-3.0, 0.7, "radial") == 0.0
    with pytest.raises(ValueError):
        rho_hessian(0.0, 0.0, "radial")
    with pytest.raises(ValueError):
        rho_hessian(0.0, 1.0, "sideways")


def test_support_flat_circle():
    for th in np.linspace(0.0, 2.0 * np.pi, 13):
        x = np.array([math.cos(th), math.sin(th)])
        data = support_value(0.0, x, -x)
        assert data.support == pytest.approx(-1.0, abs=1e-15)
        assert data.rho == pytest.approx(1.0)
        assert np.abs(data.tangential).max() < 1e-15


def test_support_flat_sphere_radius():
    x = 3.5 * np.array([0.6, 0.0, 0.8])
    data = support_value(0.0, x, -x / 3.5)
    assert data.support == pytest.approx(-3.5, rel=1e-15)


def test_support_reduces_to_euclidean():
    rng = np.random.default_rng(7)
    for _ in range(50):
        x = rng.standard_normal(3)
        x /= np.linalg.norm(x) / rng.uniform(0.5, 3.0)
        nu = rng.standard_normal(3)
        nu /= np.linalg.norm(nu)
        data = support_value(0.0, x, nu)
        assert data.support == pytest.approx(float(x @ nu), abs=1e-13)
        # unit decomposition of the radial direction
        assert data.nu_component ** 2 + float(data.tangential @ data.tangential) == \
            pytest.approx(1.0, abs=1e-12)


def test_support_hyperbolic_sphere():
    rho0 = 0.8
    for c in (-1.0, -2.5):
        kappa = math.sqrt(-c)
        u = np.array([0.6, 0.8])
        x = np.array([math.cosh(kappa * rho0) / kappa,
                      math.sinh(kappa * rho0) / kappa * u[0],
                      math.sinh(kappa * rho0) / kappa * u[1]])
        nu = np.array([-math.sinh(kappa * rho0),
                       -math.cosh(kappa * rho0) * u[0],
                       -math.cosh(kappa * rho0) * u[1]])
        data = support_value(c, x, nu)
        assert data.rho == pytest.approx(rho0, rel=1e-12)
        assert data.nu_component == pytest.approx(-1.0, abs=1e-12)
        assert data.support == pytest.approx(-shc(c, rho0), rel=1e-12)


def test_support_rejections():
    with pytest.raises(ValueError, match="base point"):
        support_value(0.0, np.zeros(2), np.array([1.0, 0.0]))
    with pytest.raises(ValueError, match="unit"):
        support_value(0.0, np.array([1.0, 0.0]), np.array([2.0, 0.0]))
    with pytest.raises(ValueError, match="<= 0"):
        support_value(1.0, np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    with pytest.raises(ValueError, match="hyperboloid"):
        support_value(-1.0, np.array([1.0, 0.5, 0.0]), np.array([0.0, 0.0, 1.0]))


def test_sample_geodesic_sphere():
    for c in (0.0, -1.0):
        for dim in (1, 2, 3):
            s = sample_geodesic_sphere(c, 1.3, dim, 40)
            assert s.lam.shape == (40, dim)
            np.testing.assert_allclose(s.lam, cotc(c, 1.3), rtol=1e-14)
            np.testing.assert_allclose(s.support, -shc(c, 1.3), atol=1e-12)
    with pytest.raises(ValueError):
        sample_geodesic_sphere(0.5, 1.0, 2)
    with pytest.raises(ValueError):
        sample_geodesic_sphere(0.0, -1.0, 2)
