import math
from dataclasses import dataclass

import numpy as np
import pytest

from solitonlab import curvfun, hypersurface, soliton, spaceform
from solitonlab.curvfun import (AnisotropyRatio, GaussCurvature, MeanCurvature,
                                builtin_functions, parse_curvature_function)
from solitonlab.soliton import (admissibility, fit_tau, pinching_quadratics,
                                residual_field, solve_sphere_radius, sphere_tau,
                                sweep_row, threshold_high, threshold_low)


# ---------------------------------------------------------------------------
# sphere solutions

def test_sphere_tau_mean_curvature_normalization():
    # H + <X, nu> = 0 on the sphere of radius sqrt(n): tau = 1
    for n in (1, 2, 3):
        f = MeanCurvature(n)
        assert sphere_tau(f, math.sqrt(n), 0.0) == pytest.approx(1.0, rel=1e-14)
        assert sphere_tau(f, 1.0, 0.0) == pytest.approx(n, rel=1e-14)


def test_sphere_tau_gauss_unit():
    assert sphere_tau(GaussCurvature(2), 1.0, 0.0) == pytest.approx(1.0, rel=1e-15)


def test_sphere_tau_hyperbolic():
    f = MeanCurvature(2)
    expected = 2.0 * math.cosh(1.0) / math.sinh(1.0) ** 2
    tau = sphere_tau(f, 1.0, -1.0)
    assert tau == pytest.approx(expected, rel=1e-14)
    sphere = spaceform.sample_geodesic_sphere(-1.0, 1.0, 2, 64)
    assert np.abs(residual_field(sphere, f, tau)).max() < 1e-10


def test_sphere_tau_rejections():
    with pytest.raises(ValueError, match="no nonzero tau"):
        sphere_tau(AnisotropyRatio(), 1.0, 0.0)
    with pytest.raises(ValueError):
        sphere_tau(MeanCurvature(2), -1.0, 0.0)
    with pytest.raises(ValueError, match="<= 0"):
        sphere_tau(MeanCurvature(2), 1.0, 0.5)
    assert sphere_tau(MeanCurvature(2), 1.0, 0.5, allow_positive_c=True) > 0.0


def test_sphere_tau_scaling_covariance():
    for f in (MeanCurvature(2), GaussCurvature(2), parse_curvature_function("pow(H,-1)", 2)):
        base = sphere_tau(f, 1.7, 0.0)
        for s in (0.5, 2.0, 7.0):
            expected = s ** (-(f.degree + 1.0)) * base
            assert sphere_tau(f, s * 1.7, 0.0) == pytest.approx(expected, rel=1e-12)


def test_negative_degree_sign_contract(rng):
    # elliptic degree < 0 families are negative on the positive cone, so
    # sphere_tau carries the sign of f(1, ..., 1)
    for spec in ("pow(H,-1)", "pow(K,-0.5)", "pow(geomean,-2)"):
        f = parse_curvature_function(spec, 2)
        assert f.degree < 0.0
        values = f.value(rng.uniform(0.05, 5.0, (1000, 2)))
        assert np.all(values < 0.0)
        assert sphere_tau(f, 1.3, 0.0) < 0.0


def test_solve_sphere_radius_anchors():
    assert solve_sphere_radius(MeanCurvature(2), 1.0, 0.0) == pytest.approx(
        math.sqrt(2.0), abs=1e-10)
    assert solve_sphere_radius(GaussCurvature(2), 1.0, 0.0) == pytest.approx(1.0, abs=1e-10)


def test_solve_sphere_radius_round_trip(rng):
    for f in (MeanCurvature(2), GaussCurvature(3), parse_curvature_function("pow(H,-1)", 2)):
        for radius in rng.uniform(0.1, 10.0, 20):
            c = -1.0 if f.degree < 0 else 0.0   # m = -1 at c = 0 is degenerate
            tau = sphere_tau(f, radius, c)
            assert abs(solve_sphere_radius(f, tau, c) - radius) < 1e-10


def test_solve_sphere_radius_diagnostics():
    with pytest.raises(ValueError, match="no sphere soliton in range"):
        solve_sphere_radius(MeanCurvature(2), -1.0, 0.0)
    with pytest.raises(ValueError, match="nonzero"):
        solve_sphere_radius(MeanCurvature(2), 0.0, 0.0)
    inverse = parse_curvature_function("pow(H,-1)", 2)
    with pytest.raises(ValueError, match="degenerate"):
        solve_sphere_radius(inverse, inverse.unit_value(), 0.0)
    with pytest.raises(ValueError, match="no sphere soliton"):
        solve_sphere_radius(inverse, -0.7, 0.0)


# ---------------------------------------------------------------------------
# residual field and tau fitting

def test_residual_field_sphere_families():
    for n in (1, 2, 3):
        for f in builtin_functions(n, include_anisotropy=False):
            for c in (0.0, -1.0):
                tau = sphere_tau(f, 1.3, c)
                sphere = spaceform.sample_geodesic_sphere(c, 1.3, n, 64)
                assert np.abs(residual_field(sphere, f, tau)).max() < 1e-10


def test_residual_field_wrong_tau_is_constant():
    f = MeanCurvature(2)
    tau = sphere_tau(f, 1.3, 0.0)
    sphere = spaceform.sample_geodesic_sphere(0.0, 1.3, 2, 64)
    res = residual_field(sphere, f, 2.0 * tau)
    expected = tau * sphere.support   # linear in tau: the extra tau * Z survives
    np.testing.assert_allclose(res, expected, atol=1e-12)
    assert np.abs(np.abs(res) - tau * spaceform.shc(0.0, 1.3)).max() < 1e-10
    assert np.abs(res - res.mean()).max() < 1e-10


def test_fit_tau_unit_circle():
    geom = hypersurface.curve_geometry(hypersurface.circle(1.0, 256))
    rep = fit_tau(geom, MeanCurvature(1))
    assert rep.tau_fit == pytest.approx(1.0, abs=1e-10)
    assert rep.relative_residual < 1e-10
    assert rep.sample_count == 256


def test_fit_tau_sphere_matches_closed_form():
    geom = hypersurface.revolution_geometry(hypersurface.sphere_profile(math.sqrt(2.0), 256))
    rep = fit_tau(geom, MeanCurvature(2))
    assert abs(rep.tau_fit - 1.0) < 1e-8
    assert rep.relative_residual < 1e-8


def test_fit_tau_ellipse_regression():
    # the ellipse is not a self-similar solution; frozen regression baseline
    geom = hypersurface.curve_geometry(hypersurface.ellipse(2.0, 1.0, 256))
    rep = fit_tau(geom, MeanCurvature(1))
    assert rep.relative_residual > 0.1
    assert rep.relative_residual == pytest.approx(0.424388414233, rel=1e-6)
    assert rep.tau_fit == pytest.approx(0.561579772133, rel=1e-6)
    # normal equation of the weighted least squares
    res = geom.mean + rep.tau_fit * geom.support
    normal_eq = abs(float(geom.weights @ (geom.support * res)))
    assert normal_eq <= 1e-10 * float(geom.weights @ (geom.support ** 2))
    assert rep.max_residual >= rep.rms_residual >= 0.0


def test_ellipse_residual_sign_structure():
    # tau = 1 on the (2,1) ellipse: k(0) = 2 = -Z(0) exactly, so the residual
    # is nonpositive and only touches zero at the two tips (no crossings);
    # the fitted tau must change sign by the normal equation (4 crossings)
    geom = hypersurface.curve_geometry(hypersurface.ellipse(2.0, 1.0, 256))
    f = MeanCurvature(1)
    res = residual_field(geom, f, 1.0)
    assert np.all(res <= 0.0)
    assert res.max() > -1e-4
    signs = np.sign(res)
    assert int(np.sum(signs != np.roll(signs, 1))) == 0
    fitted = residual_field(geom, f, fit_tau(geom, f).tau_fit)
    signs = np.sign(fitted)
    assert int(np.sum(signs != np.roll(signs, 1))) == 4


@dataclass
class _FakeSamples:
    lam: np.ndarray
    support: np.ndarray
    weights: np.ndarray


def test_fit_tau_rejections():
    lam = np.full((8, 2), 1.0)
    with pytest.raises(ValueError, match="16"):
        fit_tau(_FakeSamples(lam, -np.ones(8), np.ones(8)), MeanCurvature(2))
    lam = np.full((32, 2), 1.0)
    with pytest.raises(ValueError, match="degenerate support"):
        fit_tau(_FakeSamples(lam, np.zeros(32), np.ones(32)), MeanCurvature(2))


# ---------------------------------------------------------------------------
# admissibility and pinching thresholds

def test_admissibility_gauss_threshold():
    verdict = admissibility(2, GaussCurvature(2), "neither", 1.9)
    assert verdict.admissible
    assert verdict.covered_by == ("2(iii)",)
    assert verdict.threshold_2iii == pytest.approx(2.0, abs=1e-14)
    blocked = admissibility(2, GaussCurvature(2), "neither", 2.1)
    assert not blocked.admissible


def test_admissibility_threshold_anchor_m3():
    f = parse_curvature_function("pow(K,1.5)", 2)
    assert f.degree == 3.0
    verdict = admissibility(2, f, "neither", 1.0)
    assert verdict.threshold_2iii == pytest.approx((1.0 + math.sqrt(5.0)) / 2.0, abs=1e-12)


def test_admissibility_unconditional_negative_band():
    f = parse_curvature_function("pow(H,-5)", 2)
    verdict = admissibility(2, f, "neither", 1e6)
    assert verdict.admissible
    assert "2(iii)" in verdict.covered_by
    assert verdict.threshold_2iii is None


def test_admissibility_uncovered_fractional_degree():
    f = parse_curvature_function("pow(H,0.5)", 3)
    for label in ("convex", "concave", "neither"):
        verdict = admissibility(3, f, label, 1.0)
        assert not verdict.admissible
        assert verdict.covered_by == ()


def test_admissibility_shape_branches():
    assert admissibility(3, MeanCurvature(3), "convex", 5.0).covered_by == ("2(i)",)
    f = parse_curvature_function("pow(H,-1)", 3)
    assert admissibility(3, f, "concave", 5.0).covered_by == ("2(ii)",)
    assert admissibility(2, MeanCurvature(2), "convex", 5.0).covered_by == ("2(i)", "2(iii)")


def test_admissibility_threshold_presence_invariant():
    for m, present in ((2.0, True), (1.0, False), (0.5, False), (-3.0, False),
                       (-7.0, False), (-8.0, True)):
        f = parse_curvature_function(f"pow(H,{m:g})", 2)
        verdict = admissibility(2, f, "neither", 1.0)
        assert (verdict.threshold_2iii is not None) == present
        assert verdict.r_max_observed >= 1.0


def test_admissibility_rejections():
    with pytest.raises(ValueError, match="m must be nonzero"):
        admissibility(2, AnisotropyRatio(), "neither", 1.5)
    with pytest.raises(ValueError, match="r_max"):
        admissibility(2, MeanCurvature(2), "convex", 0.5)
    with pytest.raises(ValueError, match="classification"):
        admissibility(2, MeanCurvature(2), "wobbly", 1.5)


def test_pinching_quadratics_anchors():
    # m = -7: the first quadratic is the perfect square 2 (r - 2)^2
    for r in (1.0, 1.5, 2.0, 3.7):
        q1, _ = pinching_quadratics(-7.0, r)
        assert q1 == pytest.approx(2.0 * (r - 2.0) ** 2, rel=1e-13, abs=1e-13)
    # m = 2: the printed bound r = 2 is a root of the second quadratic
    assert pinching_quadratics(2.0, 2.0)[1] == pytest.approx(0.0, abs=1e-14)
    # m = 1: both quadratics degenerate to (2 r^2, -2)
    for r in (1.0, 4.0):
        q1, q2 = pinching_quadratics(1.0, r)
        assert q1 == 2.0 * r * r and q2 == -2.0
    with pytest.raises(ValueError):
        pinching_quadratics(2.0, 0.3)


def test_threshold_quadratic_coherence():
    for m in np.linspace(1.02, 100.0, 50):
        t = threshold_high(m)
        q = pinching_quadratics(m, t)[1]
        assert abs(q) <= 1e-12 * ((m - 1.0) * (t * t + t) + 2.0)
    for m in np.linspace(-100.0, -7.02, 50):
        t = threshold_low(m)
        q = pinching_quadratics(m, t)[0]
        assert abs(q) <= 1e-12 * (2.0 * t * t + abs(m - 1.0) * (t + 1.0))


def test_threshold_anchors_and_monotonicity():
    assert threshold_high(3.0) == pytest.approx(1.6180340, abs=1e-7)
    assert threshold_high(9.0) == pytest.approx(0.5 * (1.0 + math.sqrt(2.0)), rel=1e-14)
    values = [threshold_high(m) for m in np.linspace(1.1, 200.0, 100)]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
    assert values[-1] > 1.0


def test_threshold_branch_boundary():
    # unconditional at m = -7; threshold approaches 2 from below as m -> -7-
    assert sweep_row(-7.0)["branch"] == "unconditional"
    row = sweep_row(-7.0 - 1e-9)
    assert row["branch"] == "threshold"
    assert abs(row["threshold"] - 2.0) < 1e-3
    assert abs(sweep_row(-7.0 - 1e-12)["threshold"] - 2.0) < 1e-5
    with pytest.raises(ValueError):
        threshold_low(-7.0)
    with pytest.raises(ValueError):
        threshold_high(1.0)


def test_sweep_row_branches():
    assert sweep_row(3.0)["threshold"] == pytest.approx(1.6180340, abs=1e-7)
    assert sweep_row(1.0)["branch"] == "unconditional"
    assert sweep_row(-3.0)["branch"] == "unconditional"
    assert sweep_row(0.5)["branch"] == "uncovered"
    assert sweep_row(0.5, classification="convex")["branch"] == "uncovered"
    assert sweep_row(2.0, classification="convex")["branch"] == "unconditional"
    assert sweep_row(2.0, n=3)["branch"] == "uncovered"
    assert sweep_row(-9.0, n=3, classification="concave")["branch"] == "unconditional"
    with pytest.raises(ValueError):
        sweep_row(0.0)
