import math

import numpy as np
import pytest

from solitonlab import curvfun, flow, hypersurface, soliton
from solitonlab.flow import FlowConfig, StopRule, TRACE_HEADER, monitors, run, step
from solitonlab.hypersurface import circle, ellipse, sphere_profile, spheroid_profile

H1 = curvfun.MeanCurvature(1)
H2 = curvfun.MeanCurvature(2)


def test_config_validation():
    stop = StopRule(t_max=1.0)
    with pytest.raises(ValueError, match="dt_safety"):
        FlowConfig(f=H1, stop=stop, dt_safety=0.0)
    with pytest.raises(ValueError, match="rescale_mode"):
        FlowConfig(f=H1, stop=stop, rescale_mode="both")
    with pytest.raises(ValueError, match="flat ambient"):
        FlowConfig(f=H1, stop=stop, c=-1.0)
    with pytest.raises(ValueError, match="at least one"):
        StopRule()


def test_monitors_sphere():
    mon = monitors(sphere_profile(1.0, 256), H2)
    assert mon.r_max == pytest.approx(1.0, abs=1e-6)
    assert mon.aniso_max == pytest.approx(0.0, abs=1e-10)
    assert mon.ahh_max == pytest.approx(0.5, abs=1e-6)
    assert mon.umb_max == pytest.approx(0.0, abs=1e-6)
    assert mon.soliton.relative_residual < 1e-8


def test_monitors_cross_identities():
    geom = hypersurface.revolution_geometry(spheroid_profile(1.0, 1.3, 256))
    mon = monitors(geom, H2)
    lam = geom.lam
    aniso_lam = (((lam[:, 1] - lam[:, 0]) / (lam[:, 1] + lam[:, 0])) ** 2).max()
    assert mon.aniso_max == pytest.approx(float(aniso_lam), abs=1e-10)
    # point values at lam = (1, 2): aniso 1/9, r 2, |A|^2/H^2 5/9, umbilicity gap 1
    assert ((1.0 - 2.0) / 3.0) ** 2 == pytest.approx(1.0 / 9.0)
    assert (1.0 + 4.0) / 9.0 == pytest.approx(5.0 / 9.0)
    assert 2.0 * 5.0 - 9.0 == 1.0


def test_monitors_curve_definitions():
    geom = hypersurface.curve_geometry(ellipse(2.0, 1.0, 256))
    mon = monitors(geom, H1)
    k = geom.lam[:, 0]
    assert mon.r_max == pytest.approx(float(k.max() / k.min()), rel=1e-12)
    assert mon.ahh_max == 1.0
    assert mon.umb_max == 0.0
    expected = ((k.max() - k.min()) / (k.max() + k.min())) ** 2
    assert mon.aniso_max == pytest.approx(float(expected), rel=1e-12)


def test_step_circle_radius():
    dt = 1e-4
    stepped = step(circle(1.0, 256), H1, dt)
    radius = np.linalg.norm(stepped.points, axis=1)
    assert np.abs(radius - (1.0 - dt)).max() < 5.0 * dt * dt


def test_step_sphere_radius():
    dt = 1e-4
    stepped = step(sphere_profile(1.0, 256), H2, dt)
    prof = stepped.profile
    radius = np.hypot(prof[1:-1, 0], prof[1:-1, 1])
    assert np.abs(radius - (1.0 - 2.0 * dt)).max() < 5.0 * dt * dt


def test_step_expanding_family():
    f = curvfun.parse_curvature_function("pow(H,-1)", 1)
    stepped = step(circle(1.0, 256), f, 1e-4)
    radius = np.linalg.norm(stepped.points, axis=1)
    assert np.all(radius > 1.0)       # F < 0 moves outward along the inward normal


def test_step_rejects_bad_dt():
    with pytest.raises(ValueError):
        step(circle(1.0, 64), H1, 0.0)


def test_circle_exact_ode_short():
    config = FlowConfig(f=H1, stop=StopRule(t_max=0.1), grid_size=256)
    trace = run(config, circle(1.0, 256))
    assert trace.stop_reason == "t_max"
    for row in trace.rows:
        assert row.measure / (2.0 * math.pi) == pytest.approx(
            math.sqrt(1.0 - 2.0 * row.t), rel=1e-3)


def test_stationary_circle_under_rescale():
    config = FlowConfig(f=H1, stop=StopRule(t_max=0.01), rescale_mode="fixed-scale",
                        grid_size=256)
    trace = run(config, circle(1.0, 256))
    assert len(trace.rows) > 2
    for row in trace.rows:
        assert row.r_max - 1.0 < 1e-10
        assert row.aniso_max < 1e-20
        assert abs(row.measure - trace.rows[0].measure) < 1e-10
    assert all(r.scale > 1.0 for r in trace.rows[1:])    # contracting, re-inflated


def test_ellipse_rounding_short():
    config = FlowConfig(f=H1, stop=StopRule(t_max=0.5), rescale_mode="fixed-scale",
                        grid_size=128)
    trace = run(config, ellipse(2.0, 1.0, 128))
    rows = trace.rows
    assert rows[-1].r_max < rows[0].r_max
    for a, b in zip(rows, rows[1:]):
        assert b.r_max <= a.r_max + 1e-9
        assert b.aniso_max <= a.aniso_max + 1e-9
        assert abs(b.measure - rows[0].measure) < 1e-10


def test_soliton_sphere_is_preserved():
    radius = soliton.solve_sphere_radius(H2, 1.0, 0.0)
    config = FlowConfig(f=H2, stop=StopRule(t_max=0.02), rescale_mode="fixed-scale",
                        grid_size=256)
    trace = run(config, sphere_profile(radius, 256))
    assert len(trace.rows) > 10
    for row in trace.rows:
        assert row.r_max - 1.0 < 1e-6
    assert abs(trace.rows[0].tau_fit - 1.0) < 1e-7


def test_stop_reasons():
    config = FlowConfig(f=H1, stop=StopRule(min_scale_fraction=0.9), grid_size=64)
    trace = run(config, circle(1.0, 64))
    assert trace.stop_reason == "min_scale_fraction"
    assert not trace.aborted
    config = FlowConfig(f=H1, stop=StopRule(curvature_cap=1.5), grid_size=64)
    trace = run(config, circle(1.0, 64))
    assert trace.stop_reason == "curvature_cap"
    config = FlowConfig(f=H1, stop=StopRule(r_tol=0.5), grid_size=64)
    trace = run(config, circle(1.0, 64))
    assert trace.stop_reason == "r_tol"
    assert len(trace.rows) == 1       # already round: stops before stepping


def test_trace_csv_contract():
    config = FlowConfig(f=H1, stop=StopRule(t_max=0.002), grid_size=64)
    trace = run(config, circle(1.0, 64))
    text = trace.to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == TRACE_HEADER
    assert lines[0] == "t,dt,scale,r_max,F_aniso_max,aHH_max,umb_max,tau_fit,rel_residual,measure"
    assert len(lines) == len(trace.rows) + 1
    assert len(lines[1].split(",")) == 10
    ts = [float(line.split(",")[0]) for line in lines[1:]]
    assert all(b > a for a, b in zip(ts, ts[1:]))
    assert trace.final_surface is not None


def test_run_validates_initial_surface():
    th = 2.0 * np.pi * np.arange(64) / 64
    r = 1.0 + 0.5 * np.cos(3.0 * th)
    bumpy = hypersurface.PlaneCurve(np.column_stack([r * np.cos(th), r * np.sin(th)]))
    config = FlowConfig(f=H1, stop=StopRule(t_max=1.0), grid_size=64)
    with pytest.raises(hypersurface.GeometryError):
        run(config, bumpy)


def test_revolution_flow_keeps_poles_on_axis():
    config = FlowConfig(f=H2, stop=StopRule(t_max=0.005), grid_size=96)
    trace = run(config, spheroid_profile(1.0, 1.3, 96))
    prof = trace.final_surface.profile
    assert prof[0, 1] == 0.0 and prof[-1, 1] == 0.0
    assert np.all(prof[1:-1, 1] > 0.0)
