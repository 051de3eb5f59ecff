"""Explicit integrator for the normal-speed curvature flow dX/dt = F * nu.

The speed F is a symmetric curvature function of the principal curvatures and
nu is the inward unit normal, so degree >= 1 families with positive F contract
convex surfaces while the normalized negative-degree families (F < 0) expand
them.  Time stepping is explicit Euler under the parabolic restriction

    dt = dt_safety * h_min^2 / max_M sum_i df/dlam_i,

with tangential redistribution to uniform arclength after every step, optional
fixed-measure rescaling about the centroid, and per-step monitors for the
pinching ratio, the umbilicity defects, and the soliton residual fit.  Flat
ambient space only.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import soliton
from .curvfun import DomainError
from .hypersurface import (GeometryError, PlaneCurve, RevolutionProfile, ShapeData,
                           curve_geometry, revolution_geometry)

TRACE_HEADER = "t,dt,scale,r_max,F_aniso_max,aHH_max,umb_max,tau_fit,rel_residual,measure"


@dataclass(frozen=True)
class StopRule:
    """Flow termination criteria; at least one must be set."""

    t_max: float | None = None
    r_tol: float | None = None                 # stop once r_max - 1 < r_tol
    curvature_cap: float | None = None
    min_scale_fraction: float | None = None    # on the unscaled (physical) measure

    def __post_init__(self):
        if all(v is None for v in (self.t_max, self.r_tol, self.curvature_cap,
                                   self.min_scale_fraction)):
            raise ValueError("StopRule needs at least one criterion set")


@dataclass(frozen=True)
class FlowConfig:
    f: object
    stop: StopRule
    dt_safety: float = 0.4
    rescale_mode: str = "none"        # none | fixed-scale
    grid_size: int = 256
    c: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.dt_safety <= 1.0:
            raise ValueError(f"dt_safety must lie in (0, 1], got {self.dt_safety}")
        if self.rescale_mode not in ("none", "fixed-scale"):
            raise ValueError(f"unknown rescale_mode {self.rescale_mode!r}")
        if self.c != 0.0:
            raise ValueError("flows are integrated in flat ambient space only (c = 0)")


@dataclass(frozen=True)
class FlowMonitors:
    r_max: float
    aniso_max: float          # max of (2|A|^2 - H^2) / H^2
    ahh_max: float            # max of |A|^2 / H^2
    umb_max: float            # max of n |A|^2 - H^2
    soliton: soliton.SolitonReport


@dataclass(frozen=True)
class TraceRow:
    t: float
    dt: float
    scale: float
    r_max: float
    aniso_max: float
    ahh_max: float
    umb_max: float
    tau_fit: float
    rel_residual: float
    measure: float

    def csv(self):
        vals = (self.t, self.dt, self.scale, self.r_max, self.aniso_max,
                self.ahh_max, self.umb_max, self.tau_fit, self.rel_residual,
                self.measure)
        return ",".join(f"{v:.17g}" for v in vals)


@dataclass
class FlowTrace:
    rows: list = field(default_factory=list)
    stop_reason: str = ""
    aborted: bool = False
    final_surface: object = None

    def to_csv(self):
        lines = [TRACE_HEADER] + [row.csv() for row in self.rows]
        return "\n".join(lines) + "\n"

    @property
    def final(self):
        return self.rows[-1]


def monitors(surface, f, base_point=None):
    """Pinching, umbilicity, and soliton monitors of a surface snapshot."""
    geom = surface if isinstance(surface, ShapeData) else _extract(surface, base_point)
    lam = geom.lam
    if geom.dim == 1:
        k = lam[:, 0]
        k_min, k_max = float(k.min()), float(k.max())
        r_max = k_max / k_min
        aniso = ((k_max - k_min) / (k_max + k_min)) ** 2
        ahh = 1.0
        umb = 0.0
    else:
        r_max = float((lam[:, -1] / lam[:, 0]).max())
        h2 = geom.mean ** 2
        aniso = float(((2.0 * geom.norm_A2 - h2) / h2).max())
        ahh = float((geom.norm_A2 / h2).max())
        umb = float((geom.dim * geom.norm_A2 - h2).max())
    return FlowMonitors(r_max=r_max, aniso_max=aniso, ahh_max=ahh, umb_max=umb,
                        soliton=soliton.fit_tau(geom, f))


def _extract(surface, base_point=None):
    if isinstance(surface, PlaneCurve):
        return curve_geometry(surface, base_point)
    if isinstance(surface, RevolutionProfile):
        return revolution_geometry(surface, base_point)
    raise GeometryError(f"flows run on PlaneCurve or RevolutionProfile snapshots, "
                        f"got {type(surface).__name__}")


def _advance(surface, geom, f, dt):
    speed = f.value(geom.lam)
    if isinstance(surface, PlaneCurve):
        pts = surface.points + dt * speed[:, None] * geom.normal
        return PlaneCurve(pts)
    prof = surface.profile + dt * speed[:, None] * geom.normal[:, :2]
    prof[0, 1] = prof[-1, 1] = 0.0     # poles move along the axis exactly
    return RevolutionProfile(prof)


def _redistribute(surface):
    """Resample to uniform arclength with periodic cubic interpolation.

    Profiles are doubled through the poles (meridian continuation: axis
    coordinate even, radius odd) so the resampled data keeps the reflection
    symmetry that the pole stencils rely on.
    """
    if isinstance(surface, PlaneCurve):
        pts = surface.points
        m = pts.shape[0]
        closed = np.vstack([pts, pts[:1]])
        seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
        s = np.concatenate([[0.0], np.cumsum(seg)])
        spline = CubicSpline(s, closed, bc_type="periodic", axis=0)
        return PlaneCurve(spline(s[-1] * np.arange(m) / m))

    prof = surface.profile
    m = prof.shape[0]
    seg = np.linalg.norm(np.diff(prof, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    length = s[-1]
    mirrored = np.column_stack([prof[-2:0:-1, 0], -prof[-2:0:-1, 1]])
    doubled = np.vstack([prof, mirrored, prof[:1]])
    s_ext = np.concatenate([s, 2.0 * length - s[-2::-1]])
    spline = CubicSpline(s_ext, doubled, bc_type="periodic", axis=0)
    new = spline(np.linspace(0.0, length, m))
    new[0] = prof[0]
    new[-1] = prof[-1]
    new[:, 1] = np.abs(new[:, 1])      # guard rounding at the near-pole samples
    new[0, 1] = new[-1, 1] = 0.0
    return RevolutionProfile(new)


def step(surface, f, dt):
    """One explicit Euler step (move along normals, then redistribute).

    Raises `GeometryError` when the stepped surface loses convexity or
    validity; callers retry with a smaller dt.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    geom = _extract(surface)
    candidate = _redistribute(_advance(surface, geom, f, dt))
    _extract(candidate)                # validates convexity / simplicity
    return candidate


def _centroid(surface, geom):
    w = geom.weights
    if isinstance(surface, PlaneCurve):
        return (w @ surface.points) / w.sum()
    cx = float(w @ surface.profile[:, 0]) / float(w.sum())
    return np.array([cx, 0.0])


def _rescale(surface, geom, target_measure):
    d = geom.dim
    alpha = (target_measure / geom.measure) ** (1.0 / d)
    center = _centroid(surface, geom)
    if isinstance(surface, PlaneCurve):
        scaled = PlaneCurve(center + alpha * (surface.points - center))
    else:
        prof = center + alpha * (surface.profile - center)
        prof[0, 1] = prof[-1, 1] = 0.0
        scaled = RevolutionProfile(prof)
    return scaled, alpha


def _min_spacing(surface):
    pts = surface.points if isinstance(surface, PlaneCurve) else surface.profile
    closed = np.vstack([pts, pts[:1]]) if isinstance(surface, PlaneCurve) else pts
    return float(np.linalg.norm(np.diff(closed, axis=0), axis=1).min())


def _stop_reason(stop, t, mon, geom, physical_fraction):
    if stop.r_tol is not None and mon.r_max - 1.0 < stop.r_tol:
        return "r_tol"
    if stop.t_max is not None and t >= stop.t_max:
        return "t_max"
    if stop.curvature_cap is not None and float(geom.lam.max()) > stop.curvature_cap:
        return "curvature_cap"
    if stop.min_scale_fraction is not None and physical_fraction < stop.min_scale_fraction:
        return "min_scale_fraction"
    return None


def run(config, surface):
    """Integrate the flow until a stop criterion fires; returns the trace.

    In fixed-scale mode every accepted step is rescaled about the centroid so
    the total measure (length or area) stays at its initial value; the applied
    factor is recorded and the accumulated product defines the physical scale
    fraction used by the `min_scale_fraction` stop.
    """
    f = config.f
    geom = _extract(surface)
    f.value(geom.lam)                  # domain check up front
    measure0 = geom.measure
    trace = FlowTrace()
    t = 0.0
    cumulative = 1.0
    mon = monitors(geom, f)
    trace.rows.append(_row(t, 0.0, 1.0, mon, geom.measure))

    while True:
        physical = geom.measure / cumulative ** geom.dim / measure0
        reason = _stop_reason(config.stop, t, mon, geom, physical)
        if reason is not None:
            trace.stop_reason = reason
            trace.final_surface = surface
            return trace

        h_min = _min_spacing(surface)
        stiffness = float(f.gradient(geom.lam).sum(axis=1).max())
        dt = config.dt_safety * h_min * h_min / stiffness

        accepted = None
        for _ in range(21):
            if dt < 1e-14:
                trace.stop_reason = "aborted: dt underflow"
                trace.aborted = True
                trace.final_surface = surface
                return trace
            try:
                candidate = _redistribute(_advance(surface, geom, f, dt))
                candidate_geom = _extract(candidate)
                f.value(candidate_geom.lam)
                accepted = (candidate, candidate_geom)
                break
            except (GeometryError, DomainError):
                dt *= 0.5
        if accepted is None:
            trace.stop_reason = "aborted: convexity or validity lost after 20 dt halvings"
            trace.aborted = True
            trace.final_surface = surface
            return trace

        surface, geom = accepted
        t += dt
        alpha = 1.0
        if config.rescale_mode == "fixed-scale":
            surface, alpha = _rescale(surface, geom, measure0)
            geom = _extract(surface)
            cumulative *= alpha
        mon = monitors(geom, f)
        trace.rows.append(_row(t, dt, alpha, mon, geom.measure))


def _row(t, dt, scale, mon, measure):
    return TraceRow(t=t, dt=dt, scale=scale, r_max=mon.r_max,
                    aniso_max=mon.aniso_max, ahh_max=mon.ahh_max,
                    umb_max=mon.umb_max, tau_fit=mon.soliton.tau_fit,
                    rel_residual=mon.soliton.relative_residual, measure=measure)
