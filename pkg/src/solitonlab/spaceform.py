"""Ambient space-form scalar kit.

`shc`/`chc` generalize sin/cos and sinh/cosh across all sectional curvatures
c, with a series branch near c = 0 so both functions are smooth in c.  The
generalized support value of a hypersurface point is

    Z = shc(c, rho) * <d_rho, nu>,

with rho the distance to a fixed base point.  For c = 0 this reduces exactly
to the Euclidean support function <X, nu>; for c < 0 it is evaluated in the
hyperboloid (Minkowski) model.  Flow-facing callers require c <= 0; positive c
is accepted only by `shc`/`chc` themselves (periodic; callers mind the period).

Minkowski convention: vectors carry the time coordinate first, and
<<u, v>> = -u0*v0 + u1*v1 + ... .  The hyperboloid of curvature c < 0 is
<<x, x>> = 1/c with x0 > 0, and the base point sits at (1/sqrt(-c), 0, ..., 0).
"""

import math
from dataclasses import dataclass

import numpy as np

# below this value of |c| * t^2 the closed forms are replaced by series
_SERIES_CUTOFF = 1e-8


def shc(c, t):
    """Generalized sine: sin(sqrt(c) t)/sqrt(c), t, or sinh(sqrt(-c) t)/sqrt(-c)."""
    c = float(c)
    t = float(t)
    u = c * t * t
    if abs(u) < _SERIES_CUTOFF:
        # odd series sum_k (-c)^k t^(2k+1) / (2k+1)!, five terms
        acc = 0.0
        term = t
        for k in range(5):
            acc += term
            term *= -u / ((2 * k + 2) * (2 * k + 3))
        return acc
    r = math.sqrt(abs(c))
    if c > 0:
        return math.sin(r * t) / r
    return math.sinh(r * t) / r


def chc(c, t):
    """Generalized cosine: cos(sqrt(c) t), 1, or cosh(sqrt(-c) t)."""
    c = float(c)
    t = float(t)
    u = c * t * t
    if abs(u) < _SERIES_CUTOFF:
        acc = 0.0
        term = 1.0
        for k in range(5):
            acc += term
            term *= -u / ((2 * k + 1) * (2 * k + 2))
        return acc
    r = math.sqrt(abs(c))
    if c > 0:
        return math.cos(r * t)
    return math.cosh(r * t)


def cotc(c, t):
    """chc/shc, the geodesic-sphere principal curvature at radius t."""
    return chc(c, t) / shc(c, t)


def rho_hessian(c, rho, slot):
    """Coefficient of the ambient Hessian of the distance function.

    Returns 0.0 for the radial slot and chc(rho)/shc(rho) for directions
    orthogonal to d_rho.
    """
    if rho <= 0.0:
        raise ValueError(f"rho_hessian requires rho > 0, got {rho}")
    if slot == "radial":
        return 0.0
    if slot == "orthogonal":
        return cotc(c, rho)
    raise ValueError(f"unknown slot {slot!r}; expected 'radial' or 'orthogonal'")


def require_nonpositive_curvature(c, allow_positive=False):
    if c > 0 and not allow_positive:
        raise ValueError(f"ambient curvature must be <= 0 (got c={c}); "
                         "positive c is only unlocked where explicitly documented")


@dataclass(frozen=True)
class SupportData:
    """Decomposition of the radial direction at a hypersurface point."""

    rho: float              # distance to the base point
    nu_component: float     # <d_rho, nu>
    tangential: np.ndarray  # d_rho^T, the part of d_rho tangent to the surface
    support: float          # Z = shc(c, rho) * <d_rho, nu>


def minkowski_inner(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(u[1:] @ v[1:] - u[0] * v[0])


def support_value(c, position, normal):
    """Support data of a point with unit inward normal, base at the model origin.

    c = 0: `position` is the Euclidean position vector, and Z = <X, nu>.
    c < 0: `position` lies on the hyperboloid <<x, x>> = 1/c (time coordinate
    first) and `normal` is unit and tangent there.
    """
    require_nonpositive_curvature(c)
    x = np.asarray(position, dtype=float)
    nu = np.asarray(normal, dtype=float)
    if x.shape != nu.shape:
        raise ValueError("position and normal must have matching shapes")
    if c == 0.0:
        norm = np.linalg.norm(nu)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"normal must be unit length, |nu| = {norm}")
        rho = float(np.linalg.norm(x))
        if rho == 0.0:
            raise ValueError("point coincides with the base point; d_rho undefined")
        d_rho = x / rho
        nu_comp = float(d_rho @ nu)
        tangential = d_rho - nu_comp * nu
        return SupportData(rho, nu_comp, tangential, shc(c, rho) * nu_comp)

    kappa = math.sqrt(-c)
    if abs(minkowski_inner(x, x) - 1.0 / c) > 1e-8 * max(1.0, abs(1.0 / c)):
        raise ValueError("position does not lie on the model hyperboloid <<x,x>> = 1/c")
    if abs(minkowski_inner(nu, nu) - 1.0) > 1e-10:
        raise ValueError("normal must be unit for the Minkowski pairing")
    if abs(minkowski_inner(x, nu)) > 1e-8:
        raise ValueError("normal must be tangent to the hyperboloid")
    base_hat = np.zeros_like(x)
    base_hat[0] = 1.0                       # kappa * base point
    x_hat = kappa * x
    cosh_kr = -minkowski_inner(x_hat, base_hat)
    if cosh_kr < 1.0 + 1e-14:
        raise ValueError("point coincides with the base point; d_rho undefined")
    rho = math.acosh(cosh_kr) / kappa
    d_rho = (cosh_kr * x_hat - base_hat) / math.sinh(kappa * rho)
    nu_comp = minkowski_inner(d_rho, nu)
    tangential = d_rho - nu_comp * nu
    return SupportData(rho, float(nu_comp), tangential, shc(c, rho) * nu_comp)


@dataclass(frozen=True)
class GeodesicSphereSamples:
    """Point samples of a centered geodesic sphere, ready for soliton checks."""

    c: float
    radius: float
    dim: int                # hypersurface dimension n
    positions: np.ndarray
    normals: np.ndarray     # inward unit normals
    lam: np.ndarray         # (M, n) principal curvatures, all chc/shc
    support: np.ndarray     # (M,) support values from `support_value`
    weights: np.ndarray     # (M,) uniform positive weights


def _unit_directions(dim, count, seed):
    """Deterministic spread of unit vectors in R^(dim+1)."""
    if dim == 1:
        th = 2.0 * np.pi * np.arange(count) / count
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    if dim == 2:
        # Fibonacci spiral on S^2
        i = np.arange(count) + 0.5
        phi = np.pi * (1.0 + math.sqrt(5.0)) * i
        z = 1.0 - 2.0 * i / count
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((count, dim + 1))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sample_geodesic_sphere(c, radius, dim, count=256, seed=0):
    """Sample a geodesic sphere of given radius about the base point.

    Principal curvatures are the exact chc(R)/shc(R); support values are
    computed per point through `support_value`, exercising the model geometry.
    """
    require_nonpositive_curvature(c)
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    dirs = _unit_directions(dim, count, seed)
    if c == 0.0:
        positions = radius * dirs
        normals = -dirs
    else:
        kappa = math.sqrt(-c)
        kr = kappa * radius
        positions = np.empty((count, dim + 2))
        positions[:, 0] = math.cosh(kr) / kappa
        positions[:, 1:] = (math.sinh(kr) / kappa) * dirs
        normals = np.empty_like(positions)
        normals[:, 0] = -math.sinh(kr)
        normals[:, 1:] = -math.cosh(kr) * dirs
    support = np.array([support_value(c, p, nu).support
                        for p, nu in zip(positions, normals)])
    lam = np.full((count, dim), cotc(c, radius))
    weights = np.ones(count)
    return GeodesicSphereSamples(c, radius, dim, positions, normals, lam, support, weights)
