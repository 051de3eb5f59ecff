"""Fourth-order finite-difference stencils on uniform grids.

Two grid topologies are supported: periodic (closed curves) and reflected
(meridian grids of rotation surfaces, where every smooth field extends through
the two poles with a definite parity: even for scalars like metric
coefficients, odd for the radial profile coordinate).
"""

import numpy as np

# classic 5-point central stencils, O(h^4)
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0

# one-sided 5-point first derivative at the first node, O(h^4); used only for
# raw boundary checks where a symmetric stencil would be vacuous
_D1_ONESIDED = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0


def _apply(ext, coeffs, scale):
    m = len(ext) - 4
    out = np.zeros(m)
    for k, c in enumerate(coeffs):
        if c != 0.0:
            out += c * ext[k:k + m]
    return out / scale


def periodic_d1(f, h):
    """First derivative of a periodic sample array."""
    ext = np.concatenate([f[-2:], f, f[:2]])
    return _apply(ext, _D1, h)


def periodic_d2(f, h):
    """Second derivative of a periodic sample array."""
    ext = np.concatenate([f[-2:], f, f[:2]])
    return _apply(ext, _D2, h * h)


def _reflect(f, parity):
    # ghost nodes mirror interior ones about both end nodes
    left = parity * f[2:0:-1]
    right = parity * f[-2:-4:-1]
    return np.concatenate([left, f, right])


def reflected_d1(f, h, parity=1):
    """First derivative on a grid whose ends are reflection points.

    parity +1: field extends evenly through both ends (derivative is then
    exactly zero at the end nodes); parity -1: odd extension, which requires
    the end values themselves to vanish.
    """
    return _apply(_reflect(f, parity), _D1, h)


def reflected_d2(f, h, parity=1):
    """Second derivative with reflection ghost nodes, as `reflected_d1`."""
    return _apply(_reflect(f, parity), _D2, h * h)


def onesided_d1_start(f, h):
    """Raw one-sided derivative at the first node (no reflection assumption)."""
    return float(np.dot(_D1_ONESIDED, f[:5]) / h)


def onesided_d1_end(f, h):
    """Raw one-sided derivative at the last node, oriented with the grid."""
    return float(-np.dot(_D1_ONESIDED, f[-1:-6:-1]) / h)
