"""Scalar coefficient functions with removable singularities at the origin.

Every connection/curvature coefficient reduces to one of the ratios below,
each smooth at r = 0.  Direct evaluation suffers catastrophic cancellation
for small r (the deficit ratios lose ~9 digits already at r = 1e-4 in double
precision), so each function switches to its even Taylor polynomial through
r^8 inside SERIES_WINDOW; at the crossover both branches agree to < 1e-12.
"""

from __future__ import annotations

import numpy as np

SERIES_WINDOW = 0.02


def _piecewise(r, series_coeffs, direct):
    """Evaluate an even series sum(c_k * r^(2k)) inside the window, else `direct`."""
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    small = r < SERIES_WINDOW
    safe = np.where(small, 1.0, r)
    out = direct(safe)
    u = r[small] ** 2
    acc = np.full_like(u, series_coeffs[-1])
    for c in reversed(series_coeffs[:-1]):
        acc = acc * u + c
    out[small] = acc
    return float(out[0]) if scalar else out


def sin_ratio(r):
    """sin(2r) / (2r)."""
    return _piecewise(
        r,
        (1.0, -2.0 / 3.0, 2.0 / 15.0, -4.0 / 315.0, 2.0 / 2835.0),
        lambda s: np.sin(2 * s) / (2 * s),
    )


def sinh_ratio(r):
    """sinh(2r) / (2r)."""
    return _piecewise(
        r,
        (1.0, 2.0 / 3.0, 2.0 / 15.0, 4.0 / 315.0, 2.0 / 2835.0),
        lambda s: np.sinh(2 * s) / (2 * s),
    )


def cos_deficit(r):
    """(1 - cos(2r)) / (2 r^2), evaluated stably as (sin(r)/r)^2 outside the window."""
    return _piecewise(
        r,
        (1.0, -1.0 / 3.0, 2.0 / 45.0, -1.0 / 315.0, 2.0 / 14175.0),
        lambda s: (np.sin(s) / s) ** 2,
    )


def cosh_excess(r):
    """(cosh(2r) - 1) / (2 r^2) = (sinh(r)/r)^2."""
    return _piecewise(
        r,
        (1.0, 1.0 / 3.0, 2.0 / 45.0, 1.0 / 315.0, 2.0 / 14175.0),
        lambda s: (np.sinh(s) / s) ** 2,
    )


def sin_ratio_deficit(r):
    """(sin(2r)/(2r) - 1) / (2 r^2)."""
    return _piecewise(
        r,
        (-1.0 / 3.0, 1.0 / 15.0, -2.0 / 315.0, 1.0 / 2835.0, -2.0 / 155925.0),
        lambda s: (np.sin(2 * s) / (2 * s) - 1.0) / (2 * s * s),
    )


def sinh_ratio_excess(r):
    """(sinh(2r)/(2r) - 1) / (2 r^2)."""
    return _piecewise(
        r,
        (1.0 / 3.0, 1.0 / 15.0, 2.0 / 315.0, 1.0 / 2835.0, 2.0 / 155925.0),
        lambda s: (np.sinh(2 * s) / (2 * s) - 1.0) / (2 * s * s),
    )


def tan_ratio(r):
    """tan(r) / r; caller must keep r < pi/2."""
    return _piecewise(
        r,
        (1.0, 1.0 / 3.0, 2.0 / 15.0, 17.0 / 315.0, 62.0 / 2835.0),
        lambda s: np.tan(s) / s,
    )


def tanh_ratio(r):
    """tanh(r) / r."""
    return _piecewise(
        r,
        (1.0, -1.0 / 3.0, 2.0 / 15.0, -17.0 / 315.0, 62.0 / 2835.0),
        lambda s: np.tanh(s) / s,
    )
