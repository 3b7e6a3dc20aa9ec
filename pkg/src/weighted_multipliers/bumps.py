"""Smooth compactly supported building blocks.

``smooth_step`` is the classical C-infinity transition
``g(t) / (g(t) + g(1 - t))`` with ``g(t) = exp(-1/t)``; its derivative is a
compactly supported bump of unit mass, which lets several partitions of unity
be written in closed form.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "smooth_step",
    "smooth_plateau",
    "averaging_bump",
    "averaging_bump_cdf",
    "AVERAGING_BUMP_MIN_ON_UNIT",
]


def _g(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t):
    """0 for ``t <= 0``, 1 for ``t >= 1``, smooth and monotone between."""
    t = np.asarray(t, dtype=float)
    a = _g(t)
    b = _g(1.0 - t)
    return a / (a + b)


def smooth_plateau(x, inner: float, outer: float):
    """Even function equal to 1 on ``|x| <= inner`` and 0 on ``|x| >= outer``."""
    return smooth_step((outer - np.abs(x)) / (outer - inner))


# averaging bump P(x) proportional to exp(-1/(1 - (x/2)^2)) on (-2, 2)
_P_SUPPORT = 2.0


def _raw_bump(x):
    x = np.asarray(x, dtype=float)
    u = x / _P_SUPPORT
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


# cumulative table for the CDF, with cubic Hermite interpolation using the
# exact density as the derivative
_TABLE_X = np.linspace(-_P_SUPPORT, _P_SUPPORT, 8001)


def _build_cdf_table():
    # 8-point Gauss-Legendre on each table cell is exact to rounding here
    nodes, wts = np.polynomial.legendre.leggauss(8)
    a, b = _TABLE_X[:-1], _TABLE_X[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    pts = mid[:, None] + half[:, None] * nodes[None, :]
    cell = half * (_raw_bump(pts) @ wts)
    vals = np.concatenate([[0.0], np.cumsum(cell)])
    return vals / vals[-1], vals[-1]


_TABLE_F, _P_MASS = _build_cdf_table()


def averaging_bump(x):
    """Nonnegative bump ``P`` supported in ``[-2, 2]``, positive on ``[-1, 1]``, ``int P = 1``."""
    return _raw_bump(x) / _P_MASS


def averaging_bump_cdf(x):
    """``int_{-inf}^x P``, exactly 0 below -2 and exactly 1 above 2."""
    x = np.asarray(x, dtype=float)
    out = np.where(x >= _P_SUPPORT, 1.0, 0.0)
    inside = (x > -_P_SUPPORT) & (x < _P_SUPPORT)
    if np.any(inside):
        xi = x[inside]
        h = _TABLE_X[1] - _TABLE_X[0]
        j = np.clip(((xi + _P_SUPPORT) / h).astype(int), 0, len(_TABLE_X) - 2)
        t = (xi - _TABLE_X[j]) / h
        f0, f1 = _TABLE_F[j], _TABLE_F[j + 1]
        d0 = averaging_bump(_TABLE_X[j]) * h
        d1 = averaging_bump(_TABLE_X[j + 1]) * h
        h00 = 2 * t ** 3 - 3 * t ** 2 + 1
        h10 = t ** 3 - 2 * t ** 2 + t
        h01 = -2 * t ** 3 + 3 * t ** 2
        h11 = t ** 3 - t ** 2
        out[inside] = h00 * f0 + h10 * d0 + h01 * f1 + h11 * d1
    return out


AVERAGING_BUMP_MIN_ON_UNIT = float(averaging_bump(np.array(1.0)))
