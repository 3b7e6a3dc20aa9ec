"""Grid-free evaluation of region maximal operators on simple inputs.

On the real line the supremum over window centres can be resolved exactly for
indicators, step functions and odd step atoms, leaving only a geometric net of
radii and of evaluation points.  This reaches six decades of input scale,
which the periodic grid cannot.

Nets are powers of ``2^(1/k)`` so that the scales ``nu`` (powers of two) and
``1`` are always net points.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bumps import averaging_bump, averaging_bump_cdf

__all__ = [
    "ContinuumRegion",
    "indicator_maximal",
    "step_maximal",
    "atom_maximal",
    "lq_norm_from_net",
    "atom_envelope",
    "odd_atom",
]

P_SUPPORT = 2.0


@dataclass(frozen=True)
class ContinuumRegion:
    """Region ``{(r, y): r^alpha <= lam^-alpha, |y - x| <= lam^-alpha r^(1-alpha)}`` on the line.

    ``per_octave`` sets the density of the radius and point nets; ``x_range``
    and ``r_range`` are log2 bounds before admissibility is imposed.
    """

    alpha: float
    lam: float = 1.0
    per_octave: int = 16
    x_range: tuple = (-30, 60)
    r_range: tuple = (-40, 60)

    def reach(self, r):
        return self.lam ** (-self.alpha) * np.asarray(r, float) ** (1 - self.alpha)

    def radii(self) -> np.ndarray:
        lo, hi = self.r_range
        k = self.per_octave
        cap = np.log2(1.0 / self.lam)
        x_top = self.x_range[1]
        if self.alpha > 0:
            hi = cap
            if self.alpha > 1:
                # small radii must reach the far end of the point net
                need = (x_top + 1 + self.alpha * np.log2(self.lam)) / (self.alpha - 1)
                lo = min(lo, -need - 1)
        elif self.alpha < 0:
            lo = cap
        j = np.arange(int(np.floor(lo * k)), int(np.ceil(hi * k)) + 1)
        r = 2.0 ** (j / k)
        if self.alpha > 0:
            r = r[r <= 1.0 / self.lam * (1 + 1e-12)]
        elif self.alpha < 0:
            r = r[r >= 1.0 / self.lam * (1 - 1e-12)]
        return r

    def open_ends(self, beta: float | None = None) -> tuple[bool, bool]:
        """Whether the smallest / largest net radius is a truncation that can hide a divergence.

        For bounded, compactly supported ``f`` the quantity ``r^{2 beta} avg_r f`` is at
        most ``min(r^{2 beta} ||f||_inf, r^{2 beta - 1} ||f||_1 / 2)``, so with ``beta``
        given the small end only counts when ``beta < 0`` and the large end when
        ``beta > 1/2``.
        """
        lo, hi = self.alpha >= 0, self.alpha <= 0
        if beta is not None:
            lo, hi = lo and beta < 0, hi and beta > 0.5
        return lo, hi

    def points(self) -> np.ndarray:
        lo, hi = self.x_range
        k = self.per_octave
        return 2.0 ** (np.arange(lo * k, hi * k + 1) / k)

    def refined(self) -> "ContinuumRegion":
        return ContinuumRegion(self.alpha, self.lam, 2 * self.per_octave,
                               self.x_range, self.r_range)


def _edge_divergence(val, ends):
    """True if some row peaks at a truncated end of the radius net and still rises there."""
    lo_open, hi_open = ends
    best = val.max(axis=1)
    live = best > 0
    hit = False
    if lo_open and val.shape[1] > 1:
        hit |= bool(np.any(live & (val[:, 0] >= best) & (val[:, 0] > val[:, 1] * (1 + 1e-9))))
    if hi_open and val.shape[1] > 1:
        hit |= bool(np.any(live & (val[:, -1] >= best) & (val[:, -1] > val[:, -2] * (1 + 1e-9))))
    return hit


def indicator_maximal(region: ContinuumRegion, beta: float, nu: float,
                      x: np.ndarray | None = None, chunk: int = 256,
                      with_flag: bool = False):
    """``M_{alpha,beta}`` of ``chi_[-nu, nu]`` at ``x >= 0`` (even in ``x``).

    The best centre moves toward the origin as far as the reach allows.  With
    ``with_flag`` a third value reports whether the supremum runs off a
    truncated end of the radius net, meaning the true value is infinite.
    """
    x = region.points() if x is None else np.asarray(x, float)
    r = region.radii()
    D = region.reach(r)
    scale = r ** (2 * beta) / (2 * r)
    out = np.zeros(x.shape)
    diverges = False
    ends = region.open_ends(beta)
    for i in range(0, x.size, chunk):
        xs = x[i:i + chunk, None]
        y = np.maximum(xs - D[None, :], 0.0)
        # overlap of [y - r, y + r] with [-nu, nu], written without cancellation at tiny r
        ov = np.minimum(r, nu - y) + np.minimum(r, nu + y)
        val = np.clip(ov, 0.0, None) * scale
        out[i:i + chunk] = val.max(axis=1)
        diverges |= _edge_divergence(val, ends)
    if with_flag:
        return x, out, diverges
    return x, out


def step_maximal(region: ContinuumRegion, beta: float, edges: np.ndarray,
                 heights: np.ndarray, x: np.ndarray, chunk: int = 64,
                 with_flag: bool = False):
    """``M_{alpha,beta} f`` for ``f = sum_k heights[k] chi_[edges[k], edges[k+1])``.

    The window integral is piecewise linear in the centre, so its supremum over
    an interval of centres is attained at an end or where a window edge meets
    a breakpoint of ``f``.
    """
    edges = np.asarray(edges, float)
    heights = np.asarray(heights, float)
    G_at = np.concatenate([[0.0], np.cumsum(heights * np.diff(edges))])

    def G(t):
        return np.interp(t, edges, G_at, left=0.0, right=G_at[-1])

    r = region.radii()
    D = region.reach(r)
    scale = r ** (2 * beta) / (2 * r)
    x = np.asarray(x, float)
    out = np.zeros(x.shape)
    diverges = False
    ends = region.open_ends(beta)
    brk = np.concatenate([edges - r[:, None], edges + r[:, None]], axis=1)  # (nr, 2K)
    for i in range(0, x.size, chunk):
        xs = x[i:i + chunk, None, None]
        lo = xs - D[None, :, None]
        hi = xs + D[None, :, None]
        cand = np.concatenate([np.broadcast_to(lo, lo.shape[:2] + (1,)),
                               np.broadcast_to(hi, hi.shape[:2] + (1,)),
                               np.clip(np.broadcast_to(brk[None], (xs.shape[0],) + brk.shape),
                                       lo, hi)], axis=2)
        rr = r[None, :, None]
        val = (G(cand + rr) - G(cand - rr)).max(axis=2) * scale[None, :]
        out[i:i + chunk] = val.max(axis=1)
        diverges |= _edge_divergence(val, ends)
    if with_flag:
        return out, diverges
    return out


def lq_norm_from_net(x: np.ndarray, v: np.ndarray, q: float, symmetric: bool = True,
                     tail_octaves: int = 2) -> tuple[float, dict]:
    """``L^q`` norm of a function sampled on a geometric net of ``x > 0``.

    The integral uses the trapezoid rule in ``log x``, a constant below the
    first point, and a power-law tail fitted to the last ``tail_octaves``.
    A tail decaying no faster than ``1/x`` makes the norm infinite.
    """
    x = np.asarray(x, float)
    v = np.abs(np.asarray(v, float))
    info = {}
    if np.isinf(q):
        return float(v.max()), info
    g = v ** q
    lx = np.log(x)
    body = np.trapezoid(g * x, lx) + g[0] * x[0]
    k = np.searchsorted(lx, lx[-1] - tail_octaves * np.log(2))
    tail = 0.0
    if g[-1] > 0:
        tx, tg = lx[k:], g[k:]
        pos = tg > 0
        s = -np.polyfit(tx[pos], np.log(tg[pos]), 1)[0] if pos.sum() >= 2 else np.inf
        info["tail_exponent"] = float(s)
        if s <= 1.0 + 1e-3:
            info["unbounded_tail"] = True
            return np.inf, info
        tail = g[-1] * x[-1] / (s - 1.0)
    total = body + tail
    if symmetric:
        total *= 2
    info["tail_fraction"] = float(tail / max(body + tail, 1e-300))
    return float(total ** (1.0 / q)), info


# ---------------------------------------------------------------- atoms

def odd_atom(nu: float, center: float = 0.0):
    """``(chi_[c-nu, c) - chi_[c, c+nu)) / (2 nu)`` as a callable."""
    def a(z):
        z = np.asarray(z, float) - center
        return (((z >= -nu) & (z < 0)).astype(float) - ((z >= 0) & (z < nu))) / (2 * nu)
    return a


_GL_T, _GL_W = np.polynomial.legendre.leggauss(12)
SMALL_STEP = 0.125


def _atom_profile(s, u):
    # F(u + s) - 2 F(u) + F(u - s): times 1/(2 nu) this is P_r * a at y = r u.
    # For small s the second difference cancels catastrophically, so it is
    # integrated instead as int_0^s P(u + t) - P(u - t) dt.
    u = np.asarray(u, float)
    if s > SMALL_STEP:
        return averaging_bump_cdf(u + s) - 2 * averaging_bump_cdf(u) + averaging_bump_cdf(u - s)
    t = 0.5 * s * (_GL_T + 1.0)
    uu = u[..., None]
    g = averaging_bump(uu + t) - averaging_bump(uu - t)
    return 0.5 * s * (g @ _GL_W)


def _profile_extrema(s: float, pts: int = 2001):
    """Local maxima of ``|profile|`` on ``u >= 0`` (positions, values)."""
    segs = [np.linspace(0.0, min(2 * P_SUPPORT, P_SUPPORT + s), pts)]
    if s > 2 * P_SUPPORT:
        segs.append(np.linspace(s - P_SUPPORT, s + P_SUPPORT, pts))
        segs.append(np.linspace(P_SUPPORT, s - P_SUPPORT, pts))
    else:
        segs.append(np.linspace(0.0, s + P_SUPPORT, pts))
    u = np.unique(np.concatenate(segs))
    g = np.abs(_atom_profile(s, u))
    # strict on the left so a flat plateau contributes one point
    i = np.flatnonzero((g[1:-1] > g[:-2]) & (g[1:-1] >= g[2:])) + 1
    pos, val = u[i], g[i]
    # refine each maximum with a parabola through its neighbours
    a, b, c = g[i - 1], g[i], g[i + 1]
    den = a - 2 * b + c
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(den < 0, 0.5 * (a - c) / den, 0.0)
    t = np.clip(t, -1.0, 1.0)
    step = np.where(t > 0, u[i + 1] - u[i], u[i] - u[i - 1])
    uu = u[i] + t * step
    vv = np.abs(_atom_profile(s, uu))
    better = vv >= val
    pos = np.where(better, uu, pos)
    val = np.where(better, vv, val)
    if g[0] > 0 and g[0] >= g[1]:
        pos = np.append(pos, u[0])
        val = np.append(val, g[0])
    return pos, val


def atom_maximal(region: ContinuumRegion, nu: float, x: np.ndarray | None = None,
                 beta: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """``sup r^{2 beta} |P_r * a(y)|`` for the odd atom of half-width ``nu``.

    ``beta`` defaults to ``alpha / 2``.  Returns the point net ``x >= 0`` and
    values (the output is even in ``x``).
    """
    beta = region.alpha / 2 if beta is None else beta
    x = region.points() if x is None else np.asarray(x, float)
    r = region.radii()
    D = region.reach(r)
    out = np.zeros(x.shape)
    cache = {}
    for rk, dk in zip(r, D):
        s = nu / rk
        key = round(np.log2(s) * 4096)
        if key not in cache:
            cache[key] = _profile_extrema(s)
        epos, evals = cache[key]
        fac = rk ** (2 * beta) / (2 * nu)
        ends = np.maximum(np.abs(_atom_profile(s, (x - dk) / rk)),
                          np.abs(_atom_profile(s, (x + dk) / rk)))
        best = ends
        if epos.size:
            ep = np.concatenate([epos, -epos]) * rk
            ev = np.concatenate([evals, evals])
            inside = np.abs(ep[None, :] - x[:, None]) <= dk
            best = np.maximum(best, np.where(inside, ev[None, :], 0.0).max(axis=1))
        np.maximum(out, best * fac, out=out)
    return x, out


ZERO_ZONE = 4.0


def atom_envelope(alpha: float, width: float, x, literal: bool = True) -> np.ndarray:
    """Pointwise envelope for ``M~_{alpha, alpha/2} a`` with ``|I| = width``.

    Transcribes the three case tables; a "0 otherwise" zone starts at
    ``ZERO_ZONE`` times the stated scale.  For ``alpha < 0`` and ``|I| > 1`` the
    literal near-zone bound ``|x|^(alpha/(1-alpha)) / |I|`` falls below the
    true size ``1/|I|`` for ``1 < |x| < |I|``; ``literal=False`` adds a
    ``1/|I|`` plateau on ``|x| <= ZERO_ZONE |I|`` so the constant is uniform.
    """
    a = float(alpha)
    I = float(width)
    x = np.abs(np.asarray(x, float))
    with np.errstate(divide="ignore"):
        if a < 0:
            far = I * x ** (-(2 - a) / (1 - a))
            if I <= 1:
                return np.where(x <= 1, I, far)
            near = x ** (a / (1 - a)) / I
            if not literal:
                near = np.where(x <= ZERO_ZONE * I, np.maximum(near, 1.0 / I), near)
            return np.where(x <= I ** (1 - a), near, far)
        if a == 1:
            if I > 1:
                return np.where(x <= ZERO_ZONE * I, 1.0 / I, 0.0)
            return np.where(x <= ZERO_ZONE, 1.0, 0.0)
        if 0 < a < 1:
            if I > 1:
                return np.where(x <= ZERO_ZONE * I, 1.0 / I, 0.0)
            inner = I ** (1 - a)
            mid = I * x ** (-(2 - a) / (1 - a))
            return np.where(x <= inner, I ** (-(1 - a)), np.where(x <= ZERO_ZONE, mid, 0.0))
        if a > 1:
            far = x ** (a / (1 - a)) / I
            if I > 1:
                return np.where(x <= I, 1.0 / I, far)
            return np.where(x <= I ** (1 - a), I ** (-(1 - a)), far)
    raise ValueError("the atom envelopes cover alpha != 0")


def bump_kernel(r: float, z):
    """``P_r(z) = P(z / r) / r``."""
    return averaging_bump(np.asarray(z, float) / r) / r
