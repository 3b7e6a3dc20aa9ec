"""Multiplier families, class-membership scans and r-variation.

A multiplier is stored as closed-form callables for its value and derivative
together with the class parameters ``(alpha, beta, lam)``.  The class
conditions (support, size, and the integral of ``|m'|`` over sub-dyadic
intervals of length ``(R/lam)^{-alpha} R``) are checked by scanning finite
sample sets; a verdict is a stability heuristic, never a certificate.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from ._kernels import variation_sum
from .bumps import smooth_plateau
from .fields import GridSpec, SymbolEvaluationError, UnsupportedDimensionError

__all__ = [
    "MultiplierSpec",
    "MembershipReport",
    "KabSpec",
    "make_constant",
    "make_hilbert",
    "make_miyachi",
    "make_fractional",
    "make_schrodinger",
    "make_kab_multiplier",
    "make_tensor_2d",
    "restrict_support",
    "kab_cutoff",
    "check_membership",
    "check_membership_2d",
    "r_variation",
    "build_multiplier",
    "multiplier_dim",
    "MULTIPLIER_FAMILIES",
]

NUMERIC = "numeric"


def _asfloat(xi):
    return np.asarray(xi, dtype=float)


@dataclass(frozen=True, eq=False)
class MultiplierSpec:
    """Closed-form multiplier with class parameters.

    In 1D ``derivative_fn`` is a callable or the marker ``"numeric"``; in 2D
    it is a pair of partial derivatives and ``mixed_fn`` the mixed second
    derivative.  ``support`` is an optional predicate outside which the value
    (and every derivative) is forced to zero.
    """

    value_fn: Callable
    derivative_fn: Callable | str | tuple
    alpha: float | tuple = 0.0
    beta: float | tuple = 0.0
    lam: float | tuple = 1.0
    constant: float | None = None
    support: Callable | None = None
    name: str = "multiplier"
    params: dict = field(default_factory=dict)
    dim: int = 1
    mixed_fn: Callable | None = None
    table: tuple | None = None

    @property
    def class_params(self):
        return (self.alpha, self.beta, self.lam)

    @property
    def has_closed_derivative(self) -> bool:
        return not (isinstance(self.derivative_fn, str) and self.derivative_fn == NUMERIC)

    def _mask(self, out, xi):
        if self.support is None:
            return out
        keep = np.broadcast_to(self.support(*xi), np.shape(out))
        return np.where(keep, out, 0)

    def value(self, *xi):
        xi = tuple(_asfloat(x) for x in xi)
        out = np.asarray(self.value_fn(*xi), dtype=complex)
        return self._mask(out, xi)

    __call__ = value

    def derivative(self, xi, step: float = 1e-5):
        """``m'`` in 1D: closed form, or central differences for ``"numeric"``."""
        if self.dim != 1:
            raise UnsupportedDimensionError("use partial() for 2D multipliers")
        xi = _asfloat(xi)
        if self.has_closed_derivative:
            out = np.asarray(self.derivative_fn(xi), dtype=complex)
        else:
            h = step * np.maximum(1.0, np.abs(xi))
            out = (np.asarray(self.value_fn(xi + h)) - np.asarray(self.value_fn(xi - h))) / (2 * h)
        return self._mask(out, (xi,))

    def partial(self, axis: int, xi1, xi2):
        if self.dim != 2:
            raise UnsupportedDimensionError("partial() is defined for 2D multipliers")
        xi = (_asfloat(xi1), _asfloat(xi2))
        out = np.asarray(self.derivative_fn[axis](*xi), dtype=complex)
        return self._mask(out, xi)

    def mixed(self, xi1, xi2):
        if self.dim != 2 or self.mixed_fn is None:
            raise UnsupportedDimensionError("mixed derivative needs a 2D multiplier")
        xi = (_asfloat(xi1), _asfloat(xi2))
        return self._mask(np.asarray(self.mixed_fn(*xi), dtype=complex), xi)

    def describe(self) -> dict:
        return {"name": self.name, "params": dict(self.params), "alpha": self.alpha,
                "beta": self.beta, "lam": self.lam, "dim": self.dim,
                "restricted": self.support is not None}


# ---------------------------------------------------------------- families

def make_constant(c: complex = 1.0, dim: int = 1) -> MultiplierSpec:
    if dim == 1:
        return MultiplierSpec(lambda xi: np.full(np.shape(xi), c, dtype=complex),
                              lambda xi: np.zeros(np.shape(xi), dtype=complex),
                              name="constant", params={"c": c})
    zero = lambda a, b: np.zeros(np.broadcast(a, b).shape, dtype=complex)  # noqa: E731
    return MultiplierSpec(lambda a, b: np.full(np.broadcast(a, b).shape, c, dtype=complex),
                          (zero, zero), alpha=(0.0, 0.0), beta=(0.0, 0.0), lam=(1.0, 1.0),
                          name="constant", params={"c": c}, dim=2, mixed_fn=zero)


def make_hilbert() -> MultiplierSpec:
    """Symbol ``-i sign(xi)``; derivative zero away from the origin."""
    return MultiplierSpec(lambda xi: -1j * np.sign(xi),
                          lambda xi: np.zeros(np.shape(xi), dtype=complex),
                          name="hilbert")


def make_miyachi(alpha: float, beta: float) -> MultiplierSpec:
    """``exp(i |xi|^alpha) / (1 + xi^2)^{beta/2}``."""
    a, b = float(alpha), float(beta)

    def value(xi):
        return np.exp(1j * np.abs(xi) ** a) * (1.0 + xi * xi) ** (-b / 2)

    def deriv(xi):
        ax = np.abs(xi)
        if a == 0:
            phase = np.zeros_like(ax)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                phase = a * ax ** (a - 1) * np.sign(xi)
        return value(xi) * (1j * phase - b * xi / (1.0 + xi * xi))

    return MultiplierSpec(value, deriv, a, b, 1.0, name="miyachi",
                          params={"alpha": a, "beta": b})


def make_fractional(beta: float) -> MultiplierSpec:
    """``|xi|^{-beta}``; evaluating at 0 with ``beta > 0`` is an error."""
    b = float(beta)

    def check(xi):
        if b > 0 and np.any(xi == 0):
            raise SymbolEvaluationError("|xi|^-beta is singular at xi = 0")

    def value(xi):
        check(xi)
        if b == 0:
            return np.ones(np.shape(xi), dtype=complex)
        with np.errstate(divide="ignore"):
            return np.abs(xi) ** (-b) + 0j

    def deriv(xi):
        check(xi)
        if b == 0:
            return np.zeros(np.shape(xi), dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            return -b * np.sign(xi) * np.abs(xi) ** (-b - 1) + 0j

    return MultiplierSpec(value, deriv, 0.0, b, 1.0, name="fractional", params={"beta": b})


def make_schrodinger(t: float, beta: float) -> MultiplierSpec:
    """``exp(i t xi^2) (1/t + xi^2)^{-beta/2}``, scale ``lam = t^{-1/2}``.

    This is ``t^{beta/2} m(sqrt(t) xi)`` for the Miyachi symbol ``m`` with
    ``alpha = 2``, so it satisfies the scaled class bounds uniformly in ``t``
    and coincides with ``make_miyachi(2, beta)`` at ``t = 1``.
    """
    t, b = float(t), float(beta)
    if not t > 0:
        raise ValueError("t must be positive")
    if t == 1.0:
        base = make_miyachi(2.0, b)
        return replace(base, name="schrodinger", params={"t": t, "beta": b})
    s = 1.0 / t

    def value(xi):
        return np.exp(1j * t * xi * xi) * (s + xi * xi) ** (-b / 2)

    def deriv(xi):
        return value(xi) * (2j * t * xi - b * xi / (s + xi * xi))

    return MultiplierSpec(value, deriv, 2.0, b, t ** -0.5, name="schrodinger",
                          params={"t": t, "beta": b})


def restrict_support(m: MultiplierSpec, lam: float | None = None) -> MultiplierSpec:
    """Cut ``m`` to ``{|xi|^alpha >= lam^alpha}`` (per axis in 2D)."""
    if m.dim == 1:
        a = float(m.alpha)
        lv = float(m.lam if lam is None else lam)
        if a == 0:
            return replace(m, lam=lv)
        pred = (lambda xi: np.abs(xi) >= lv) if a > 0 else (lambda xi: np.abs(xi) <= lv)
        return replace(m, support=pred, lam=lv, name=m.name + "_restricted")
    al = tuple(float(v) for v in m.alpha)
    lv = tuple(float(v) for v in (m.lam if lam is None else np.broadcast_to(lam, 2)))

    def pred(x1, x2):
        ok = np.ones(np.broadcast(x1, x2).shape, dtype=bool)
        for x, a, l_ in ((x1, al[0], lv[0]), (x2, al[1], lv[1])):
            if a > 0:
                ok = ok & (np.abs(x) >= l_)
            elif a < 0:
                ok = ok & (np.abs(x) <= l_)
        return ok

    return replace(m, support=pred, lam=lv, name=m.name + "_restricted")


def make_tensor_2d(m1: MultiplierSpec, m2: MultiplierSpec) -> MultiplierSpec:
    """``m1(xi1) m2(xi2)`` with closed-form partials when both factors have them."""
    if m1.dim != 1 or m2.dim != 1:
        raise UnsupportedDimensionError("tensor factors must be 1D")
    def value(x1, x2):
        return m1.value(x1) * m2.value(x2)

    # a "numeric" factor falls back to central differences inside derivative()
    partials = (lambda x1, x2: m1.derivative(x1) * m2.value(x2),
                lambda x1, x2: m1.value(x1) * m2.derivative(x2))
    mixed = lambda x1, x2: m1.derivative(x1) * m2.derivative(x2)  # noqa: E731
    return MultiplierSpec(value, partials, (m1.alpha, m2.alpha), (m1.beta, m2.beta),
                          (m1.lam, m2.lam), name=f"{m1.name}x{m2.name}",
                          params={"factors": [m1.describe(), m2.describe()]},
                          dim=2, mixed_fn=mixed)


# ---------------------------------------------------------------- K_{a,b}

@dataclass(frozen=True)
class KabSpec:
    """Kernel ``exp(i|x|^a) / (1 + |x|)^b`` with its derived class exponents."""

    a: float
    b: float
    alpha: float = field(init=False)
    beta: float = field(init=False)
    p0: float = field(init=False)

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (a > 0 and a != 1):
            raise ValueError(f"K_ab needs a > 0 and a != 1, got a={a}")
        if not (1 - a / 2 <= b < 1):
            raise ValueError(f"K_ab needs 1 - a/2 <= b < 1, got a={a}, b={b}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "alpha", a / (a - 1))
        object.__setattr__(self, "beta", (a / 2 + b - 1) / (a - 1) + 0.0)  # no -0.0 in reports
        object.__setattr__(self, "p0", a / (a + b - 1))

    def kernel(self, x):
        ax = np.abs(np.asarray(x, dtype=float))
        return np.exp(1j * ax ** self.a) / (1.0 + ax) ** self.b


def kab_cutoff(x):
    """Fixed smooth cutoff: 1 on ``[-1, 1]``, supported in ``[-2, 2]``."""
    return smooth_plateau(x, 1.0, 2.0)


TAPER_FRACTION = 0.05


def _edge_taper(x, length):
    # 1 on the inner 90% of the period, smooth roll-off over the outer 5% per side
    half = length / 2
    return smooth_plateau(x, half * (1 - 2 * TAPER_FRACTION), half)


def make_kab_multiplier(k: KabSpec, grid: GridSpec, chunk: int = 256) -> MultiplierSpec:
    """Transform of the sampled, edge-tapered ``K_{a,b}``.

    The value at grid frequencies comes from one FFT table; other
    frequencies use the direct sum, as does the closed-form derivative.
    """
    if grid.dim != 1:
        raise UnsupportedDimensionError("K_ab multipliers are 1D")
    L, n, h = grid.lengths[0], grid.points[0], grid.spacing[0]
    x = grid.coords(0)
    taper = _edge_taper(x, L)
    # the smooth cutoff piece must sit where the taper is identically 1
    if 2.0 > (L / 2) * (1 - 2 * TAPER_FRACTION):
        raise ValueError(f"grid length {L} too short: the cutoff support [-2, 2] "
                         "must lie inside the undamped region")
    samples = k.kernel(x) * taper
    shift = 0.5 if grid.offset[0] else 0.0
    table_freq = np.fft.fftshift(grid.freqs(0))
    kk = np.fft.fftfreq(n, d=1.0 / n)
    sign = np.where(kk.astype(np.int64) % 2 == 0, 1.0, -1.0)
    tw = np.exp(-1j * np.pi * x / L) if shift else 1.0
    table = np.fft.fftshift(np.fft.fft(samples * tw) * h * sign)

    def direct(xi, weight=None):
        xi = np.asarray(xi, dtype=float)
        flat = xi.ravel()
        out = np.empty(flat.shape, dtype=complex)
        s = samples if weight is None else samples * weight
        for i in range(0, flat.size, chunk):
            ph = np.exp(-2j * np.pi * np.outer(flat[i:i + chunk], x))
            out[i:i + chunk] = h * (ph @ s)
        return out.reshape(xi.shape)

    def value(xi):
        xi = np.asarray(xi, dtype=float)
        pos = (xi * L - shift) + n // 2
        idx = np.rint(pos)
        on = (np.abs(pos - idx) < 1e-9) & (idx >= 0) & (idx < n)
        out = np.empty(xi.shape, dtype=complex)
        out[on] = table[idx[on].astype(int)]
        if np.any(~on):
            out[~on] = direct(xi[~on])
        return out

    def deriv(xi):
        return direct(xi, weight=-2j * np.pi * x)

    return MultiplierSpec(value, deriv, k.alpha, k.beta, 1.0, name="kab",
                          params={"a": k.a, "b": k.b, "taper_fraction": TAPER_FRACTION,
                                  "grid": grid.as_dict()},
                          table=(table_freq, table))


# ---------------------------------------------------------------- membership

@dataclass
class MembershipReport:
    alpha: float | tuple
    beta: float | tuple
    lam: float | tuple
    support_ok: bool
    S_bound: float
    S_var: float
    R_values: np.ndarray
    bound_table: np.ndarray
    var_table: np.ndarray
    top_mask: np.ndarray
    spread: float
    growth_exponent: float
    verdict: str
    flagged: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return self.verdict == "consistent"

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "lam": self.lam,
                "support_ok": bool(self.support_ok), "S_bound": self.S_bound,
                "S_var": self.S_var, "R_values": self.R_values.tolist(),
                "bound_table": np.asarray(self.bound_table).tolist(),
                "var_table": np.asarray(self.var_table).tolist(),
                "spread": self.spread, "growth_exponent": self.growth_exponent,
                "verdict": self.verdict, "flagged": list(self.flagged),
                "extra": self.extra}


def _interval_integrals(f, a, b, tol=1e-4, n0=16, nmax=1 << 14):
    """Trapezoid integrals of ``f`` over ``[a_i, b_i]``, doubled until stable."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = n0
    prev = None
    while True:
        t = np.linspace(0.0, 1.0, n + 1)
        pts = a[:, None] + (b - a)[:, None] * t[None, :]
        vals = f(pts)
        cur = np.trapezoid(vals, t, axis=1) * (b - a)
        if prev is not None:
            err = np.abs(cur - prev)
            if np.all(err <= tol * np.maximum(np.abs(cur), 1e-300)) or n >= nmax:
                return cur, pts, vals
        prev = cur
        n *= 2


def _R_range(alpha, lam, R_range):
    if R_range is not None:
        lo, hi = map(float, R_range)
    elif alpha > 0:
        lo, hi = lam, lam * 1e3
    elif alpha < 0:
        lo, hi = lam * 1e-3, lam
    else:
        lo, hi = 1e-3, 1e3
    # admissible: R^alpha >= lam^alpha
    if alpha > 0:
        lo = max(lo, lam)
    elif alpha < 0:
        hi = min(hi, lam)
    if not hi > lo:
        raise ValueError("empty admissible R range")
    return lo, hi


def _top_mask(R, alpha, decades=2.0):
    lo, hi = R.min(), R.max()
    up = R >= hi / 10 ** decades * (1 - 1e-12)
    down = R <= lo * 10 ** decades * (1 + 1e-12)
    if alpha > 0:
        return up
    if alpha < 0:
        return down
    return up | down


def _spread(vals):
    vals = np.asarray(vals, dtype=float)
    if not np.all(np.isfinite(vals)) or vals.min() <= 0:
        return np.inf
    return float(vals.max() / vals.min() - 1.0)


def _growth(R, vals, alpha):
    """Slope of log(vals) against log(R) oriented toward the singular end."""
    R = np.asarray(R, float)
    vals = np.asarray(vals, float)
    ok = np.isfinite(vals) & (vals > 0)
    if ok.sum() < 2:
        return np.nan
    lr, lv = np.log(R[ok]), np.log(vals[ok])
    if alpha != 0:
        s = np.polyfit(lr, lv, 1)[0]
        return float(s if alpha > 0 else -s)
    mid = np.median(lr)
    hi = lr >= mid
    lo = ~hi
    out = []
    if hi.sum() >= 2:
        out.append(np.polyfit(lr[hi], lv[hi], 1)[0])
    if lo.sum() >= 2:
        out.append(-np.polyfit(lr[lo], lv[lo], 1)[0])
    return float(max(out))


def _scan_block(deriv, value, R, ell, beta, I_samples, tol, bound_pts=256):
    """Size and derivative-integral suprema on ``+-[R, 2R]``."""
    flagged = []
    ell = min(ell, R)
    starts = R + np.linspace(0.0, R - ell, I_samples)
    best_var = 0.0
    best_bound = 0.0
    for sgn in (1.0, -1.0):
        a = starts if sgn > 0 else -(starts + ell)
        b = a + ell

        def f(p):
            with np.errstate(all="ignore"):
                return np.abs(deriv(p))

        ints, pts, vals = _interval_integrals(f, a, b, tol=tol)
        bad = ~np.all(np.isfinite(vals), axis=1)
        for i in np.flatnonzero(bad):
            flagged.append((float(a[i]), float(b[i])))
        if np.any(~bad):
            best_var = max(best_var, float(np.max(ints[~bad])) * R ** beta)
        xs = sgn * np.linspace(R, 2 * R, bound_pts)
        with np.errstate(all="ignore"):
            mv = np.abs(value(xs)) * np.abs(xs) ** beta
        mv = mv[np.isfinite(mv)]
        if mv.size:
            best_bound = max(best_bound, float(mv.max()))
    return best_bound, best_var, flagged


def check_membership(m: MultiplierSpec, alpha: float, beta: float, lam: float = 1.0,
                     R_samples: int = 13, I_samples: int = 16, R_range=None,
                     tol: float = 1e-4, max_spread: float = 0.25) -> MembershipReport:
    """Scan the class conditions for ``C(alpha, beta)`` at scale ``lam``.

    ``R`` runs over a geometric set inside ``{R^alpha >= lam^alpha}``; each
    block ``+-[R, 2R]`` is covered by ``I_samples`` sliding subintervals of
    length ``(R/lam)^{-alpha} R``.  The verdict is ``"consistent"`` when both
    suprema vary by less than ``max_spread`` (ratio max/min - 1) over the two
    decades at the singular end of the ``R`` range.
    """
    if m.dim != 1:
        raise UnsupportedDimensionError("use check_membership_2d for 2D multipliers")
    alpha, beta, lam = float(alpha), float(beta), float(lam)
    lo, hi = _R_range(alpha, lam, R_range)
    R = np.geomspace(lo, hi, R_samples)
    bound_t = np.empty(R_samples)
    var_t = np.empty(R_samples)
    flagged = []
    for i, r in enumerate(R):
        ell = (r / lam) ** (-alpha) * r
        bound_t[i], var_t[i], fl = _scan_block(m.derivative, m.value, r, ell, beta,
                                               I_samples, tol)
        flagged.extend(fl)
    # support condition: m must vanish where |xi|^alpha < lam^alpha
    if alpha == 0:
        support_ok = True
    else:
        probe = np.geomspace(lam * 1e-3, lam * (1 - 1e-9), 64) if alpha > 0 else \
            np.geomspace(lam * (1 + 1e-9), lam * 1e3, 64)
        probe = np.concatenate([probe, -probe])
        with np.errstate(all="ignore"):
            support_ok = bool(np.all(np.abs(m.value(probe)) == 0))
    top = _top_mask(R, alpha)
    spread = max(_spread(bound_t[top]), _spread(var_t[top]))
    growth = _growth(R[top], var_t[top], alpha)
    verdict = "consistent" if spread < max_spread else "inconsistent"
    return MembershipReport(alpha, beta, lam, support_ok, float(bound_t.max()),
                            float(var_t.max()), R, bound_t, var_t, top, float(spread),
                            growth, verdict, flagged,
                            {"I_samples": I_samples, "tol": tol, "max_spread": max_spread})


def check_membership_2d(m: MultiplierSpec, alpha: Sequence[float], beta: Sequence[float],
                        lam=(1.0, 1.0), R_samples: int = 7, I_samples: int = 6,
                        cross_samples: int = 24, R_range=None, tol: float = 1e-4,
                        max_spread: float = 0.25) -> MembershipReport:
    """Scan the four mixed conditions of the 2D class.

    Size: sup of ``|xi2|^b2 |xi1|^b1 |m|``.  Partial conditions: for each
    sample of the other variable, the 1D derivative-integral scan weighted by
    its power.  Mixed condition: rectangle integrals of ``|d12 m|``.
    """
    if m.dim != 2:
        raise UnsupportedDimensionError("check_membership_2d needs a 2D multiplier")
    al = tuple(float(v) for v in alpha)
    be = tuple(float(v) for v in beta)
    lv = tuple(float(v) for v in np.broadcast_to(np.asarray(lam, float), 2))
    Rs, tops, cross = [], [], []
    for ax in range(2):
        lo, hi = _R_range(al[ax], lv[ax], None if R_range is None else R_range[ax])
        r = np.geomspace(lo, hi, R_samples)
        Rs.append(r)
        tops.append(_top_mask(r, al[ax]))
        c = np.concatenate([np.geomspace(lo, 2 * hi, cross_samples)])
        cross.append(np.concatenate([c, -c]))

    # size condition on the product sample set
    x1 = np.concatenate([np.linspace(r, 2 * r, 9) for r in Rs[0]])
    x2 = np.concatenate([np.linspace(r, 2 * r, 9) for r in Rs[1]])
    x1 = np.concatenate([x1, -x1])[:, None]
    x2 = np.concatenate([x2, -x2])[None, :]
    size = np.abs(m.value(x1, x2)) * np.abs(x1) ** be[0] * np.abs(x2) ** be[1]
    S_bound = float(np.nanmax(size))

    # single-partial conditions
    part_tables = []
    flagged = []
    for ax in range(2):
        other = 1 - ax
        table = np.zeros(R_samples)
        for i, r in enumerate(Rs[ax]):
            ell = min((r / lv[ax]) ** (-al[ax]) * r, r)
            starts = r + np.linspace(0.0, r - ell, I_samples)
            best = 0.0
            for sgn in (1.0, -1.0):
                a = starts if sgn > 0 else -(starts + ell)
                for eta in cross[other]:
                    def f(p, eta=eta):
                        args = (p, eta) if ax == 0 else (eta, p)
                        with np.errstate(all="ignore"):
                            return np.abs(m.partial(ax, *args))
                    ints, _, vals = _interval_integrals(f, a, a + ell, tol=tol)
                    if not np.all(np.isfinite(vals)):
                        flagged.append((ax, float(r), float(eta)))
                        continue
                    best = max(best, float(ints.max()) * r ** be[ax] * abs(eta) ** be[other])
            table[i] = best
        part_tables.append(table)

    # mixed condition: rectangle integrals, tensor trapezoid refined until stable
    mixed = np.zeros((R_samples, R_samples))
    for i, r1 in enumerate(Rs[0]):
        l1 = min((r1 / lv[0]) ** (-al[0]) * r1, r1)
        s1 = r1 + np.linspace(0.0, r1 - l1, I_samples)
        for j, r2 in enumerate(Rs[1]):
            l2 = min((r2 / lv[1]) ** (-al[1]) * r2, r2)
            s2 = r2 + np.linspace(0.0, r2 - l2, I_samples)
            best = 0.0
            for g1 in (1.0, -1.0):
                for g2 in (1.0, -1.0):
                    a1 = s1 if g1 > 0 else -(s1 + l1)
                    a2 = s2 if g2 > 0 else -(s2 + l2)
                    n, prev = 8, None
                    while True:
                        t = np.linspace(0.0, 1.0, n + 1)
                        p1 = a1[:, None] + l1 * t[None, :]
                        p2 = a2[:, None] + l2 * t[None, :]
                        v = np.abs(m.mixed(p1[:, None, :, None], p2[None, :, None, :]))
                        cur = np.trapezoid(np.trapezoid(v, t, axis=3), t, axis=2) * l1 * l2
                        if prev is not None and (np.all(np.abs(cur - prev) <= tol * np.abs(cur) + 1e-300)
                                                 or n >= 1 << 9):
                            break
                        prev, n = cur, 2 * n
                    best = max(best, float(cur.max()))
            mixed[i, j] = best * r1 ** be[0] * r2 ** be[1]

    spreads = [_spread(part_tables[0][tops[0]]), _spread(part_tables[1][tops[1]]),
               _spread(mixed[np.ix_(tops[0], tops[1])].ravel())]
    spread = float(max(spreads))
    verdict = "consistent" if spread < max_spread and np.isfinite(S_bound) else "inconsistent"
    growth = float(max(_growth(Rs[0][tops[0]], part_tables[0][tops[0]], al[0]),
                       _growth(Rs[1][tops[1]], part_tables[1][tops[1]], al[1])))
    return MembershipReport(al, be, lv, True, S_bound,
                            float(max(part_tables[0].max(), part_tables[1].max(), mixed.max())),
                            np.stack(Rs), np.array([S_bound]),
                            np.stack(part_tables), np.stack(tops), spread, growth, verdict,
                            flagged, {"mixed_table": mixed.tolist(), "spreads": spreads})


# ---------------------------------------------------------------- r-variation

def r_variation(m: MultiplierSpec, interval, r: float, n_points: int,
                exact: bool = False, window: int = 0) -> float:
    """Discrete ``r``-variation of ``m`` over equispaced samples of ``[a, b]``.

    Returns ``(sup sum |m(x_{j+1}) - m(x_j)|^r)^{1/r}`` over sub-partitions of
    the sample set that keep both endpoints; a lower bound for the continuum
    value.  ``exact=True`` enumerates every subset (``n_points <= 18``).
    ``window`` limits the jump length in the dynamic programme.
    """
    r = float(r)
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    a, b = map(float, interval)
    vals = np.asarray(m.value(np.linspace(a, b, int(n_points))), dtype=complex)
    if r == 1.0:
        return float(np.sum(np.abs(np.diff(vals))))
    if exact:
        n = vals.size
        if n > 18:
            raise ValueError("exhaustive search is limited to 18 points")
        best = 0.0
        inner = n - 2
        for mask in range(1 << inner):
            idx = [0] + [i + 1 for i in range(inner) if mask >> i & 1] + [n - 1]
            s = float(np.sum(np.abs(np.diff(vals[idx])) ** r))
            best = max(best, s)
        return best ** (1.0 / r)
    return variation_sum(vals, r, window) ** (1.0 / r)


# ---------------------------------------------------------------- by name

MULTIPLIER_FAMILIES = ("constant", "hilbert", "miyachi", "fractional", "schrodinger", "kab",
                       "tensor")

_FAMILY_PARAMS = {
    "constant": {"c", "dim"},
    "hilbert": set(),
    "miyachi": {"alpha", "beta"},
    "fractional": {"beta"},
    "schrodinger": {"t", "beta"},
    "kab": {"a", "b"},
    "tensor": {"factors"},
}


def multiplier_dim(spec: dict) -> int:
    """Validate a by-name record without sampling anything; return its dimension."""
    if not isinstance(spec, dict):
        raise ValueError("a multiplier record must be an object")
    spec = dict(spec)
    name = spec.pop("name", None)
    spec.pop("restrict", None)
    if name not in _FAMILY_PARAMS:
        raise ValueError(f"unknown multiplier family {name!r}; expected one of "
                         f"{MULTIPLIER_FAMILIES}")
    extra = set(spec) - _FAMILY_PARAMS[name]
    if extra:
        raise ValueError(f"unexpected parameters {sorted(extra)} for {name}")
    if name == "kab":
        KabSpec(float(spec["a"]), float(spec["b"]))
        return 1
    if name == "tensor":
        factors = spec["factors"]
        if len(factors) != 2 or any(multiplier_dim(f) != 1 for f in factors):
            raise ValueError("tensor needs exactly two 1D factors")
        return 2
    if name == "constant":
        return int(spec.get("dim", 1))
    build_multiplier({"name": name, **spec})
    return 1


def build_multiplier(spec: dict, grid: GridSpec | None = None) -> MultiplierSpec:
    """Multiplier from ``{"name": family, **params}``.

    ``"restrict": true`` (or a number, used as ``lam``) applies
    :func:`restrict_support`; ``"tensor"`` takes ``"factors"``, a list of two
    such records.  ``"kab"`` needs the grid it will be sampled on.
    """
    spec = dict(spec)
    name = spec.pop("name", None)
    restrict = spec.pop("restrict", False)
    if name not in _FAMILY_PARAMS:
        raise ValueError(f"unknown multiplier family {name!r}; expected one of "
                         f"{MULTIPLIER_FAMILIES}")
    extra = set(spec) - _FAMILY_PARAMS[name]
    if extra:
        raise ValueError(f"unexpected parameters {sorted(extra)} for {name}")
    if name == "constant":
        m = make_constant(complex(spec.get("c", 1.0)), int(spec.get("dim", 1)))
    elif name == "hilbert":
        m = make_hilbert()
    elif name == "miyachi":
        m = make_miyachi(float(spec["alpha"]), float(spec["beta"]))
    elif name == "fractional":
        m = make_fractional(float(spec["beta"]))
    elif name == "schrodinger":
        m = make_schrodinger(float(spec["t"]), float(spec["beta"]))
    elif name == "kab":
        if grid is None:
            raise ValueError("the kab family needs a grid")
        m = make_kab_multiplier(KabSpec(float(spec["a"]), float(spec["b"])), grid)
    else:
        factors = spec["factors"]
        if len(factors) != 2:
            raise ValueError("tensor needs exactly two factors")
        sub = grid.axis_grid(0) if grid is not None else None
        m = make_tensor_2d(build_multiplier(factors[0], sub), build_multiplier(factors[1], sub))
    if restrict is not False and restrict is not None:
        m = restrict_support(m, None if restrict is True else float(restrict))
    return m
