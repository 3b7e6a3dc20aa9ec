"""Maximal operators over approach and escape regions on periodic grids.

Every evaluator scans a finite geometric net of radii.  For each radius the
window integrals of ``w`` are read off periodic prefix sums (``w`` is treated
as piecewise constant on grid cells), multiplied by ``r^{2 beta}``, and the
supremum over window centres within the region's reach is a sliding maximum.
The cost is ``O(N)`` per radius.

Averages are normalised by the window length ``2r``, so a constant weight
``w = c`` gives ``c r^{2 beta}``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._kernels import region_update, sliding_max, window_sums_rows
from .bumps import averaging_bump
from .fields import SampledField, UnsupportedDimensionError

__all__ = [
    "RegionSpec",
    "ConfigurationError",
    "radius_grid",
    "reach_cells",
    "window_integrals",
    "window_averages",
    "eval_hl",
    "eval_fractional",
    "eval_region",
    "eval_region_2d",
    "eval_strong_2d",
    "eval_regularized",
    "regularized_domination_constant",
    "region_argmax",
    "HL",
    "Fractional",
    "Region",
    "Strong2D",
    "Region2D",
    "Regularized",
    "MaximalChainSpec",
    "eval_chain",
    "parse_chain",
]

DEFAULT_RATIO = 2 ** 0.25


class ConfigurationError(ValueError):
    """Inconsistent region or chain configuration."""


@dataclass(frozen=True)
class RegionSpec:
    """Discretised region ``{(r, y): r^alpha <= lam^-alpha, |y - x| <= lam^-alpha r^(1-alpha)}``.

    ``r_min`` and ``r_max`` default to half a cell and a quarter period.
    """

    alpha: float = 0.0
    lam: float = 1.0
    r_min: float | None = None
    r_max: float | None = None
    r_ratio: float = DEFAULT_RATIO

    def __post_init__(self):
        if not self.lam > 0:
            raise ConfigurationError(f"lam must be positive, got {self.lam}")
        if not self.r_ratio > 1:
            raise ConfigurationError(f"r_ratio must exceed 1, got {self.r_ratio}")

    def reach(self, r):
        """Continuum reach ``lam^-alpha r^(1-alpha)``."""
        return self.lam ** (-self.alpha) * np.asarray(r, dtype=float) ** (1 - self.alpha)

    def admissible(self, r):
        r = np.asarray(r, dtype=float)
        return r ** self.alpha <= self.lam ** (-self.alpha) * (1 + 1e-12)

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "lam": self.lam, "r_min": self.r_min,
                "r_max": self.r_max, "r_ratio": self.r_ratio}


def radius_grid(region: RegionSpec, h: float, length: float) -> np.ndarray:
    """Geometric radius net covering the admissible part of ``[r_min, r_max]``.

    Both ends of the admissible range are net points; consecutive radii differ
    by at most ``r_ratio``.
    """
    lo = h / 2 if region.r_min is None else float(region.r_min)
    hi = length / 4 if region.r_max is None else float(region.r_max)
    cap = 1.0 / region.lam
    if region.alpha > 0:
        hi = min(hi, cap)
    elif region.alpha < 0:
        lo = max(lo, cap)
    if not hi >= lo or hi <= 0:
        raise ConfigurationError(
            f"no admissible radius: caps r_min={region.r_min}, r_max={region.r_max} "
            f"with alpha={region.alpha}, lam={region.lam} on a grid with h={h}, L={length}")
    if hi == lo:
        return np.array([lo])
    n = int(np.ceil(np.log(hi / lo) / np.log(region.r_ratio) - 1e-9)) + 1
    return np.geomspace(lo, hi, n)


def reach_cells(region: RegionSpec, r, h: float) -> np.ndarray:
    """Reach rounded outward to whole cells."""
    d = np.ceil(region.reach(r) / h - 1e-9)
    return np.maximum(d, 0).astype(np.int64)


def window_integrals(values: np.ndarray, h: float, r: float, axis: int = -1) -> np.ndarray:
    """``int_{x_i - r}^{x_i + r} w`` for piecewise-constant periodic ``w``."""
    v = np.ascontiguousarray(np.moveaxis(np.asarray(values, dtype=float), axis, -1))
    m, frac = _stencil(h, r)
    flat = v.reshape(-1, v.shape[-1])
    out = np.empty_like(flat)
    window_sums_rows(flat, m, frac, out)
    return np.moveaxis(out.reshape(v.shape) * h, -1, axis)


def window_averages(values, h, r, axis=-1):
    return window_integrals(values, h, r, axis) / (2 * r)


def _require_weight(w: SampledField, dim: int | None = None, stage: str = ""):
    if w.kind != "weight":
        raise ValueError("maximal operators act on weight fields (real, nonnegative)")
    if dim is not None and w.grid.dim != dim:
        raise UnsupportedDimensionError(
            f"{stage or 'operator'} expects a {dim}D field, got {w.grid.dim}D")


def _stencil(h, r):
    q = r / h
    m = int(np.floor(q - 0.5 + 1e-12))
    frac = q - 0.5 - m
    return m, (0.0 if frac < 1e-12 else frac)


def _region_1d(values, h, length, region, beta, track=False):
    radii = radius_grid(region, h, length)
    reach = reach_cells(region, radii, h)
    values = np.ascontiguousarray(values, dtype=float)
    out = np.full(values.shape, -np.inf)
    arg = np.zeros(values.shape, dtype=np.int64) if track else None
    n = values.shape[0]
    buf = np.empty(n)
    dqv = np.empty(n + 2)
    dqi = np.empty(n + 2, dtype=np.int64)
    work = (buf, out, dqi, dqv)
    for k, (r, d) in enumerate(zip(radii, reach)):
        m, frac = _stencil(h, r)
        scale = h / (2 * r) * r ** (2 * beta)
        if track:
            prev = out.copy()
            region_update(values, m, frac, scale, int(d), *work)
            arg[out > prev] = k
        else:
            region_update(values, m, frac, scale, int(d), *work)
    return out, radii, arg


def eval_region(w: SampledField, region: RegionSpec, beta: float) -> SampledField:
    """Region maximal operator ``M_{alpha,beta}`` (scaled by ``region.lam``)."""
    _require_weight(w, 1, "eval_region")
    out, _, _ = _region_1d(w.values, w.grid.spacing[0], w.grid.lengths[0], region, beta)
    return SampledField(w.grid, out, "weight")


def region_argmax(w: SampledField, region: RegionSpec, beta: float):
    """Radius attaining the sup at each point and whether it is the top net radius."""
    _require_weight(w, 1)
    _, radii, arg = _region_1d(w.values, w.grid.spacing[0], w.grid.lengths[0],
                               region, beta, track=True)
    return radii[arg], arg == len(radii) - 1


def _default_region(region):
    return RegionSpec(0.0) if region is None else region


def eval_fractional(w: SampledField, beta: float, region: RegionSpec | None = None) -> SampledField:
    """Centred fractional maximal function ``sup_r r^{2 beta} avg_r w``."""
    _require_weight(w, 1, "eval_fractional")
    reg = _default_region(region)
    h, L = w.grid.spacing[0], w.grid.lengths[0]
    radii = radius_grid(reg, h, L)
    out = np.full(w.grid.shape, -np.inf)
    for r in radii:
        np.maximum(out, window_averages(w.values, h, r) * r ** (2 * beta), out=out)
    return SampledField(w.grid, out, "weight")


def eval_hl(w: SampledField, k: int = 1, region: RegionSpec | None = None) -> SampledField:
    """``k``-fold centred Hardy-Littlewood maximal function."""
    _require_weight(w, None, "eval_hl")
    if k < 0:
        raise ConfigurationError("power must be nonnegative")
    out = w
    for _ in range(k):
        if w.grid.dim == 1:
            out = eval_fractional(out, 0.0, region)
        else:
            out = eval_strong_2d(out, region)
    return out


def _axis_regions(regions, dim=2):
    if regions is None or isinstance(regions, RegionSpec):
        reg = _default_region(regions)
        return (reg,) * dim
    regions = tuple(regions)
    if len(regions) != dim:
        raise ConfigurationError("need one RegionSpec per axis")
    return regions


def _region_2d(values, grid, regions, betas, centred):
    regions = _axis_regions(regions)
    b1, b2 = (float(b) for b in np.broadcast_to(np.asarray(betas, float), 2))
    h1, h2 = grid.spacing
    r1s = radius_grid(regions[0], h1, grid.lengths[0])
    r2s = radius_grid(regions[1], h2, grid.lengths[1])
    d1s = np.zeros(len(r1s), int) if centred else reach_cells(regions[0], r1s, h1)
    d2s = np.zeros(len(r2s), int) if centred else reach_cells(regions[1], r2s, h2)
    out = np.full(values.shape, -np.inf)
    inner = [window_averages(values, h2, r2, axis=1) for r2 in r2s]
    for r1, d1 in zip(r1s, d1s):
        for r2, d2, c in zip(r2s, d2s, inner):
            avg = window_averages(c, h1, r1, axis=0) * (r1 ** (2 * b1) * r2 ** (2 * b2))
            if d1:
                avg = sliding_max(avg, int(d1), axis=0)
            if d2:
                avg = sliding_max(avg, int(d2), axis=1)
            np.maximum(out, avg, out=out)
    return out


def eval_region_2d(w: SampledField, regions, betas) -> SampledField:
    """Product-region operator with rectangular fractional averages."""
    _require_weight(w, 2, "eval_region_2d")
    return SampledField(w.grid, _region_2d(w.values, w.grid, regions, betas, False), "weight")


def eval_strong_2d(w: SampledField, region: RegionSpec | None = None) -> SampledField:
    """Centred strong maximal function over axis-parallel rectangles."""
    _require_weight(w, 2, "eval_strong_2d")
    return SampledField(w.grid, _region_2d(w.values, w.grid, region, (0.0, 0.0), True), "weight")


# ---------------------------------------------------------------- regularised

def _periodic_offsets(n, h):
    j = np.arange(n)
    j = np.where(j < n // 2, j, j - n)
    return j * h


def _bump_kernel(n, h, r):
    """Samples of ``P_r`` at periodic offsets, normalised to unit Riemann sum."""
    k = averaging_bump(_periodic_offsets(n, h) / r)
    return k / (k.sum() * h)


def _average_weights(n, h, r):
    """Cell weights of the window average, indexed like ``_bump_kernel``."""
    e = np.zeros(n)
    e[0] = 1.0
    # window_averages is symmetric, so the response to a unit cell is the stencil
    return window_averages(e, h, r) / h


def eval_regularized(w: SampledField, region: RegionSpec, beta: float) -> SampledField:
    """``sup r^{2 beta} |P_r * w(y)|`` over the region; accepts signed input.

    The convolution is computed spectrally per radius.
    """
    if w.grid.dim != 1:
        raise UnsupportedDimensionError("eval_regularized is 1D")
    n, h, L = w.grid.points[0], w.grid.spacing[0], w.grid.lengths[0]
    radii = radius_grid(region, h, L)
    reach = reach_cells(region, radii, h)
    W = np.fft.fft(np.asarray(w.values))
    real_input = not np.iscomplexobj(w.values)
    out = np.full(n, -np.inf)
    for r, d in zip(radii, reach):
        conv = np.fft.ifft(W * np.fft.fft(_bump_kernel(n, h, r))) * h
        vals = np.abs(conv.real if real_input else conv) * r ** (2 * beta)
        np.maximum(out, sliding_max(vals, int(d)), out=out)
    return SampledField(w.grid, out, "weight")


def regularized_domination_constant(n: int, length: float, region: RegionSpec) -> float:
    """Smallest ``c`` with average stencil ``<= c *`` bump stencil at every net radius.

    Then ``eval_region(w) <= c * eval_regularized(w)`` for every weight ``w``.
    """
    h = length / n
    c = 0.0
    for r in radius_grid(region, h, length):
        a = _average_weights(n, h, r)
        k = _bump_kernel(n, h, r)
        on = a > 0
        if np.any(k[on] <= 0):
            return np.inf
        c = max(c, float(np.max(a[on] / k[on])))
    return c


# ---------------------------------------------------------------- chains

@dataclass(frozen=True)
class HL:
    power: int = 1
    region: RegionSpec | None = None
    dim: int = 1

    def apply(self, w):
        _require_weight(w, self.dim, f"HL({self.power})")
        return eval_hl(w, self.power, self.region)

    def describe(self):
        return {"stage": "HL", "power": self.power, "dim": self.dim}


@dataclass(frozen=True)
class Fractional:
    beta: float
    region: RegionSpec | None = None
    dim: int = 1

    def apply(self, w):
        _require_weight(w, 1, "Fractional")
        return eval_fractional(w, self.beta, self.region)

    def describe(self):
        return {"stage": "Fractional", "beta": self.beta}


@dataclass(frozen=True)
class Region:
    region: RegionSpec
    beta: float
    dim: int = 1

    def apply(self, w):
        _require_weight(w, 1, "Region")
        return eval_region(w, self.region, self.beta)

    def describe(self):
        return {"stage": "Region", "beta": self.beta, **self.region.as_dict()}


@dataclass(frozen=True)
class Strong2D:
    power: int = 1
    region: RegionSpec | None = None
    dim: int = 2

    def apply(self, w):
        _require_weight(w, 2, "Strong2D")
        for _ in range(self.power):
            w = eval_strong_2d(w, self.region)
        return w

    def describe(self):
        return {"stage": "Strong2D", "power": self.power}


@dataclass(frozen=True)
class Region2D:
    regions: tuple
    betas: tuple
    dim: int = 2

    def apply(self, w):
        _require_weight(w, 2, "Region2D")
        return eval_region_2d(w, self.regions, self.betas)

    def describe(self):
        return {"stage": "Region2D", "betas": list(self.betas),
                "regions": [r.as_dict() for r in self.regions]}


@dataclass(frozen=True)
class Regularized:
    region: RegionSpec
    beta: float
    bump: str = "standard"
    dim: int = 1

    def apply(self, w):
        if w.grid.dim != 1:
            raise UnsupportedDimensionError("Regularized stage expects a 1D field")
        return eval_regularized(w, self.region, self.beta)

    def describe(self):
        return {"stage": "Regularized", "beta": self.beta, "bump": self.bump,
                **self.region.as_dict()}


@dataclass(frozen=True)
class MaximalChainSpec:
    """Stages listed left to right as written; applied right to left."""

    stages: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        dims = {s.dim for s in self.stages}
        if len(dims) > 1:
            raise ConfigurationError("chain mixes 1D and 2D stages")

    @property
    def dim(self):
        return self.stages[0].dim if self.stages else None

    def describe(self):
        return [s.describe() for s in self.stages]


def eval_chain(w: SampledField, chain: MaximalChainSpec | Sequence) -> SampledField:
    """Apply the stages right to left (the rightmost stage acts first)."""
    if not isinstance(chain, MaximalChainSpec):
        chain = MaximalChainSpec(tuple(chain))
    out = w
    for pos in range(len(chain.stages) - 1, -1, -1):
        stage = chain.stages[pos]
        if stage.dim != out.grid.dim:
            raise ConfigurationError(
                f"stage {pos} ({type(stage).__name__}) is {stage.dim}D but the field is "
                f"{out.grid.dim}D")
        out = stage.apply(out)
    return out


# ---------------------------------------------------------------- grammar

_STAGE = re.compile(r"^(HL|S|F|R2|Reg|R)(?:\^(\d+))?(?:\((.*)\))?$")


def _num(tok: str) -> float:
    tok = tok.strip()
    try:
        return float(Fraction(tok))
    except (ValueError, ZeroDivisionError):
        raise ConfigurationError(f"cannot read {tok!r} as a number") from None


def parse_chain(text: str) -> MaximalChainSpec:
    """Read a chain written left to right, stages joined by ``*``.

    Stages: ``HL^k`` (Hardy-Littlewood, ``k`` times), ``S^k`` (strong
    maximal on the plane), ``F(beta)``, ``R(alpha, beta[, lam])``,
    ``Reg(alpha, beta[, lam])`` (regularised) and
    ``R2(a1, b1[, l1]; a2, b2[, l2])``.  Numbers may be fractions such as
    ``1/2``.  Example: ``"HL^6 * R(2, 1) * HL^4"``.
    """
    if not text.strip():
        return MaximalChainSpec(())
    stages = []
    for raw in text.split("*"):
        tok = raw.replace(" ", "")
        mt = _STAGE.match(tok)
        if mt is None:
            raise ConfigurationError(f"unrecognised chain stage {raw.strip()!r}")
        name, power, args = mt.groups()
        k = int(power) if power else 1
        if name in ("HL", "S"):
            if args is not None:
                raise ConfigurationError(f"{name} takes no arguments")
            stages.append(HL(k) if name == "HL" else Strong2D(k))
            continue
        if power:
            raise ConfigurationError(f"{name} does not take a power")
        if args is None:
            raise ConfigurationError(f"{name} needs arguments")
        if name == "R2":
            parts = args.split(";")
            if len(parts) != 2:
                raise ConfigurationError("R2 needs two ';'-separated axis groups")
            regions, betas = [], []
            for part in parts:
                vals = [_num(v) for v in part.split(",")]
                if len(vals) not in (2, 3):
                    raise ConfigurationError("each R2 axis group is alpha, beta[, lam]")
                regions.append(RegionSpec(vals[0], vals[2] if len(vals) == 3 else 1.0))
                betas.append(vals[1])
            stages.append(Region2D(tuple(regions), tuple(betas)))
            continue
        vals = [_num(v) for v in args.split(",")]
        if name == "F":
            if len(vals) != 1:
                raise ConfigurationError("F takes one argument")
            stages.append(Fractional(vals[0]))
            continue
        if len(vals) not in (2, 3):
            raise ConfigurationError(f"{name} takes alpha, beta[, lam]")
        reg = RegionSpec(vals[0], vals[2] if len(vals) == 3 else 1.0)
        stages.append(Region(reg, vals[1]) if name == "R" else Regularized(reg, vals[1]))
    return MaximalChainSpec(tuple(stages))
