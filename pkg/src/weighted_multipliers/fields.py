"""Sampled fields on uniform periodic grids and their spectral calculus.

The real line (or plane) is modelled by a torus of period ``L`` per axis.  Grid
points sit at ``x_j = -L/2 + j*h`` with ``h = L/N``.  Frequencies are ``k/L``
for ``k`` in ``[-N/2, N/2)``; with the half-bin offset flag they become
``(k + 1/2)/L`` so that no sample hits ``xi = 0``.

The forward transform carries the cell volume, so coefficients approximate
the continuum integral ``int f(x) exp(-2 pi i x xi) dx``; the inverse carries
``1/L`` per axis.  With these conventions Parseval reads
``sum |F|^2 / L = h sum |f|^2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "GridSpec",
    "SampledField",
    "SpectralField",
    "GridMismatchError",
    "SymbolEvaluationError",
    "UnsupportedDimensionError",
    "make_grid",
    "forward_transform",
    "inverse_transform",
    "apply_spectral_symbol",
    "symbol_on_grid",
    "hilbert_transform",
    "halfline_projection",
    "halfline_via_hilbert",
    "modulate",
    "lp_norm",
    "inner_product",
]


class GridMismatchError(ValueError):
    """Values do not match the grid they are attached to."""


class SymbolEvaluationError(ArithmeticError):
    """A spectral symbol produced a non-finite value on the grid."""


class UnsupportedDimensionError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid in one or two dimensions.

    Parameters
    ----------
    points : tuple of int
        Number of samples per axis, each a positive even integer.
    lengths : tuple of float
        Physical period per axis.
    offset : tuple of bool
        Per-axis half-bin frequency shift.
    """

    points: tuple[int, ...]
    lengths: tuple[float, ...]
    offset: tuple[bool, ...] = ()

    def __post_init__(self):
        pts = tuple(int(n) for n in np.atleast_1d(self.points))
        lens = tuple(float(v) for v in np.atleast_1d(self.lengths))
        off = self.offset
        if off == () or off is None:
            off = (False,) * len(pts)
        off = tuple(bool(o) for o in np.atleast_1d(off))
        if len(off) == 1 and len(pts) > 1:
            off = off * len(pts)
        if not (len(pts) == len(lens) == len(off)) or len(pts) not in (1, 2):
            raise GridMismatchError("grid must be 1D or 2D with matching per-axis data")
        for n in pts:
            if n <= 0 or n % 2:
                raise GridMismatchError(f"points per axis must be positive and even, got {n}")
        for length in lens:
            if not length > 0:
                raise GridMismatchError(f"lengths must be positive, got {length}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "lengths", lens)
        object.__setattr__(self, "offset", off)

    @property
    def dim(self) -> int:
        return len(self.points)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.lengths, self.points))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def resolution(self) -> tuple[float, ...]:
        """Frequency spacing ``1/L`` per axis."""
        return tuple(1.0 / L for L in self.lengths)

    @property
    def nyquist(self) -> tuple[float, ...]:
        return tuple(n / (2.0 * L) for n, L in zip(self.points, self.lengths))

    def coords(self, axis: int = 0) -> np.ndarray:
        n, L = self.points[axis], self.lengths[axis]
        return -L / 2 + np.arange(n) * (L / n)

    def freqs(self, axis: int = 0) -> np.ndarray:
        """Frequencies of axis ``axis`` in FFT order."""
        n, L = self.points[axis], self.lengths[axis]
        k = np.fft.fftfreq(n, d=1.0 / n)
        shift = 0.5 if self.offset[axis] else 0.0
        return (k + shift) / L

    def mesh(self) -> tuple[np.ndarray, ...]:
        """Broadcastable coordinate arrays, one per axis."""
        return _broadcast_axes([self.coords(a) for a in range(self.dim)])

    def freq_mesh(self) -> tuple[np.ndarray, ...]:
        return _broadcast_axes([self.freqs(a) for a in range(self.dim)])

    def refined(self, factor: int = 2) -> "GridSpec":
        """Same physical box with ``factor`` times as many points per axis."""
        return GridSpec(tuple(n * factor for n in self.points), self.lengths, self.offset)

    def with_offset(self, offset: bool | Sequence[bool]) -> "GridSpec":
        return GridSpec(self.points, self.lengths, offset)

    def axis_grid(self, axis: int) -> "GridSpec":
        return GridSpec((self.points[axis],), (self.lengths[axis],), (self.offset[axis],))

    def as_dict(self) -> dict:
        return {"points": list(self.points), "lengths": list(self.lengths),
                "offset": list(self.offset)}


def _broadcast_axes(arrays):
    if len(arrays) == 1:
        return (arrays[0],)
    return (arrays[0][:, None], arrays[1][None, :])


def make_grid(points, length, offset=False, dim: int | None = None) -> GridSpec:
    """Convenience constructor: scalars are repeated over ``dim`` axes."""
    pts = np.atleast_1d(points)
    lens = np.atleast_1d(length)
    if dim is None:
        dim = max(len(pts), len(lens))
    if len(pts) == 1:
        pts = np.repeat(pts, dim)
    if len(lens) == 1:
        lens = np.repeat(lens, dim)
    offs = np.atleast_1d(offset)
    if len(offs) == 1:
        offs = np.repeat(offs, dim)
    return GridSpec(tuple(int(p) for p in pts), tuple(float(v) for v in lens),
                    tuple(bool(o) for o in offs))


@dataclass(frozen=True, eq=False)
class SampledField:
    """Function sampled on a :class:`GridSpec`.

    ``kind`` is ``"signal"`` (complex or real values) or ``"weight"`` (real and
    nonnegative).
    """

    grid: GridSpec
    values: np.ndarray
    kind: str = "signal"

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.size != int(np.prod(self.grid.shape)):
            raise GridMismatchError(
                f"{vals.size} values for a grid of shape {self.grid.shape}")
        vals = vals.reshape(self.grid.shape)
        if self.kind not in ("signal", "weight"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "weight":
            if np.iscomplexobj(vals):
                if np.any(vals.imag != 0):
                    raise ValueError("weight fields must be real")
                vals = vals.real
            vals = vals.astype(float, copy=False)
            if np.any(vals < 0) or not np.all(np.isfinite(vals)):
                raise ValueError("weight fields must be finite and nonnegative")
        object.__setattr__(self, "values", vals)

    def with_values(self, values, kind: str | None = None) -> "SampledField":
        return SampledField(self.grid, values, self.kind if kind is None else kind)

    def as_signal(self) -> "SampledField":
        return SampledField(self.grid, self.values, "signal")

    def as_weight(self) -> "SampledField":
        return SampledField(self.grid, self.values, "weight")


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: GridSpec
    coefficients: np.ndarray

    def freqs(self, axis: int = 0) -> np.ndarray:
        return self.grid.freqs(axis)


def _phase_factors(grid: GridSpec):
    """Per-axis factors linking the FFT to the centred, offset transform."""
    out = []
    for a in range(grid.dim):
        n = grid.points[a]
        x = grid.coords(a)
        k = np.fft.fftfreq(n, d=1.0 / n)
        sign = np.where(k.astype(np.int64) % 2 == 0, 1.0, -1.0)
        if grid.offset[a]:
            twist = np.exp(-1j * np.pi * x / grid.lengths[a])
        else:
            twist = None
        out.append((sign, twist))
    return out


def _apply_axiswise(values, factors, conj=False):
    vals = values
    for a, fac in enumerate(factors):
        if fac is None:
            continue
        f = np.conj(fac) if conj else fac
        shape = [1] * vals.ndim
        shape[a] = -1
        vals = vals * f.reshape(shape)
    return vals


def forward_transform(f: SampledField) -> SpectralField:
    """Cell-volume-normalised discrete Fourier transform."""
    if f.kind != "signal":
        raise ValueError("forward_transform expects a signal field")
    grid = f.grid
    pf = _phase_factors(grid)
    g = _apply_axiswise(f.values.astype(complex), [t for _, t in pf])
    coef = np.fft.fftn(g) * grid.cell_volume
    coef = _apply_axiswise(coef, [s for s, _ in pf])
    return SpectralField(grid, coef)


def inverse_transform(F: SpectralField) -> SampledField:
    grid = F.grid
    pf = _phase_factors(grid)
    coef = _apply_axiswise(np.asarray(F.coefficients), [s for s, _ in pf])
    vals = np.fft.ifftn(coef) / grid.cell_volume
    vals = _apply_axiswise(vals, [t for _, t in pf], conj=True)
    return SampledField(grid, vals, "signal")


def symbol_on_grid(grid: GridSpec, symbol: Callable) -> np.ndarray:
    """Evaluate ``symbol`` at every grid frequency (FFT order).

    1D symbols receive one array; 2D symbols receive broadcastable
    ``(xi1, xi2)``.  Non-finite values raise :class:`SymbolEvaluationError`.
    """
    mesh = grid.freq_mesh()
    vals = np.asarray(symbol(*mesh))
    vals = np.broadcast_to(vals, grid.shape)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        idx = np.argwhere(bad)[0]
        where = tuple(float(grid.freqs(a)[i]) for a, i in enumerate(idx))
        raise SymbolEvaluationError(f"symbol is not finite at frequency {where}")
    return vals


def apply_spectral_symbol(f: SampledField, symbol) -> SampledField:
    """Fourier multiplier: inverse transform of ``symbol * f_hat``.

    ``symbol`` may be a callable or a precomputed array in FFT order.
    """
    F = forward_transform(f.as_signal())
    if callable(symbol):
        m = symbol_on_grid(f.grid, symbol)
    else:
        m = np.broadcast_to(np.asarray(symbol), f.grid.shape)
    return inverse_transform(SpectralField(f.grid, F.coefficients * m))


def hilbert_transform(f: SampledField) -> SampledField:
    """Spectral action ``-i sign(xi)``, with ``sign(0) = 0``."""
    if f.grid.dim != 1:
        raise UnsupportedDimensionError("the Hilbert transform is implemented on 1D grids")
    return apply_spectral_symbol(f, lambda xi: -1j * np.sign(xi))


def halfline_projection(f: SampledField, xi0: float, axis: int = 0) -> SampledField:
    """Keep the spectrum on ``[xi0, inf)`` along ``axis``."""
    if not np.isfinite(xi0):
        raise ValueError("xi0 must be finite")
    grid = f.grid
    if not 0 <= axis < grid.dim:
        raise ValueError(f"invalid axis {axis} for a {grid.dim}D grid")
    keep = (grid.freqs(axis) >= xi0).astype(float)
    shape = [1] * grid.dim
    shape[axis] = -1
    F = forward_transform(f.as_signal())
    return inverse_transform(SpectralField(grid, F.coefficients * keep.reshape(shape)))


def modulate(values: np.ndarray, x: np.ndarray, xi: float) -> np.ndarray:
    """``M_xi f(x) = exp(-2 pi i x xi) f(x)``."""
    return values * np.exp(-2j * np.pi * x * xi)


def _twisted_hilbert_1d(values, length, twist):
    """Hilbert transform of samples of ``sum_j c_j exp(2 pi i (j + twist) x / L)``."""
    n = values.shape[0]
    x = -length / 2 + np.arange(n) * (length / n)
    untwisted = values * np.exp(-2j * np.pi * twist * x / length)
    coef = np.fft.fft(untwisted, axis=0)
    j = np.fft.fftfreq(n, d=1.0 / n)
    sgn = np.sign(j + twist).reshape((-1,) + (1,) * (values.ndim - 1))
    out = np.fft.ifft(-1j * sgn * coef, axis=0)
    return out * np.exp(2j * np.pi * twist * x / length).reshape((-1,) + (1,) * (values.ndim - 1))


def halfline_via_hilbert(f: SampledField, xi0: float, axis: int = 0) -> SampledField:
    """``(f + i M_{-xi0} H M_{xi0} f)/2`` built from pointwise modulations.

    The field is resynthesised on an oversampled grid, modulated there, and the
    Hilbert transform is taken on the shifted frequency lattice that contains
    every modulated frequency, so nothing aliases.  Agrees with
    :func:`halfline_projection` whenever ``xi0`` is not a grid frequency.
    """
    grid = f.grid
    n, L = grid.points[axis], grid.lengths[axis]
    vals = np.moveaxis(np.asarray(f.values, dtype=complex), axis, 0)
    xshape = (-1,) + (1,) * (vals.ndim - 1)
    shift = 0.5 if grid.offset[axis] else 0.0
    x = grid.coords(axis)
    k = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    # f(x) = (1/n) sum_k c_k exp(2 pi i (k + shift) x / L)
    c = np.fft.fft(vals * np.exp(-2j * np.pi * shift * x / L).reshape(xshape), axis=0)
    c = c * np.where(k % 2 == 0, 1.0, -1.0).reshape(xshape)

    over = 2 + int(np.ceil(2 * abs(xi0) * L / n))
    nf = n * over
    xf = -L / 2 + np.arange(nf) * (L / nf)
    basis = np.exp(2j * np.pi * np.outer(xf, (k + shift) / L)) / n
    fine = (basis @ c.reshape(n, -1)).reshape((nf,) + vals.shape[1:])

    mod = fine * np.exp(-2j * np.pi * xf * xi0).reshape(xshape)
    twist = (shift - xi0 * L) % 1.0
    h = _twisted_hilbert_1d(mod, L, twist)
    back = h * np.exp(2j * np.pi * xf * xi0).reshape(xshape)
    out = 0.5 * (vals + 1j * back[::over])
    return SampledField(grid, np.moveaxis(out, 0, axis), "signal")


def lp_norm(f: SampledField, p: float) -> float:
    """Riemann-sum ``L^p`` norm; ``p = inf`` gives the max norm."""
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    a = np.abs(f.values)
    if np.isinf(p):
        return float(a.max())
    return float((f.grid.cell_volume * np.sum(a ** p)) ** (1.0 / p))


def inner_product(f: SampledField, g: SampledField, weight: SampledField | None = None) -> complex:
    """``int f conj(g) w`` as a Riemann sum."""
    w = 1.0 if weight is None else weight.values
    return complex(f.grid.cell_volume * np.sum(f.values * np.conj(g.values) * w))
