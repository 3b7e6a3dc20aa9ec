"""Seeded random weights and test signals.

Every generator describes a function of the physical coordinate, not of the
sample index: random fields are synthesised from a fixed set of Fourier
modes ``k / L`` and spikes have physical widths.  Refining a grid therefore
resamples the same weight, which is what refinement studies compare.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import GridSpec, SampledField, SpectralField, inverse_transform

__all__ = [
    "WeightSpec",
    "lognormal_weight",
    "delta_weight",
    "lacunary_weight",
    "constant_weight",
    "build_weight",
    "weight_suite",
    "random_signal",
    "WEIGHT_KINDS",
]


def _mode_field(grid: GridSpec, rng: np.random.Generator, corr_length: float) -> np.ndarray:
    # Gaussian field with spectrum exp(-(pi ell xi)^2), unit variance, real
    kmax = [int(np.ceil(1.5 * L / corr_length)) for L in grid.lengths]
    for K, n in zip(kmax, grid.points):
        if 2 * K + 1 > n:
            raise ValueError(f"correlation length {corr_length} is not resolved by {n} points")
    ks = [np.arange(-K, K + 1) for K in kmax]
    mesh = np.meshgrid(*ks, indexing="ij")
    xi2 = sum((k / L) ** 2 for k, L in zip(mesh, grid.lengths))
    amp = np.exp(-0.5 * (np.pi * corr_length) ** 2 * xi2)
    c = (rng.standard_normal(amp.shape) + 1j * rng.standard_normal(amp.shape)) * amp
    # Hermitian symmetry gives a real field; the zero mode is dropped
    c = 0.5 * (c + np.conj(c[tuple(slice(None, None, -1) for _ in ks)]))
    c[tuple(K for K in kmax)] = 0.0
    var = np.sum(np.abs(c) ** 2)
    coef = np.zeros(grid.shape, dtype=complex)
    idx = np.ix_(*[k % n for k, n in zip(ks, grid.points)])
    coef[idx] = c
    # samples at x_j = -L/2 + j h: exp(2 pi i k x / L) = (-1)^k exp(2 pi i k j / n)
    for axis, (K, n) in enumerate(zip(kmax, grid.points)):
        sign = np.where(np.fft.fftfreq(n, 1.0 / n) % 2 == 0, 1.0, -1.0)
        shape = [1] * grid.dim
        shape[axis] = n
        coef = coef * sign.reshape(shape)
    vals = np.fft.ifftn(coef).real * np.prod(grid.points)
    return vals / np.sqrt(var)


def lognormal_weight(grid: GridSpec, seed: int, corr_length: float = 1.0,
                     sigma: float = 1.0) -> SampledField:
    """``exp(sigma g)`` for a unit-variance Gaussian field ``g`` of correlation length ``corr_length``."""
    rng = np.random.default_rng(seed)
    g = _mode_field(grid, rng, corr_length)
    return SampledField(grid, np.exp(sigma * g), "weight")


def _cell_overlap(x, h, lo, hi):
    # fraction of the cell [x - h/2, x + h/2] covered by [lo, hi]
    return np.clip(np.minimum(x + h / 2, hi) - np.maximum(x - h / 2, lo), 0.0, None) / h


def delta_weight(grid: GridSpec, center=0.0, width: float | None = None,
                 height: float = 1.0, floor: float = 1e-3) -> SampledField:
    """Indicator spike of physical ``width`` (default one cell) on a small floor.

    Cell averages of the indicator are used, so the spike keeps its mass
    under refinement.
    """
    centers = np.broadcast_to(np.atleast_1d(np.asarray(center, float)), (grid.dim,))
    vals = np.ones(grid.shape)
    for axis in range(grid.dim):
        h = grid.spacing[axis]
        wd = h if width is None else float(width)
        x = grid.coords(axis)
        frac = _cell_overlap(x, h, centers[axis] - wd / 2, centers[axis] + wd / 2)
        shape = [1] * grid.dim
        shape[axis] = -1
        vals = vals * frac.reshape(shape)
    return SampledField(grid, floor + height * vals, "weight")


def lacunary_weight(grid: GridSpec, seed: int, count: int = 6, ratio: float = 2.0,
                    width: float | None = None, floor: float = 1e-3) -> SampledField:
    """Spike train at lacunary distances ``L/4 * ratio^-j`` with heights ``ratio^j``.

    A random sign per spike places it left or right of the origin.  In 2D the
    spikes sit on the diagonal.
    """
    rng = np.random.default_rng(seed)
    L = min(grid.lengths)
    h = max(grid.spacing)
    wd = 2 * h if width is None else float(width)
    vals = np.zeros(grid.shape)
    for j in range(count):
        d = L / 4 * ratio ** (-j)
        if d < wd:
            break
        c = d * (1 if rng.random() < 0.5 else -1)
        vals += delta_weight(grid, c, wd, ratio ** j, 0.0).values
    return SampledField(grid, floor + vals, "weight")


def constant_weight(grid: GridSpec, value: float = 1.0) -> SampledField:
    return SampledField(grid, np.full(grid.shape, float(value)), "weight")


WEIGHT_KINDS = ("lognormal", "delta", "lacunary", "constant")


@dataclass(frozen=True)
class WeightSpec:
    """Recordable recipe for a weight: ``kind``, ``seed`` and keyword parameters."""

    kind: str
    seed: int = 0
    params: dict = field(default_factory=dict)

    def build(self, grid: GridSpec) -> SampledField:
        return build_weight(grid, self)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "seed": int(self.seed), "params": dict(self.params)}


def build_weight(grid: GridSpec, spec: WeightSpec) -> SampledField:
    kw = dict(spec.params)
    if spec.kind == "lognormal":
        return lognormal_weight(grid, spec.seed, **kw)
    if spec.kind == "delta":
        if "center" not in kw:
            # a seeded centre in the middle half of the box
            rng = np.random.default_rng(spec.seed)
            kw["center"] = [rng.uniform(-L / 4, L / 4) for L in grid.lengths]
        return delta_weight(grid, **kw)
    if spec.kind == "lacunary":
        return lacunary_weight(grid, spec.seed, **kw)
    if spec.kind == "constant":
        return constant_weight(grid, **kw)
    raise ValueError(f"unknown weight kind {spec.kind!r}; expected one of {WEIGHT_KINDS}")


def weight_suite(count: int, seed: int = 0, corr_length: float = 1.0,
                 sigma: float = 1.0, adversarial: bool = True) -> list[WeightSpec]:
    """``count`` weight recipes: mostly log-normal, with delta and lacunary members.

    With ``adversarial`` every fifth recipe is a delta cell and every fifth
    (offset by two) a lacunary train; the rest are log-normal fields.
    """
    specs = []
    for i in range(count):
        s = seed * 1000 + i
        if adversarial and i % 5 == 3:
            specs.append(WeightSpec("delta", s, {"width": corr_length / 4}))
        elif adversarial and i % 5 == 4:
            specs.append(WeightSpec("lacunary", s, {"width": corr_length / 4}))
        else:
            specs.append(WeightSpec("lognormal", s, {"corr_length": corr_length, "sigma": sigma}))
    return specs


def random_signal(grid: GridSpec, seed: int, band=None, real: bool = False) -> SampledField:
    """Random signal with i.i.d. Gaussian coefficients on the frequency ``band``.

    ``band`` is ``(lo, hi)`` in 1D or a pair of such intervals in 2D;
    ``None`` keeps every frequency.  Coefficients are drawn per grid bin,
    so this generator is tied to the grid.
    """
    rng = np.random.default_rng(seed)
    mesh = grid.freq_mesh()
    keep = np.ones(grid.shape, bool)
    if band is not None:
        bands = [band] if grid.dim == 1 else list(band)
        for xi, (lo, hi) in zip(mesh, bands):
            keep = keep & (xi >= lo) & (xi <= hi)
    c = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)) * keep
    vals = inverse_transform(SpectralField(grid, c)).values
    if real:
        vals = vals.real
    nrm = np.sqrt(grid.cell_volume * np.sum(np.abs(vals) ** 2))
    if nrm == 0:
        raise ValueError("the band contains no grid frequency")
    return SampledField(grid, vals / nrm, "signal")
