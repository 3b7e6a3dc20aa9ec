"""Lattice Littlewood-Paley machinery on periodic grids.

A lattice of frequency cells ``rho_k = R' (k + [-1/2, 1/2])`` carries a smooth
partition of unity ``Psi_k``; ``S_k`` multiplies the spectrum by ``Psi_k``.
The weight chain ``w1 -> w2 -> w3`` mollifies a weight at scale ``R``, takes
windowed suprema at scale ``R'`` and re-mollifies with a band-limited
``Theta``.  Spatial boxes ``B(t)`` have half-width ``1/t`` per axis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from ._kernels import sliding_max
from .bumps import smooth_plateau, smooth_step
from .fields import (GridSpec, SampledField, SpectralField, forward_transform,
                     halfline_projection, inverse_transform)
from .maximal import eval_hl, eval_strong_2d, window_averages
from .multipliers import MultiplierSpec

__all__ = [
    "BumpSuite",
    "LatticeSpec",
    "LatticeResolutionError",
    "FourierSupportError",
    "build_lattice",
    "cell_symbol",
    "apply_sk",
    "sk_stack",
    "forward_square_check",
    "reverse_square_check",
    "weight_chain",
    "apply_arr",
    "strong_maximal",
    "orthogonality_defect",
    "chain_ratio",
    "representation_residual",
    "ORTHOGONAL_SEPARATION",
]


class LatticeResolutionError(ValueError):
    """The cell width ``R'`` is below the grid's frequency spacing."""


class FourierSupportError(ValueError):
    """A signal has spectrum outside the lattice band."""


@dataclass(frozen=True)
class BumpSuite:
    """The bumps ``Psi``, ``Phi`` and ``Theta`` in one dimension (tensorised in 2D).

    ``Psi_hat = chi_[-1/2, 1/2] * phi`` with ``phi`` of support radius
    ``phi_radius``; ``Phi_hat`` is 1 on ``[-1, 1]`` and 0 beyond 2;
    ``Theta(x) = sinc(x / D)^2`` with ``D = theta_dilation``, so that
    ``Theta_hat = D max(1 - D |xi|, 0)`` and ``Theta >= 1/2`` on ``[-1, 1]``.
    """

    phi_radius: float = 0.25
    theta_dilation: float = 2.5

    def __post_init__(self):
        if not 0 < self.phi_radius <= 0.5:
            raise ValueError("phi_radius must lie in (0, 1/2] so that supp Psi_hat is in [-1, 1]")
        if self.theta(np.array(1.0)) < 0.5:
            raise ValueError("theta_dilation too small: Theta must be >= 1/2 on [-1, 1]")

    def _phi_cdf(self, t):
        a = self.phi_radius
        return smooth_step((np.asarray(t, float) + a) / (2 * a))

    def psi_hat(self, eta):
        eta = np.asarray(eta, float)
        return self._phi_cdf(eta + 0.5) - self._phi_cdf(eta - 0.5)

    @property
    def psi_support(self) -> float:
        return 0.5 + self.phi_radius

    def phi_hat(self, eta):
        return smooth_plateau(eta, 1.0, 2.0)

    def theta(self, x):
        return np.sinc(np.asarray(x, float) / self.theta_dilation) ** 2

    def theta_hat(self, eta):
        D = self.theta_dilation
        return D * np.clip(1.0 - D * np.abs(np.asarray(eta, float)), 0.0, None)

    @property
    def theta_support(self) -> float:
        return 1.0 / self.theta_dilation

    def as_dict(self) -> dict:
        return {"phi_radius": self.phi_radius, "theta_dilation": self.theta_dilation}


# Cells with max_j |k_j - k'_j| >= this are orthogonal in L^2(w3):
# 2 * psi_support + theta_support < separation for the default suite.
def _orth_separation(suite: BumpSuite) -> int:
    return int(np.floor(2 * suite.psi_support + suite.theta_support)) + 1


ORTHOGONAL_SEPARATION = _orth_separation(BumpSuite())


@dataclass(frozen=True, eq=False)
class LatticeSpec:
    """Frequency lattice: box scale ``R``, cell scale ``R'``, cells and anchors.

    ``cells`` is an ``(K, dim)`` integer array; ``anchors`` the bottom-left
    corners ``R' (k - 1)`` of the doubled cells.  ``band`` holds one
    ``(lo, hi)`` interval per axis and ``symmetric`` reflects it to
    ``-[lo, hi]`` as well.
    """

    grid: GridSpec
    R: tuple
    R_prime: tuple
    alpha: tuple
    lam: tuple
    band: tuple
    symmetric: bool
    cells: np.ndarray
    suite: BumpSuite = field(default_factory=BumpSuite)

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def anchors(self) -> np.ndarray:
        return np.asarray(self.R_prime)[None, :] * (self.cells - 1)

    def index(self, k) -> int:
        k = np.atleast_1d(np.asarray(k, dtype=int))
        hit = np.flatnonzero(np.all(self.cells == k[None, :], axis=1))
        if hit.size == 0:
            raise IndexError(f"cell {tuple(int(v) for v in k)} is not in the lattice")
        return int(hit[0])

    def doubled_cell(self, k) -> list[tuple[float, float]]:
        k = np.atleast_1d(np.asarray(k, dtype=int))
        return [(rp * (kj - 1), rp * (kj + 1)) for rp, kj in zip(self.R_prime, k)]

    def band_mask(self) -> np.ndarray:
        mask = np.ones(self.grid.shape, bool)
        for xi, (lo, hi) in zip(self.grid.freq_mesh(), self.band):
            inside = (xi >= lo) & (xi <= hi)
            if self.symmetric:
                inside = inside | ((-xi >= lo) & (-xi <= hi))
            mask = mask & inside
        return mask

    def as_dict(self) -> dict:
        return {"R": list(self.R), "R_prime": list(self.R_prime), "alpha": list(self.alpha),
                "lam": list(self.lam), "band": [list(b) for b in self.band],
                "symmetric": self.symmetric, "cells": int(len(self.cells)),
                "suite": self.suite.as_dict()}


def _per_axis(v, dim):
    arr = np.atleast_1d(np.asarray(v, float))
    if arr.size == 1:
        arr = np.repeat(arr, dim)
    if arr.size != dim:
        raise ValueError(f"expected {dim} per-axis values, got {arr.size}")
    return tuple(float(a) for a in arr)


def build_lattice(R, alpha, lam=1.0, band=None, suite: BumpSuite | None = None,
                  grid: GridSpec | None = None, symmetric: bool = False) -> LatticeSpec:
    """Lattice with ``R' = (R / lam)^{-alpha} R`` per axis.

    ``band`` defaults to ``[R, 2R]`` per axis.  Cells are kept when their
    double meets the band (or its reflection when ``symmetric``).
    """
    if grid is None:
        raise ValueError("build_lattice needs the grid the lattice will act on")
    suite = BumpSuite() if suite is None else suite
    dim = grid.dim
    R = _per_axis(R, dim)
    alpha = _per_axis(alpha, dim)
    lam = _per_axis(lam, dim)
    for r, a, l_ in zip(R, alpha, lam):
        if r <= 0 or l_ <= 0:
            raise ValueError("R and lam must be positive")
        if r ** a < l_ ** a * (1 - 1e-12):
            raise ValueError(f"R = {r} violates R^alpha >= lam^alpha for alpha = {a}, lam = {l_}")
    Rp = tuple((r / l_) ** (-a) * r for r, a, l_ in zip(R, alpha, lam))
    if band is None:
        band = tuple((r, 2 * r) for r in R)
    else:
        band = tuple(tuple(float(v) for v in b) for b in (band if dim > 1 else [band]))
    for axis, ((lo, hi), rp) in enumerate(zip(band, Rp)):
        df = grid.resolution[axis]
        if rp < df:
            n_needed = int(np.ceil(grid.points[axis] * df / rp))
            raise LatticeResolutionError(
                f"cell width R' = {rp:g} is below the frequency spacing {df:g} on axis {axis}; "
                f"use a period of at least {1 / rp:g} (about {n_needed} points at this spacing)")
        top = grid.nyquist[axis] - df
        if lo > hi or max(abs(lo), abs(hi)) > top:
            raise ValueError(f"band {(lo, hi)} is not inside the grid frequency range |xi| <= {top:g}")
    ranges = []
    for (lo, hi), rp in zip(band, Rp):
        ks = set(range(int(np.floor(lo / rp - 1)) + 1, int(np.ceil(hi / rp + 1))))
        if symmetric:
            ks |= set(range(int(np.floor(-hi / rp - 1)) + 1, int(np.ceil(-lo / rp + 1))))
        ranges.append(sorted(ks))
    cells = np.array(list(product(*ranges)), dtype=int).reshape(-1, dim)
    return LatticeSpec(grid, R, Rp, alpha, lam, band, bool(symmetric), cells, suite)


def cell_symbol(lattice: LatticeSpec, k, sharp: bool = False) -> np.ndarray:
    """``Psi_hat_k`` on the grid frequencies; ``sharp`` gives ``chi_{rho_k}``."""
    k = np.atleast_1d(np.asarray(k, dtype=int))
    out = np.ones(lattice.grid.shape)
    for xi, rp, kj in zip(lattice.grid.freq_mesh(), lattice.R_prime, k):
        eta = xi / rp - kj
        if sharp:
            out = out * ((eta >= -0.5) & (eta < 0.5))
        else:
            out = out * lattice.suite.psi_hat(eta)
    return out


def _check_grid(f: SampledField, lattice: LatticeSpec):
    if f.grid != lattice.grid:
        raise ValueError("field and lattice live on different grids")


def apply_sk(f: SampledField, lattice: LatticeSpec, k, sharp: bool = False) -> SampledField:
    """``S_k f``: spectral multiplication by ``Psi_hat_k``."""
    _check_grid(f, lattice)
    lattice.index(k)
    F = forward_transform(f.as_signal())
    return inverse_transform(SpectralField(f.grid, F.coefficients * cell_symbol(lattice, k, sharp)))


def sk_stack(f: SampledField, lattice: LatticeSpec, sharp: bool = False,
             cells=None) -> np.ndarray:
    """All ``S_k f`` at once, shape ``(K,) + grid.shape``."""
    _check_grid(f, lattice)
    cells = lattice.cells if cells is None else cells
    F = forward_transform(f.as_signal()).coefficients
    out = np.empty((len(cells),) + f.grid.shape, dtype=complex)
    for i, k in enumerate(cells):
        out[i] = inverse_transform(SpectralField(f.grid, F * cell_symbol(lattice, k, sharp))).values
    return out


def strong_maximal(w: SampledField) -> SampledField:
    """``M_S``: ``eval_hl`` in 1D, the strong maximal function in 2D."""
    return eval_hl(w, 1) if w.grid.dim == 1 else eval_strong_2d(w)


def forward_square_check(f: SampledField, w: SampledField, lattice: LatticeSpec) -> float:
    """``int sum_k |S_k f|^2 w / int |f|^2 M_S w``."""
    den = float(np.sum(np.abs(f.values) ** 2 * strong_maximal(w).values))
    if not den > 0:
        raise ValueError("degenerate input: int |f|^2 M_S w vanishes")
    S = sk_stack(f, lattice)
    num = float(np.sum(np.sum(np.abs(S) ** 2, axis=0) * w.values))
    return num / den


def _reach_cells(t: float, h: float) -> int:
    return int(np.ceil(t / h - 1e-9))


def apply_arr(w: SampledField, lattice: LatticeSpec) -> SampledField:
    """``A_{R,R'} w``: averages over ``B(R)`` then suprema over centres in ``B(R')``."""
    vals = w.values
    g = w.grid
    for axis in range(g.dim):
        h = g.spacing[axis]
        vals = window_averages(vals, h, 1.0 / lattice.R[axis], axis=axis)
    for axis in range(g.dim):
        d = _reach_cells(1.0 / lattice.R_prime[axis], g.spacing[axis])
        vals = sliding_max(vals, min(d, g.points[axis]), axis=axis)
    return SampledField(g, np.clip(vals, 0.0, None), "weight")


def _spectral_filter(w: SampledField, symbol: np.ndarray) -> np.ndarray:
    F = forward_transform(w.as_signal()).coefficients
    return inverse_transform(SpectralField(w.grid, F * symbol)).values.real


def weight_chain(w: SampledField, lattice: LatticeSpec, suite: BumpSuite | None = None):
    """``(w1, w2, w3)`` with ``w1 = |Phi_R| * w``, ``w2`` its sup over ``B(R')``, ``w3 = Theta_R' * w2``."""
    _check_grid(w, lattice)
    suite = lattice.suite if suite is None else suite
    g = w.grid
    mesh = g.freq_mesh()
    phi_hat = np.ones(g.shape)
    theta_hat = np.ones(g.shape)
    for xi, r, rp in zip(mesh, lattice.R, lattice.R_prime):
        phi_hat = phi_hat * suite.phi_hat(xi / r)
        theta_hat = theta_hat * suite.theta_hat(xi / rp)
    Phi = inverse_transform(SpectralField(g, phi_hat.astype(complex))).values.real
    absphi = forward_transform(SampledField(g, np.abs(Phi))).coefficients
    w1 = np.clip(_spectral_filter(w, absphi), 0.0, None)
    w2 = w1
    for axis in range(g.dim):
        d = _reach_cells(1.0 / lattice.R_prime[axis], g.spacing[axis])
        w2 = sliding_max(w2, min(d, g.points[axis]), axis=axis)
    w2 = np.maximum(w2, w1)
    w3 = np.clip(_spectral_filter(SampledField(g, w2, "weight"), theta_hat), 0.0, None)
    return (SampledField(g, w1, "weight"), SampledField(g, w2, "weight"),
            SampledField(g, w3, "weight"))


def orthogonality_defect(f: SampledField, w3: SampledField, lattice: LatticeSpec,
                         separation: int | None = None) -> float:
    """Largest ``|<S_k f, S_k' f>_{L^2(w3)}|`` over cells ``separation`` or more apart.

    Normalised by ``||w3||_inf ||f||_2^2``.
    """
    sep = _orth_separation(lattice.suite) if separation is None else int(separation)
    S = sk_stack(f, lattice).reshape(len(lattice.cells), -1)
    G = (S * w3.values.reshape(1, -1)) @ S.conj().T * f.grid.cell_volume
    dist = np.abs(lattice.cells[:, None, :] - lattice.cells[None, :, :]).max(axis=2)
    far = dist >= sep
    if not far.any():
        return 0.0
    scale = float(w3.values.max()) * f.grid.cell_volume * float(np.sum(np.abs(f.values) ** 2))
    return float(np.abs(G[far]).max() / scale)


def chain_ratio(f: SampledField, w: SampledField, lattice: LatticeSpec) -> float:
    """``int |f|^2 w / int sum_k |S_k f|^2 w3``."""
    _, _, w3 = weight_chain(w, lattice)
    S = sk_stack(f, lattice)
    den = float(np.sum(np.sum(np.abs(S) ** 2, axis=0) * w3.values))
    return float(np.sum(np.abs(f.values) ** 2 * w.values)) / den


def _check_band(f: SampledField, lattice: LatticeSpec, tol: float = 1e-10):
    F = np.abs(forward_transform(f.as_signal()).coefficients)
    out = (F > tol * F.max()) & ~lattice.band_mask()
    if out.any():
        idx = np.argwhere(out)[:8]
        where = [tuple(float(f.grid.freqs(a)[i]) for a, i in enumerate(j)) for j in idx]
        raise FourierSupportError(
            f"{int(out.sum())} frequency bins lie outside the lattice band, e.g. {where}")


def reverse_square_check(f: SampledField, w: SampledField, lattice: LatticeSpec,
                         sharp: bool = False) -> float:
    """``int |f|^2 w / int sum_k |S_k f|^2 M_S A_{R,R'} M_S w``.

    ``sharp`` replaces ``Psi_hat_k`` by the indicator of ``rho_k``.
    """
    _check_grid(f, lattice)
    _check_band(f, lattice)
    big = strong_maximal(apply_arr(strong_maximal(w), lattice))
    S = sk_stack(f, lattice, sharp=sharp)
    den = float(np.sum(np.sum(np.abs(S) ** 2, axis=0) * big.values))
    if not den > 0:
        raise ValueError("degenerate input: the square-function side vanishes")
    return float(np.sum(np.abs(f.values) ** 2 * w.values)) / den


# ------------------------------------------------------ representation formulas

def _panels(freqs: np.ndarray, lo: float, hi: float, nodes: int):
    """Bin-aligned Gauss-Legendre panels on ``[lo, hi]``.

    Returns per panel ``(midpoint, nodes, weights)``; ``U_xi`` is constant on
    each panel because panel ends are grid frequencies.
    """
    inner = np.sort(freqs[(freqs > lo) & (freqs < hi)])
    edges = np.concatenate([[lo], inner, [hi]])
    t, wt = np.polynomial.legendre.leggauss(nodes)
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        out.append((0.5 * (a + b), 0.5 * (b - a) * t + 0.5 * (a + b), 0.5 * (b - a) * wt))
    return out


def _nodes_per_panel(quad_points: int, panels: int) -> int:
    return max(1, int(quad_points) // max(panels, 1))


def _require_smooth(m: MultiplierSpec, pts):
    for p in pts:
        if not np.all(np.isfinite(np.asarray(p))):
            raise ValueError("the multiplier derivative is singular inside the doubled cell")


def _require_uniform_support(m: MultiplierSpec, box):
    # a support edge inside the cell would put a jump (a point mass in m') there
    if m.support is None:
        return
    axes = [np.linspace(lo, hi, 257) for lo, hi in box]
    inside = np.asarray(m.support(*np.meshgrid(*axes, indexing="ij")))
    if inside.any() and not inside.all():
        raise ValueError("the multiplier's support edge crosses the doubled cell")


def representation_residual(m: MultiplierSpec, f: SampledField, lattice: LatticeSpec, k,
                            quad_points: int = 256, return_nodes: bool = False):
    """Relative residual of the representation of ``S_k T_m f``.

    1D: ``m(a_k) S_k f + int_{rho~_k} U_xi S_k f m'(xi) dxi``.  2D: the
    four-term version with anchor ``a_k``, the two edge integrals and the
    mixed-derivative area integral.  Each integral uses composite
    Gauss-Legendre panels aligned with the grid frequencies; ``quad_points``
    nodes per axis are shared evenly among the panels.
    """
    if quad_points < 64:
        raise ValueError("quad_points must be at least 64")
    if not m.has_closed_derivative:
        raise ValueError("representation_residual needs a closed-form derivative")
    _check_grid(f, lattice)
    if m.dim != lattice.dim:
        raise ValueError("multiplier and lattice dimensions differ")
    g = f.grid
    k = np.atleast_1d(np.asarray(k, dtype=int))
    lattice.index(k)
    Sk = apply_sk(f, lattice, k)
    box = lattice.doubled_cell(k)
    _require_uniform_support(m, box)
    a = [lo for lo, _ in box]
    psi = cell_symbol(lattice, k)
    F = forward_transform(f.as_signal()).coefficients * psi
    live = psi != 0
    mesh = np.broadcast_arrays(*g.freq_mesh())
    mvals = np.zeros(g.shape, dtype=complex)
    mvals[live] = m.value(*[x[live] for x in mesh])
    lhs = inverse_transform(SpectralField(g, F * mvals)).values
    panels = [_panels(g.freqs(ax), lo, hi, 1) for ax, (lo, hi) in enumerate(box)]
    q = [_nodes_per_panel(quad_points, len(p)) for p in panels]
    panels = [_panels(g.freqs(ax), lo, hi, qq) for ax, ((lo, hi), qq) in enumerate(zip(box, q))]

    if g.dim == 1:
        m_a = complex(m.value(np.array(a[0])))
        rhs = m_a * Sk.values
        for mid, x, wt in panels[0]:
            d = m.derivative(x)
            _require_smooth(m, [d])
            rhs = rhs + np.sum(wt * d) * halfline_projection(Sk, mid).values
    else:
        a1, a2 = a
        rhs = complex(m.value(np.array(a1), np.array(a2))) * Sk.values
        u1 = [(mid, halfline_projection(Sk, mid, axis=0)) for mid, _, _ in panels[0]]
        for (mid, x, wt), (_, U) in zip(panels[0], u1):
            d = m.partial(0, x, np.full_like(x, a2))
            _require_smooth(m, [d])
            rhs = rhs + np.sum(wt * d) * U.values
        for mid, x, wt in panels[1]:
            d = m.partial(1, np.full_like(x, a1), x)
            _require_smooth(m, [d])
            rhs = rhs + np.sum(wt * d) * halfline_projection(Sk, mid, axis=1).values
        for (mid1, x1, w1), (_, U) in zip(panels[0], u1):
            for mid2, x2, w2 in panels[1]:
                d = m.mixed(x1[:, None], x2[None, :])
                _require_smooth(m, [d])
                c = np.sum(w1[:, None] * w2[None, :] * d)
                rhs = rhs + c * halfline_projection(U, mid2, axis=1).values
    nrm = np.linalg.norm(lhs)
    if nrm == 0:
        nrm = np.linalg.norm(Sk.values)
    res = float(np.linalg.norm(lhs - rhs) / nrm) if nrm > 0 else 0.0
    if return_nodes:
        return res, [qq * len(p) for qq, p in zip(q, panels)]
    return res
