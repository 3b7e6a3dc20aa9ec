"""Brute-force reference evaluators.

These share only the candidate set (radius net and reach in cells) with the
fast engine.  Window integrals come from explicit interval-cell overlaps and
the supremum over centres is an explicit loop, so cost is ``O(N^2)`` per
radius or worse.  Intended for ``N <= 256`` (1D) and ``32 x 32`` (2D).
"""
from __future__ import annotations

import numpy as np

from .fields import SampledField
from .maximal import RegionSpec, radius_grid, reach_cells

__all__ = [
    "overlap_matrix",
    "oracle_fractional",
    "oracle_hl",
    "oracle_region",
    "oracle_region_2d",
    "oracle_strong_2d",
    "oracle_arr",
]


def overlap_matrix(n: int, length: float, r: float) -> np.ndarray:
    """``A[i, j] = |[x_i - r, x_i + r] cap cell_j| / (2r)`` on the torus."""
    h = length / n
    x = -length / 2 + np.arange(n) * h
    A = np.zeros((n, n))
    reps = int(np.ceil((r + h) / length)) + 1
    for shift in range(-reps, reps + 1):
        c = x + shift * length
        lo = np.maximum(x[:, None] - r, c[None, :] - h / 2)
        hi = np.minimum(x[:, None] + r, c[None, :] + h / 2)
        A += np.clip(hi - lo, 0.0, None)
    return A / (2 * r)


def _window_max_1d(v, d):
    # enumerate every admissible centre offset explicitly
    n = v.shape[0]
    out = np.full(n, -np.inf)
    for t in range(-min(d, n), min(d, n) + 1):
        out = np.maximum(out, np.roll(v, -t))
    return out


def oracle_region(w: SampledField, region: RegionSpec, beta: float) -> np.ndarray:
    n, L, h = w.grid.points[0], w.grid.lengths[0], w.grid.spacing[0]
    radii = radius_grid(region, h, L)
    reach = reach_cells(region, radii, h)
    out = np.full(n, -np.inf)
    for r, d in zip(radii, reach):
        avg = overlap_matrix(n, L, r) @ w.values * r ** (2 * beta)
        out = np.maximum(out, _window_max_1d(avg, min(int(d), n)))
    return out


def oracle_fractional(w: SampledField, beta: float, region: RegionSpec | None = None) -> np.ndarray:
    reg = RegionSpec(0.0) if region is None else region
    n, L, h = w.grid.points[0], w.grid.lengths[0], w.grid.spacing[0]
    out = np.full(n, -np.inf)
    for r in radius_grid(reg, h, L):
        out = np.maximum(out, overlap_matrix(n, L, r) @ w.values * r ** (2 * beta))
    return out


def oracle_hl(w: SampledField, k: int = 1) -> np.ndarray:
    v = w
    for _ in range(k):
        v = SampledField(w.grid, oracle_fractional(v, 0.0), "weight")
    return v.values


def _rect_oracle(w, regions, betas, centred):
    (n1, n2), (L1, L2), (h1, h2) = w.grid.points, w.grid.lengths, w.grid.spacing
    r1s = radius_grid(regions[0], h1, L1)
    r2s = radius_grid(regions[1], h2, L2)
    d1s = reach_cells(regions[0], r1s, h1)
    d2s = reach_cells(regions[1], r2s, h2)
    out = np.full((n1, n2), -np.inf)
    A2s = [overlap_matrix(n2, L2, r) for r in r2s]
    for r1, d1 in zip(r1s, d1s):
        A1 = overlap_matrix(n1, L1, r1)
        for r2, d2, A2 in zip(r2s, d2s, A2s):
            B = A1 @ w.values @ A2.T * (r1 ** (2 * betas[0]) * r2 ** (2 * betas[1]))
            e1 = 0 if centred else min(int(d1), n1)
            e2 = 0 if centred else min(int(d2), n2)
            for t1 in range(-e1, e1 + 1):
                for t2 in range(-e2, e2 + 1):
                    out = np.maximum(out, np.roll(B, (-t1, -t2), axis=(0, 1)))
    return out


def oracle_region_2d(w: SampledField, regions, betas) -> np.ndarray:
    return _rect_oracle(w, tuple(regions), tuple(float(b) for b in betas), False)


def oracle_strong_2d(w: SampledField, region: RegionSpec | None = None) -> np.ndarray:
    reg = RegionSpec(0.0) if region is None else region
    return _rect_oracle(w, (reg, reg), (0.0, 0.0), True)


def oracle_arr(w: SampledField, R, Rp) -> np.ndarray:
    """``sup_{|y - x| <= 1/R'} avg_{|z - y| <= 1/R} w`` by explicit geometry (1D).

    Centres ``y`` range over grid points within the reach rounded outward.
    """
    n, L, h = w.grid.points[0], w.grid.lengths[0], w.grid.spacing[0]
    avg = overlap_matrix(n, L, 1.0 / float(R)) @ w.values
    d = int(np.ceil((1.0 / float(Rp)) / h - 1e-9))
    return _window_max_1d(avg, min(d, n))
