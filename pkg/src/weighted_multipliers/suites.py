"""Report-producing checks for the engine and lattice identities.

These wrap the oracle comparisons, the lattice partition and representation
identities, and the linear-time benchmark in :class:`VerificationReport`
records so the runner and the test suite share one code path.
"""
from __future__ import annotations

import time

import numpy as np

from .fields import (SampledField, halfline_projection, halfline_via_hilbert, make_grid)
from .lattice import apply_arr, build_lattice, cell_symbol, representation_residual
from .maximal import (RegionSpec, eval_fractional, eval_hl, eval_region, eval_region_2d,
                      eval_strong_2d)
from .multipliers import make_miyachi, make_tensor_2d
from .oracles import (oracle_arr, oracle_fractional, oracle_hl, oracle_region,
                      oracle_region_2d, oracle_strong_2d)
from .verify import VerificationReport, _table, fit_slope
from .weights import lognormal_weight, random_signal

__all__ = [
    "ORACLE_OPS",
    "oracle_compare",
    "oracle_equivalence",
    "lattice_identities",
    "linear_time_benchmark",
]

ORACLE_TOL = 1e-12


def _weight(grid, seed):
    # alternate smooth log-normal fields with i.i.d. heavy-tailed cell values
    if seed % 2:
        rng = np.random.default_rng(seed)
        return SampledField(grid, rng.lognormal(0.0, 1.5, grid.shape), "weight")
    return lognormal_weight(grid, seed, corr_length=8 * max(grid.spacing), sigma=1.5)


def _op_hl(w, p):
    k = int(p.get("k", 1))
    return eval_hl(w, k).values, oracle_hl(w, k)


def _op_fractional(w, p):
    b = float(p.get("beta", 0.25))
    return eval_fractional(w, b).values, oracle_fractional(w, b)


def _op_region(w, p):
    reg = RegionSpec(float(p.get("alpha", 2.0)), float(p.get("lam", 1.0)))
    b = float(p.get("beta", 0.5))
    return eval_region(w, reg, b).values, oracle_region(w, reg, b)


def _op_region_2d(w, p):
    regs = tuple(RegionSpec(float(a)) for a in p.get("alpha", (2.0, -1.0)))
    betas = tuple(float(b) for b in p.get("beta", (0.5, -0.25)))
    return eval_region_2d(w, regs, betas).values, oracle_region_2d(w, regs, betas)


def _op_strong_2d(w, p):
    return eval_strong_2d(w).values, oracle_strong_2d(w)


def _op_arr(w, p):
    lat = build_lattice(float(p.get("R", 2.0)), float(p.get("alpha", 2.0)), grid=w.grid,
                        symmetric=True)
    return apply_arr(w, lat).values, oracle_arr(w, lat.R[0], lat.R_prime[0])


ORACLE_OPS = {
    "eval_hl": (_op_hl, 1),
    "eval_fractional": (_op_fractional, 1),
    "eval_region": (_op_region, 1),
    "eval_region_2d": (_op_region_2d, 2),
    "eval_strong_2d": (_op_strong_2d, 2),
    "apply_arr": (_op_arr, 1),
}


def oracle_compare(op: str, weights: int = 25, points: int | None = None,
                   length: float = 16.0, seed: int = 0, params: dict | None = None) -> dict:
    """Largest relative gap between an evaluator and its brute-force oracle."""
    if op not in ORACLE_OPS:
        raise ValueError(f"unknown engine op {op!r}; expected one of {sorted(ORACLE_OPS)}")
    fn, dim = ORACLE_OPS[op]
    n = points if points is not None else (256 if dim == 1 else 32)
    grid = make_grid(n, length, dim=dim)
    worst = 0.0
    for i in range(weights):
        fast, slow = fn(_weight(grid, seed + i), params or {})
        gap = float(np.max(np.abs(fast - slow) / np.maximum(np.abs(slow), 1e-300)))
        worst = max(worst, gap)
    return {"op": op, "points": n, "weights": weights, "max_relative_gap": worst}


def oracle_equivalence(ops=tuple(ORACLE_OPS), weights: int = 25, seed: int = 0,
                       check_id: str = "oracle_equivalence") -> VerificationReport:
    """Every listed evaluator against its oracle on ``weights`` seeded weights.

    Both sides share the radius net and reach; the tolerance only absorbs
    the difference between prefix-sum and overlap-matrix rounding.
    """
    rows = []
    for op in ops:
        r = oracle_compare(op, weights, seed=seed)
        rows.append([op, r["points"], r["weights"], r["max_relative_gap"]])
    worst = max((r[3] for r in rows), default=0.0)
    rep = VerificationReport(check_id)
    rep.inputs = {"ops": list(ops), "weights": weights, "seed": seed}
    rep.scalars = {"max_relative_gap": worst}
    rep.tables["oracles"] = _table(["op", "points", "weights", "max_relative_gap"], rows)
    rep.tolerance = {"relative_gap": ORACLE_TOL}
    rep.provenance = {"max_relative_gap": "fast evaluator against explicit overlap-matrix "
                                          "averages and explicit centre loops"}
    rep.verdict = "pass" if worst <= ORACLE_TOL else "fail"
    return rep


def _partition_error(lattice) -> float:
    total = sum(cell_symbol(lattice, k) for k in lattice.cells)
    return float(np.max(np.abs(total[lattice.band_mask()] - 1)))


def lattice_identities(quad_points=(64, 128, 256, 512), seed: int = 0,
                       check_id: str = "lattice_identities") -> VerificationReport:
    """Partition of unity, representation residuals and the half-line identity.

    1D: ``N = 1024``, ``L = 64``, ``R = 2``, ``alpha = 2``, tested on the
    middle cell of the positive band with the restricted Miyachi symbol.
    2D: ``64 x 64``, ``L = 8``, ``R = 1.5`` per axis, tensor Miyachi.  The
    residual must reach the 1e-6 / 1e-5 bars at 256 nodes and, until it
    meets the rounding floor, fall at least fourfold per doubling.
    """
    rep = VerificationReport(check_id)
    floor = 1e-12
    ok = True
    rows = []
    m1 = make_miyachi(2.0, 1.0)
    setups = [
        ("1d", make_grid(1024, 64.0), 2.0, m1, 1e-6),
        ("2d", make_grid(64, 8.0, dim=2), 1.5, make_tensor_2d(m1, m1), 1e-5),
    ]
    for name, grid, R, m, bar in setups:
        lat = build_lattice(R, 2.0, grid=grid, symmetric=True)
        part = _partition_error(lat)
        band = (R, 2 * R) if grid.dim == 1 else ((R, 2 * R), (R, 2 * R))
        f = random_signal(grid, seed, band=band)
        pos = [k for k in lat.cells if np.all(k > 0)]
        k = pos[len(pos) // 2]
        res = [representation_residual(m, f, lat, k, quad_points=q) for q in quad_points]
        at256 = res[list(quad_points).index(256)] if 256 in quad_points else res[-1]
        rates_ok = all(b <= a / 4 or b <= floor for a, b in zip(res, res[1:]))
        rows += [[name, q, r] for q, r in zip(quad_points, res)]
        rep.scalars[f"partition_error_{name}"] = part
        rep.scalars[f"residual_{name}_256"] = at256
        rep.scalars[f"cells_{name}"] = int(len(lat.cells))
        ok = ok and part <= 1e-10 and at256 <= bar and rates_ok
        rep.scalars[f"rate_ok_{name}"] = rates_ok
    g = make_grid(1024, 64.0)
    f = random_signal(g, seed + 1)
    xi0 = 1.3 + 0.5 * g.resolution[0]
    hl = float(np.linalg.norm(halfline_projection(f, xi0).values
                              - halfline_via_hilbert(f, xi0).values) / np.linalg.norm(f.values))
    rep.scalars["halfline_hilbert_residual"] = hl
    ok = ok and hl <= 1e-10
    rep.inputs = {"quad_points": list(quad_points), "seed": seed,
                  "multipliers": ["miyachi(2, 1)", "miyachi(2, 1) x miyachi(2, 1)"]}
    rep.tables["residuals"] = _table(["case", "quad_points", "residual"], rows)
    rep.tolerance = {"partition": 1e-10, "residual_1d": 1e-6, "residual_2d": 1e-5,
                     "per_doubling_drop": 4.0, "rounding_floor": floor, "halfline": 1e-10}
    rep.provenance = {"residual": "relative L2 gap between the spectral S_k T_m f and the "
                                  "quadrature form of the representation",
                      "halfline_hilbert_residual": "spectral half-line cut against the "
                                                   "modulated Hilbert transform form"}
    rep.verdict = "pass" if ok else "fail"
    return rep


def linear_time_benchmark(small: int = 2 ** 15, large: int = 2 ** 20, radii: int = 80,
                          repeats: int = 7, limit: float = 40.0,
                          check_id: str = "linear_time") -> VerificationReport:
    """Best-of-``repeats`` wall time of ``eval_region`` at two sizes, ``radii`` radii each.

    The radius net is fixed to ``radii`` points between one cell of the
    large grid and a quarter period, so both sizes scan the same radii.
    Timing numbers are not deterministic; keep this out of reproducibility runs.
    """
    L = 64.0
    # alpha = 2 caps radii at 1; spread ``radii`` points from one fine cell up to it
    lo, hi = L / large, 1.0
    ratio = (hi / lo) ** (1.0 / (radii - 1)) * (1 + 1e-12)
    region = RegionSpec(2.0, r_min=lo, r_max=hi, r_ratio=ratio)
    times = []
    counts = []
    for n in (small, large):
        w = lognormal_weight(make_grid(n, L), 0, corr_length=1.0)
        eval_region(w, region, 0.5)  # compile and warm caches
        best = np.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            eval_region(w, region, 0.5)
            best = min(best, time.perf_counter() - t0)
        times.append(best)
        from .maximal import radius_grid
        counts.append(int(radius_grid(region, L / n, L).size))
    ratio_t = times[1] / times[0]
    rep = VerificationReport(check_id)
    rep.inputs = {"small": small, "large": large, "radii": radii, "repeats": repeats}
    rep.scalars = {"time_small": times[0], "time_large": times[1], "time_ratio": ratio_t,
                   "size_ratio": large / small, "radii_small": counts[0],
                   "radii_large": counts[1]}
    s, e = fit_slope([small, large], times)
    rep.slopes = {"time_vs_n": {"slope": s, "stderr": e}}
    rep.tolerance = {"time_ratio": limit}
    rep.verdict = "pass" if ratio_t <= limit else "fail"
    return rep
