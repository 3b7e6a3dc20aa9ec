"""Configuration-driven check runner.

A run configuration is a JSON document::

    {"schema_version": 1, "seed": 0, "refine": true,
     "grid": {"points": 2048, "length": 64.0},
     "checks": [{"type": "atom_test", "id": "atoms_a2", "params": {...}}, ...]}

Every check is validated before any numerical work starts; the first
invalid field is reported by its path, e.g. ``checks[2].params.p``.
Reports are deterministic given the configuration: seeds are explicit and
nothing time-dependent is recorded, except by the ``linear_time`` check.
"""
from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable

import numpy as np

from . import __version__
from .fields import make_grid
from .maximal import ConfigurationError, Region, RegionSpec, parse_chain
from .multipliers import KabSpec, build_multiplier, multiplier_dim
from .suites import ORACLE_OPS, lattice_identities, linear_time_benchmark, oracle_equivalence
from .verify import (SweepSpec, VerificationReport, arr_domination_check, atom_test,
                     constant_study, duality_check, estimate_lplq_norm, holder_check,
                     stilldom_check, verify_applSj, verify_main1, verify_main3, verify_scaling)
from .weights import WeightSpec, weight_suite

__all__ = [
    "SCHEMA_VERSION",
    "CHECKS",
    "ConfigError",
    "RunConfig",
    "ReportBundle",
    "load_config",
    "default_config",
    "validate_config",
    "run",
]

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid configuration; ``path`` locates the first offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# ---------------------------------------------------------------- readers

class _Params:
    """Typed access to a parameter record that remembers field paths."""

    def __init__(self, data: dict, path: str, defaults: dict | None = None):
        if not isinstance(data, dict):
            raise ConfigError(path, "expected an object")
        self.data = data
        self.path = path
        self.defaults = defaults or {}
        self.used = set()

    def _get(self, key, default):
        self.used.add(key)
        if key in self.data:
            return self.data[key]
        if key in self.defaults:
            return self.defaults[key]
        if default is _REQUIRED:
            raise ConfigError(f"{self.path}.{key}", "missing required field")
        return default

    def number(self, key, default=None, lo=None, hi=None, lo_open=False):
        v = self._get(key, default)
        if v is None:
            return None
        if isinstance(v, str) and v in ("inf", "Infinity"):
            v = float("inf")
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{self.path}.{key}", f"expected a number, got {v!r}")
        v = float(v)
        if np.isnan(v):
            raise ConfigError(f"{self.path}.{key}", "NaN is not allowed")
        if lo is not None and (v < lo or (lo_open and v == lo)):
            raise ConfigError(f"{self.path}.{key}", f"must be {'>' if lo_open else '>='} {lo}")
        if hi is not None and v > hi:
            raise ConfigError(f"{self.path}.{key}", f"must be <= {hi}")
        return v

    def integer(self, key, default=None, lo=None):
        v = self._get(key, default)
        if v is None:
            return None
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{self.path}.{key}", f"expected an integer, got {v!r}")
        if lo is not None and v < lo:
            raise ConfigError(f"{self.path}.{key}", f"must be >= {lo}")
        return v

    def boolean(self, key, default=None):
        v = self._get(key, default)
        if not isinstance(v, bool):
            raise ConfigError(f"{self.path}.{key}", f"expected true or false, got {v!r}")
        return v

    def raw(self, key, default=None):
        return self._get(key, default)

    def finish(self):
        extra = sorted(set(self.data) - self.used)
        if extra:
            raise ConfigError(f"{self.path}.{extra[0]}", "unknown field")


_REQUIRED = object()


def _grid(p: _Params, key="grid", dim=None):
    g = _Params(p.raw(key, _REQUIRED), f"{p.path}.{key}")
    n = g.integer("points", _REQUIRED, lo=8)
    if n & (n - 1):
        raise ConfigError(f"{g.path}.points", "must be a power of two")
    length = g.number("length", _REQUIRED, lo=0, lo_open=True)
    d = g.integer("dim", 1 if dim is None else dim, lo=1)
    if d not in (1, 2) or (dim is not None and d != dim):
        raise ConfigError(f"{g.path}.dim", f"expected {dim if dim else '1 or 2'}")
    off = g.boolean("offset", False)
    g.finish()
    return make_grid(n, length, offset=off, dim=d)


def _weights(p: _Params, key="weights", count=10):
    w = _Params(p.raw(key, {}), f"{p.path}.{key}")
    n = w.integer("count", count, lo=1)
    seed = w.integer("seed", 0, lo=0)
    ell = w.number("corr_length", 1.0, lo=0, lo_open=True)
    sig = w.number("sigma", 1.0, lo=0)
    adv = w.boolean("adversarial", True)
    w.finish()
    return weight_suite(n, seed=seed, corr_length=ell, sigma=sig, adversarial=adv)


def _sweep(p: _Params, key="sweep", parameter="nu", fit=True):
    s = _Params(p.raw(key, _REQUIRED), f"{p.path}.{key}")
    if "values" in s.data:
        vals = s.raw("values")
        if not isinstance(vals, list) or not vals:
            raise ConfigError(f"{s.path}.values", "expected a nonempty list")
        values = tuple(float(v) for v in vals)
    else:
        lo = s.integer("lo2", _REQUIRED)
        hi = s.integer("hi2", _REQUIRED)
        step = s.integer("step", 1, lo=1)
        if hi < lo:
            raise ConfigError(f"{s.path}.hi2", "must be >= lo2")
        values = tuple(2.0 ** np.arange(lo, hi + 1, step))
    s.finish()
    try:
        return SweepSpec(parameter, values, fit=fit)
    except ValueError as exc:
        raise ConfigError(s.path, str(exc)) from None


def _multiplier_spec(p: _Params, key="multiplier"):
    spec = p.raw(key, _REQUIRED)
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigError(f"{p.path}.{key}", "expected an object with a name")
    return spec


def _check_m(spec, path) -> int:
    try:
        return multiplier_dim(spec)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(path, f"invalid multiplier: {exc}") from None


def _chain(p: _Params, key="chain"):
    text = p.raw(key, _REQUIRED)
    if not isinstance(text, str):
        raise ConfigError(f"{p.path}.{key}", "expected a chain string")
    try:
        return parse_chain(text)
    except (ConfigurationError, ValueError) as exc:
        raise ConfigError(f"{p.path}.{key}", str(exc)) from None


# ---------------------------------------------------------------- checks
# Each preparer validates a parameter record and returns a zero-argument job.

def _prep_oracle(p, ctx):
    ops = p.raw("ops", list(ORACLE_OPS))
    if not isinstance(ops, list) or any(o not in ORACLE_OPS for o in ops):
        raise ConfigError(f"{p.path}.ops", f"expected a list drawn from {sorted(ORACLE_OPS)}")
    n = p.integer("weights", 25, lo=1)
    seed = p.integer("seed", ctx["seed"], lo=0)
    return lambda cid: oracle_equivalence(tuple(ops), n, seed, check_id=cid)


def _prep_lattice(p, ctx):
    q = p.raw("quad_points", [64, 128, 256, 512])
    if not isinstance(q, list) or not q or any(not isinstance(v, int) or v < 64 for v in q):
        raise ConfigError(f"{p.path}.quad_points", "expected integers >= 64")
    seed = p.integer("seed", ctx["seed"], lo=0)
    return lambda cid: lattice_identities(tuple(q), seed, check_id=cid)


def _prep_linear(p, ctx):
    small = p.integer("small", 2 ** 15, lo=256)
    large = p.integer("large", 2 ** 20, lo=256)
    radii = p.integer("radii", 80, lo=2)
    reps = p.integer("repeats", 7, lo=1)
    limit = p.number("limit", 40.0, lo=0, lo_open=True)
    if large <= small:
        raise ConfigError(f"{p.path}.large", "must exceed small")
    return lambda cid: linear_time_benchmark(small, large, radii, reps, limit, check_id=cid)


def _prep_lplq(p, ctx):
    alpha = p.number("alpha", _REQUIRED)
    beta = p.number("beta", _REQUIRED)
    lam = p.number("lam", 1.0, lo=0, lo_open=True)
    pp = p.number("p", _REQUIRED, lo=1, lo_open=True)
    q = p.number("q", _REQUIRED, lo=1, lo_open=True)
    if q < pp:
        raise ConfigError(f"{p.path}.q", "need p <= q")
    sweep = _sweep(p)
    trials = p.integer("random_trials", 4, lo=0)
    per = p.integer("per_octave", 16, lo=2)
    seed = p.integer("seed", ctx["seed"], lo=0)
    stage = Region(RegionSpec(alpha, lam), beta)
    return lambda cid: estimate_lplq_norm(stage, pp, q, sweep, trials, seed, per_octave=per,
                                          check_id=cid)


def _prep_atom(p, ctx):
    alpha = p.number("alpha", _REQUIRED)
    if alpha == 0:
        raise ConfigError(f"{p.path}.alpha", "alpha = 0 belongs to the lplq check")
    lam = p.number("lam", 1.0, lo=0, lo_open=True)
    sweep = _sweep(p, fit=False)
    per = p.integer("per_octave", 8, lo=2)
    refine = p.boolean("refine", ctx["refine"])
    return lambda cid: atom_test(RegionSpec(alpha, lam), sweep, per, refine, check_id=cid)


def _prep_constant(p, ctx):
    grid = _grid(p) if "grid" in p.data else ctx["grid"]()
    spec = _multiplier_spec(p)
    dim = _check_m(spec, f"{p.path}.multiplier")
    chain = _chain(p)
    if chain.dim is not None and chain.dim != grid.dim:
        raise ConfigError(f"{p.path}.chain", "chain and grid dimensions differ")
    if dim != grid.dim:
        raise ConfigError(f"{p.path}.multiplier", "multiplier and grid dimensions differ")
    weights = _weights(p)
    iters = p.integer("iters", 500, lo=1)
    refine = p.boolean("refine", ctx["refine"])

    def job(cid):
        return constant_study(cid, lambda g: build_multiplier(spec, g), chain, grid, weights,
                              refine=refine, iters=iters,
                              inputs={"multiplier": spec, "chain_text": p.data["chain"]})
    return job


def _prep_main1(p, ctx):
    grid = _grid(p) if "grid" in p.data else ctx["grid"]()
    spec = _multiplier_spec(p)
    if _check_m(spec, f"{p.path}.multiplier") != 1 or grid.dim != 1:
        raise ConfigError(f"{p.path}.multiplier", "main1 needs a 1D multiplier and grid")
    weights = _weights(p)
    iters = p.integer("iters", 500, lo=1)
    refine = p.boolean("refine", ctx["refine"])
    return lambda cid: verify_main1(build_multiplier(spec, grid), grid, weights, refine=refine,
                                    iters=iters, check_id=cid)


def _prep_applsj(p, ctx):
    a = p.number("a", _REQUIRED, lo=0, lo_open=True)
    b = p.number("b", _REQUIRED)
    try:
        k = KabSpec(a, b)
    except ValueError as exc:
        raise ConfigError(f"{p.path}.a", str(exc)) from None
    grid = _grid(p) if "grid" in p.data else ctx["grid"]()
    weights = _weights(p)
    iters = p.integer("iters", 500, lo=1)
    refine = p.boolean("refine", ctx["refine"])
    return lambda cid: verify_applSj(k, grid, weights, refine=refine, iters=iters, check_id=cid)


def _prep_scaling(p, ctx):
    beta = p.number("beta", _REQUIRED)
    ts = p.raw("t", [0.25, 1.0, 4.0])
    if not isinstance(ts, list) or not ts or any(
            isinstance(t, bool) or not isinstance(t, (int, float)) or t <= 0 for t in ts):
        raise ConfigError(f"{p.path}.t", "expected a list of positive times")
    grid = _grid(p) if "grid" in p.data else ctx["grid"]()
    weights = _weights(p)
    factor = p.number("factor", 4.0, lo=1)
    iters = p.integer("iters", 500, lo=1)
    return lambda cid: verify_scaling(beta, ts, grid, weights, factor, iters, check_id=cid)


def _prep_main3(p, ctx):
    grid = _grid(p, dim=2)
    spec = _multiplier_spec(p)
    if _check_m(spec, f"{p.path}.multiplier") != 2:
        raise ConfigError(f"{p.path}.multiplier", "main3 needs a 2D multiplier")
    weights = _weights(p)
    iters = p.integer("iters", 500, lo=1)
    refine = p.boolean("refine", ctx["refine"])
    separable = p.boolean("separable", False)
    if separable and (spec.get("name") != "tensor" or spec.get("restrict")):
        raise ConfigError(f"{p.path}.separable",
                          "needs a tensor multiplier with any restriction on its factors")

    def job(cid):
        factors = None
        if separable:
            factors = tuple(build_multiplier(f, grid.axis_grid(ax))
                            for ax, f in enumerate(spec["factors"]))
        return verify_main3(build_multiplier(spec, grid), grid, weights=weights, refine=refine,
                            iters=iters, factors=factors, check_id=cid)
    return job


def _prep_duality(p, ctx):
    grid = _grid(p) if "grid" in p.data else ctx["grid"]()
    slack = p.number("slack", 0.25, lo=0)
    weights = _weights(p, count=6)
    return lambda cid: duality_check(grid, slack, weights, check_id=cid)


def _prep_holder(p, ctx):
    grid = _grid(p) if "grid" in p.data else ctx["grid"]()
    alpha = p.number("alpha", 1.0, lo=0, lo_open=True)
    s = p.number("s", 2.0, lo=1, lo_open=True)
    weights = _weights(p, count=50)
    return lambda cid: holder_check(grid, alpha, s, weights, check_id=cid)


def _prep_stilldom(p, ctx):
    grid = _grid(p) if "grid" in p.data else ctx["grid"]()
    R = p.number("R", 2.0, lo=0, lo_open=True)
    alpha = p.number("alpha", 2.0)
    weights = _weights(p, count=50)
    refine = p.boolean("refine", ctx["refine"])
    return lambda cid: stilldom_check(grid, R, alpha, weights, refine, check_id=cid)


def _prep_arr(p, ctx):
    grid = _grid(p) if "grid" in p.data else ctx["grid"]()
    R = p.number("R", 2.0, lo=0, lo_open=True)
    alpha = p.number("alpha", 2.0)
    beta = p.number("beta", 1.0)
    weights = _weights(p, count=25)
    return lambda cid: arr_domination_check(grid, R, alpha, beta, weights, check_id=cid)


@dataclass(frozen=True)
class CheckInfo:
    name: str
    prepare: Callable
    summary: str


CHECKS = {c.name: c for c in (
    CheckInfo("oracle_equivalence", _prep_oracle,
              "fast maximal evaluators against brute-force oracles"),
    CheckInfo("linear_time", _prep_linear,
              "eval_region wall-time ratio between two grid sizes (not deterministic)"),
    CheckInfo("lplq", _prep_lplq,
              "L^p -> L^q boundedness of one region operator against the sharp lines"),
    CheckInfo("atom_test", _prep_atom,
              "L^1 norms of the regularised operator on odd atoms, with case envelopes"),
    CheckInfo("lattice_identities", _prep_lattice,
              "partition of unity, representation residuals, half-line identity"),
    CheckInfo("weighted_constant", _prep_constant,
              "best weighted constant for any multiplier and chain, with refinement"),
    CheckInfo("main1", _prep_main1,
              "1D class multiplier against HL^6 R(alpha, beta) HL^4"),
    CheckInfo("applSj", _prep_applsj,
              "oscillatory kernels K_ab: constants, envelope slope, L^2 bound"),
    CheckInfo("scaling", _prep_scaling,
              "Schrodinger constants across times with lam = t^-1/2 chains"),
    CheckInfo("main3", _prep_main3,
              "planar multiplier against S^9 R2(...) S^7, optional separable check"),
    CheckInfo("duality", _prep_duality,
              "multiplier 4-norm against the chain's L^2 norm"),
    CheckInfo("holder", _prep_holder,
              "pointwise region average against (M w^s)^{1/s}"),
    CheckInfo("stilldom", _prep_stilldom,
              "ratio w2 / w3 of the lattice weight chain"),
    CheckInfo("arr_domination", _prep_arr,
              "R^{-2 beta} A_{R,R'} w against the region operator"),
)}


# ---------------------------------------------------------------- config

@dataclass
class RunConfig:
    """Validated configuration: ``jobs`` pairs a check id with its prepared job."""

    raw: dict
    seed: int
    refine: bool
    output: str | None
    workers: int
    jobs: list = field(default_factory=list)


@dataclass
class ReportBundle:
    """Per-check reports, an environment stamp and the aggregate verdict."""

    reports: list
    environment: dict
    verdict: str

    def as_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "environment": self.environment,
                "verdict": self.verdict, "reports": [r.as_dict() for r in self.reports]}

    @classmethod
    def from_dict(cls, d: dict) -> "ReportBundle":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported bundle schema {d.get('schema_version')!r}")
        return cls([VerificationReport.from_dict(r) for r in d["reports"]],
                   d["environment"], d["verdict"])

    @property
    def exit_code(self) -> int:
        return {"pass": 0, "flagged": 2}.get(self.verdict, 1)


def aggregate(reports) -> str:
    verdicts = {r.verdict for r in reports}
    if "fail" in verdicts:
        return "fail"
    if "flagged" in verdicts:
        return "flagged"
    return "pass"


def load_config(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def default_config() -> dict:
    """The packaged configuration covering every verification target."""
    text = resources.files(__package__).joinpath("default_config.json").read_text("utf-8")
    return json.loads(text)


def validate_config(raw: Any, refine: bool | None = None, output: str | None = None,
                    workers: int | None = None) -> RunConfig:
    """Validate every field and prepare every job; no numerical work is done.

    ``refine``, ``output`` and ``workers`` override the document's values.
    """
    top = _Params(raw, "config")
    ver = top.integer("schema_version", _REQUIRED)
    if ver != SCHEMA_VERSION:
        raise ConfigError("config.schema_version", f"unsupported version {ver}; "
                                                   f"expected {SCHEMA_VERSION}")
    seed = top.integer("seed", 0, lo=0)
    # read document values first so they are validated even when overridden
    ref = top.boolean("refine", True)
    ref = ref if refine is None else bool(refine)
    out = top.raw("output", None)
    if out is not None and not isinstance(out, str):
        raise ConfigError("config.output", "expected a path string")
    out = out if output is None else output
    nw = top.integer("workers", 1, lo=1)
    nw = nw if workers is None else int(workers)
    if nw < 1:
        raise ConfigError("config.workers", "expected at least 1")
    top.raw("description", None)
    grid_raw = top.raw("grid", None)
    checks = top.raw("checks", [])
    if not isinstance(checks, list):
        raise ConfigError("config.checks", "expected a list")
    top.finish()
    ctx = _context(seed, ref, grid_raw)
    if grid_raw is not None:
        ctx["grid"]()
    jobs = []
    seen = set()
    for i, entry in enumerate(checks):
        cid, kind, job = _prepare_entry(entry, i, ctx)
        if cid in seen:
            raise ConfigError(f"checks[{i}].id", f"duplicate id {cid!r}")
        seen.add(cid)
        jobs.append((cid, kind, job))
    return RunConfig(raw, seed, ref, out, nw, jobs)


def _prepare_entry(entry: dict, index: int, ctx: dict):
    path = f"checks[{index}]"
    e = _Params(entry, path)
    kind = e.raw("type", _REQUIRED)
    if kind not in CHECKS:
        raise ConfigError(f"{path}.type", f"unknown check {kind!r}; see list-checks")
    cid = e.raw("id", f"{index:02d}_{kind}")
    if not isinstance(cid, str) or not cid or any(c in cid for c in "/\\ "):
        raise ConfigError(f"{path}.id", "expected a nonempty name without spaces or slashes")
    params = _Params(e.raw("params", {}), f"{path}.params")
    e.finish()
    job = CHECKS[kind].prepare(params, ctx)
    params.finish()
    return cid, kind, job


def _context(seed, refine, grid_raw):
    def default_grid():
        if grid_raw is None:
            raise ConfigError("config.grid", "a check needs a grid and none is set")
        return _grid(_Params({"grid": grid_raw}, "config"))
    return {"seed": seed, "refine": refine, "grid": default_grid, "grid_raw": grid_raw}


def _run_entry(args):
    # worker-side: jobs hold closures, so each process prepares its own
    entry, index, seed, refine, grid_raw = args
    cid, _, job = _prepare_entry(entry, index, _context(seed, refine, grid_raw))
    return job(cid)


def _timed(job, cid, timings):
    t0 = time.perf_counter()
    rep = job(cid)
    if timings is not None:
        timings[cid] = time.perf_counter() - t0
    return rep


def run(config: RunConfig | dict, timings: dict | None = None, **overrides) -> ReportBundle:
    """Run every check and aggregate.  Checks run in worker processes when ``workers > 1``.

    ``timings``, if given, receives the wall time of each check in serial runs;
    it is kept out of the bundle so the bundle stays reproducible.
    """
    cfg = config if isinstance(config, RunConfig) else validate_config(config, **overrides)
    if cfg.workers > 1 and len(cfg.jobs) > 1:
        grid_raw = cfg.raw.get("grid")
        tasks = [(entry, i, cfg.seed, cfg.refine, grid_raw)
                 for i, entry in enumerate(cfg.raw.get("checks", []))]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            reports = list(pool.map(_run_entry, tasks))
    else:
        reports = [_timed(job, cid, timings) for cid, _, job in cfg.jobs]
    env = {"package_version": __version__, "numpy_version": np.__version__,
           "seed": cfg.seed, "refine": cfg.refine, "grid": cfg.raw.get("grid"),
           "checks": [kind for _, kind, _ in cfg.jobs]}
    return ReportBundle(reports, env, aggregate(reports))
