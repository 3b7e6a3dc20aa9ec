"""Command line entry point.

Subcommands::

    run <config|default> [--refine | --no-refine] [--output DIR] [--formats ...]
    list-checks
    oracle <engine-op> [--weights N] [--points N] [--seed S] [--param key=value ...]
    emit <bundle.json> [--formats ...] [--output DIR]

The output directory defaults to ``$WEIGHTED_MULTIPLIERS_OUTPUT`` or
``./wm_output``.  ``run`` exits 0 when every check passes, 2 when some
check is flagged and none failed, and 1 on a failed check or any error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .reports import FORMATS, emit, read_bundle
from .runner import CHECKS, ConfigError, default_config, load_config, run, validate_config
from .suites import ORACLE_OPS, ORACLE_TOL, oracle_compare

OUTPUT_ENV = "WEIGHTED_MULTIPLIERS_OUTPUT"


def _output_dir(arg, cfg_value=None) -> str:
    return arg or cfg_value or os.environ.get(OUTPUT_ENV) or "wm_output"


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _cmd_run(args) -> int:
    try:
        raw = default_config() if args.config == "default" else load_config(args.config)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = validate_config(raw, refine=args.refine, workers=args.workers)
    except ConfigError as exc:
        print(f"error: invalid config at {exc}", file=sys.stderr)
        return 1
    out = _output_dir(args.output, cfg.output)
    try:
        bundle = run(cfg)
        files = emit(bundle, out, args.formats)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for rep in bundle.reports:
        print(f"{rep.verdict:8s} {rep.check_id}")
    print(f"{bundle.verdict}: {len(bundle.reports)} checks, {len(files)} files in {out}")
    return bundle.exit_code


def _cmd_list(args) -> int:
    width = max(len(n) for n in CHECKS)
    for name, info in CHECKS.items():
        print(f"{name:{width}s}  {info.summary}")
    return 0


def _cmd_oracle(args) -> int:
    params = {}
    for item in args.param or []:
        if "=" not in item:
            print(f"error: --param expects key=value, got {item!r}", file=sys.stderr)
            return 1
        k, v = item.split("=", 1)
        params[k] = _parse_value(v)
    try:
        res = oracle_compare(args.op, args.weights, args.points, args.length, args.seed, params)
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    ok = res["max_relative_gap"] <= ORACLE_TOL
    print(json.dumps({**res, "tolerance": ORACLE_TOL, "match": ok}, sort_keys=True))
    return 0 if ok else 1


def _cmd_emit(args) -> int:
    try:
        bundle = read_bundle(args.bundle)
        files = emit(bundle, _output_dir(args.output), args.formats)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for f in files:
        print(f)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="weighted-multipliers",
                                 description="Run and report weighted multiplier checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a configuration ('default' for the packaged one)")
    r.add_argument("config")
    g = r.add_mutually_exclusive_group()
    g.add_argument("--refine", dest="refine", action="store_true", default=None,
                   help="rerun grid-based checks on the x2 grid")
    g.add_argument("--no-refine", dest="refine", action="store_false")
    r.add_argument("--output", help=f"output directory (default ${OUTPUT_ENV} or ./wm_output)")
    r.add_argument("--formats", nargs="+", choices=FORMATS, default=list(FORMATS))
    r.add_argument("--workers", type=int, default=None, help="worker processes")
    r.set_defaults(func=_cmd_run)

    ls = sub.add_parser("list-checks", help="list the check types a config may name")
    ls.set_defaults(func=_cmd_list)

    o = sub.add_parser("oracle", help="compare one evaluator with its brute-force oracle")
    o.add_argument("op", choices=sorted(ORACLE_OPS))
    o.add_argument("--weights", type=int, default=25)
    o.add_argument("--points", type=int, default=None)
    o.add_argument("--length", type=float, default=16.0)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--param", action="append", help="operator parameter, key=value (JSON value)")
    o.set_defaults(func=_cmd_oracle)

    e = sub.add_parser("emit", help="write tables, plots or JSON from a saved bundle")
    e.add_argument("bundle")
    e.add_argument("--formats", nargs="+", choices=FORMATS, default=["table", "plot"])
    e.add_argument("--output")
    e.set_defaults(func=_cmd_emit)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)
