"""Command-line entry point: ``nondissipative run|validate|list-scenarios``.

Exit codes: 0 success, 2 invalid configuration or arguments, 1 I/O or
runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

from . import __version__
from .config import GRID_KEYS, SCENARIOS, read_config
from .exceptions import InvalidParameterError
from .monte_carlo import MCSettings
from .scenarios import run

OUTPUT_DIR_ENV = "NONDISSIPATIVE_OUTPUT_DIR"
MC_SCENARIOS = ("rabi-qed", "ion", "mc-check")

EXIT_OK, EXIT_IO, EXIT_CONFIG = 0, 1, 2


def _parser():
    p = argparse.ArgumentParser(prog="nondissipative", description="Averaged-evolution scenario runner.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the scenario described by a config file")
    r.add_argument("config", type=Path)
    r.add_argument("-o", "--output", type=Path, help="main CSV path (overrides [run] output)")
    r.add_argument("--seed", type=lambda s: int(s, 0), help="Monte Carlo seed")
    r.add_argument("--samples", type=int, help="Monte Carlo sample count; enables MC columns where supported")
    r.add_argument("-q", "--quiet", action="store_true", help="print nothing on success")

    v = sub.add_parser("validate", help="check a config file and list every problem")
    v.add_argument("config", type=Path)

    sub.add_parser("list-scenarios", help="list the scenarios and their parameters")
    return p


def _output_path(cfg, args) -> Path:
    if args.output is not None:
        return args.output
    name = Path(cfg.output_path) if cfg.output_path else Path(args.config.stem + ".csv")
    if name.is_absolute():
        return name
    base = os.environ.get(OUTPUT_DIR_ENV)
    return Path(base) / name if base else name


def _apply_mc_overrides(cfg, args):
    if args.seed is None and args.samples is None:
        return cfg
    if cfg.scenario not in MC_SCENARIOS:
        raise InvalidParameterError(f"scenario {cfg.scenario} has no Monte Carlo part; drop --seed/--samples")
    mc = cfg.mc or MCSettings()
    changes = {k: v for k, v in (("seed", args.seed), ("n_samples", args.samples)) if v is not None}
    return dataclasses.replace(cfg, mc=dataclasses.replace(mc, **changes))


def _cmd_run(args) -> int:
    try:
        cfg, diags = read_config(args.config)
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_IO
    if diags:
        for d in diags:
            print(f"{args.config}: {d}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = _apply_mc_overrides(cfg, args)
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = _output_path(cfg, args)
    try:
        report = run(cfg, out)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, RuntimeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO
    if not args.quiet:
        for path in report.outputs:
            print(f"wrote {path}")
        print(f"{cfg.scenario} finished in {report.wall_time_s:.3g} s")
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        cfg, diags = read_config(args.config)
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_IO
    if diags:
        for d in diags:
            print(f"{args.config}: {d}")
        print(f"{len(diags)} problem(s) found")
        return EXIT_CONFIG
    print(f"{args.config}: ok ({cfg.scenario})")
    return EXIT_OK


def _cmd_list() -> int:
    for sc in SCENARIOS.values():
        print(f"{sc.name}: {sc.summary}")
        for name, key in sc.params.items():
            req = "required" if key.default is None else f"default {key.default:g}"
            unit = {"frequency": "rad/s or _khz", "time": "s"}.get(key.kind, key.kind)
            doc = f" {key.doc}" if key.doc else ""
            print(f"    {name:<18} [{unit}; {req}]{doc}")
        start, stop = GRID_KEYS[sc.grid]
        print(f"    grid: {start}, {stop}, n_points")
        for group in sc.one_of:
            print(f"    exactly one of: {', '.join(group)}")
        if sc.needs_mc:
            print("    uses [mc] (defaults apply if absent)")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "validate":
        return _cmd_validate(args)
    return _cmd_list()


if __name__ == "__main__":
    sys.exit(main())
