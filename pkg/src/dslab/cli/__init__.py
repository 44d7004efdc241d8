"""Command-line entry point: ``dslab {verify,surface,evolve,export}``.

Exit status: 0 success, 1 failed check / numerical failure, 2 configuration
or usage error.  The environment variable ``DSLAB_OUT`` overrides ``--out``.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from ..errors import ConfigError
from .commands import EXIT_USAGE, cmd_evolve, cmd_export, cmd_surface, cmd_verify
from .config import ScenarioConfig, load_config, parse_ints, with_overrides

__all__ = ["main", "ScenarioConfig", "load_config"]


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario INI file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="seed for randomized checks")
    common.add_argument("--grid", help="grid size NX,NY")
    common.add_argument("--level", type=int, choices=(1, 2, 3), help="hierarchy level of the flow")
    common.add_argument("--a3-variant", choices=("printed", "v1"), help="reading of the level-3 operator")
    common.add_argument("--projection", help="three coordinates i,j,k for OBJ output")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="dslab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run the invariant suite")
    sub.add_parser("surface", parents=[common], help="build a surface from initial spinors")
    sub.add_parser("evolve", parents=[common], help="run the coupled flow and record conserved quantities")
    ex = sub.add_parser("export", parents=[common], help="re-render plots and meshes from a run directory")
    ex.add_argument("run_dir", help="directory written by evolve or surface")
    return p


def _resolve(args) -> ScenarioConfig:
    cfg = load_config(args.config)
    grid = parse_ints(args.grid, 2, "--grid") if args.grid else None
    projection = parse_ints(args.projection, 3, "--projection") if args.projection else None
    out = os.environ.get("DSLAB_OUT") or args.out
    return with_overrides(
        cfg,
        grid=grid,
        level=args.level,
        seed=args.seed,
        a3_variant=args.a3_variant,
        projection=projection,
        out=out,
    )


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "export":
            projection = parse_ints(args.projection, 3, "--projection") if args.projection else (1, 2, 3)
            dest = os.environ.get("DSLAB_OUT") or args.out
            return cmd_export(args.run_dir, dest, projection)
        cfg = _resolve(args)
        return {"verify": cmd_verify, "surface": cmd_surface, "evolve": cmd_evolve}[args.command](cfg)
    except ConfigError as exc:
        print(f"dslab: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
