"""Command-line entry point.

Subcommands map onto the pipeline stages plus the synthetic-world
generator. Failures print a machine-readable JSON object on stderr and
exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import NewsmacroError
from .pipeline import STAGES, run_pipeline
from .synthetic import WorldConfig, generate_world


def _add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="pipeline config JSON")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seeds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="newsmacro",
        description="News-emotion panels and macroeconomic forecasting")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate-synthetic",
                         help="write a synthetic corpus, labels and macro data")
    gen.add_argument("--out", required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--small", action="store_true",
                     help="one-country, growth-only world")

    for stage in STAGES:
        stage_parser = sub.add_parser(stage, help=f"run the {stage} stage")
        _add_run_arguments(stage_parser)
    run_all = sub.add_parser("run-all", help="run every stage in order")
    _add_run_arguments(run_all)
    run_all.add_argument("--stage", action="append", choices=STAGES,
                         default=None,
                         help="restrict to these stages (repeatable)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "generate-synthetic":
            config = WorldConfig.small(args.seed) if args.small \
                else WorldConfig(seed=args.seed)
            config_path = generate_world(config, args.out)
            print(config_path)
            return 0
        if args.command == "run-all":
            stages = tuple(getattr(args, "stage", None) or STAGES)
        else:
            stages = (args.command,)
        manifest = run_pipeline(args.config, args.out, stages, seed=args.seed)
        print(manifest)
        return 0
    except NewsmacroError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc),
                   "command": args.command}
        print(json.dumps(payload), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
