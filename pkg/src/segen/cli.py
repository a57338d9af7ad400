"""Command line entry point: ``segen <sample|train|eval|run> [options]``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import FIELD_NAMES, PRESETS, ConfigError, read_config_file, resolve
from .pipeline import StageError, evaluate_file, run_experiment

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

_STAGES = {
    "sample": ("sample",),
    "train": ("sample", "train"),
    "run": ("sample", "train", "eval"),
}

_HELP = {
    "sample": "sample sub-network pools and dump them as text",
    "train": "sample, evolve and write embeddings plus fitness traces",
    "eval": "score an embeddings CSV (network recovery + community detection)",
    "run": "the whole pipeline",
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="segen", description="Sample-ensemble genetic evolutionary node embeddings.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("sample", "train", "eval", "run"):
        p = sub.add_parser(name, help=_HELP[name], description=_HELP[name])
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--preset", choices=sorted(PRESETS), help="parameter setting profile")
        if name == "eval":
            p.add_argument("--embeddings", required=True, help="embeddings CSV to score")
        for key in FIELD_NAMES:
            flags = [f"--{key}"]
            if "_" in key:
                flags.append(f"--{key.replace('_', '-')}")
            p.add_argument(*flags, dest=key, default=argparse.SUPPRESS, metavar=key.upper())
        p.add_argument("--graph", dest="graph_path", default=argparse.SUPPRESS, help="alias for --graph_path")
        p.add_argument("--output", dest="output_dir", default=argparse.SUPPRESS, help="alias for --output_dir")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cli_values = {k: v for k, v in vars(args).items() if k in FIELD_NAMES}
        file_values = read_config_file(args.config) if args.config else {}
        cfg = resolve(cli_values, file_values, args.preset)
    except (_UsageError, ConfigError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"usage error: cannot read config file: {exc}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "eval":
            evaluate_file(cfg, args.embeddings)
        else:
            run_experiment(cfg, _STAGES[args.command])
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC if isinstance(exc.error, FloatingPointError) else EXIT_DATA
    print(f"segen {args.command}: wrote artifacts to {os.path.abspath(cfg.output_dir)}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
