"""Command-line entry point: ``specabs <study> [--config FILE] [overrides]``.

Exit codes: 0 on success, 2 on configuration errors, 3 on numerical failures.
"""

from __future__ import annotations

import argparse
import sys

from .exceptions import ConfigurationError, InsufficientDataError, NumericalFailure
from .studies import KEYS, STUDIES, parse_config, parse_config_text, run_study

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specabs",
        description="Polynomial approximation studies of spectral abscissae.")
    parser.add_argument("study", choices=STUDIES)
    parser.add_argument("--config", help="key=value study file")
    for key in KEYS:
        if key == "study":
            continue
        parser.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None,
                            help=f"override the {key} key")
    parser.add_argument("--timing", action="store_true",
                        help="record wall-clock times (makes output non-reproducible)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {key: getattr(args, key) for key in KEYS if key != "study"}
    try:
        if args.config:
            spec = parse_config(args.config, overrides)
            if spec.study != args.study:
                raise ConfigurationError(
                    f"study: command asks for {args.study!r} but the config says {spec.study!r}")
        else:
            spec = parse_config_text(f"study={args.study}", overrides)
        result = run_study(spec, timing=args.timing) if args.timing else run_study(spec)
        data = result.write()
    except ConfigurationError as exc:
        print(f"specabs: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, InsufficientDataError, FloatingPointError) as exc:
        print(f"specabs: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if not spec.out:
        sys.stdout.write(data)
    if result.text:
        print(result.text, file=sys.stderr if not spec.out else sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
