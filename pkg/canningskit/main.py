"""CanningsKit command line."""
from __future__ import annotations

import argparse
import logging
import sys

from pydantic import ValidationError

from . import __version__
from .cli import SUBCOMMANDS
from .errors import EXIT_EXECUTION_ERROR, CanningsError
from .logging_setup import configure_logging

logger = logging.getLogger("canningskit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="canningskit", description="Genealogies and limit regimes of mixed multinomial Cannings models")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING (default from CANNINGS_LOG_LEVEL)")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in SUBCOMMANDS:
        module.register(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except CanningsError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except ValidationError as exc:
        details = "; ".join(f"{'.'.join(map(str, e['loc'])) or '<root>'}: {e['msg']}" for e in exc.errors())
        print(f"error: {details}", file=sys.stderr)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except Exception as exc:
        logger.exception("unexpected failure in %s", args.command)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_EXECUTION_ERROR


if __name__ == "__main__":
    sys.exit(main())
