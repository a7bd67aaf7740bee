"""
main.py: CLI entry point. Sets up logging, builds the subcommand parser and
maps library errors to exit codes.
"""
import argparse
import sys
from typing import List, Optional

from dotenv import load_dotenv

from liquidweight import __version__
from liquidweight.commands import analyze, oracle, sample, stationary, table
from liquidweight.commands.common import common_parser
from liquidweight.config import settings
from liquidweight.utils.exceptions import LiquidWeightException
from liquidweight.utils.logging import log_error, logger, setup_logging

COMMANDS = (analyze, oracle, sample, table, stationary)

VERBOSITY = {0: None, 1: "INFO"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liquidweight",
        description="Influence measures for liquid-democracy delegation graphs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True
    parents = [common_parser()]
    for command in COMMANDS:
        command.add_parser(subparsers, parents)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse usage errors are validation failures; --help and --version exit 0
        return 0 if e.code in (0, None) else 1

    level = VERBOSITY.get(args.verbose, "DEBUG") or settings.log_level
    setup_logging(level, settings.log_file or None)
    for problem in settings.validate_settings():
        logger.warning(f"Configuration: {problem}")

    try:
        return args.func(args)
    except LiquidWeightException as e:
        logger.debug(f"{args.command} failed with {e.code}", exc_info=True)
        print(f"error[{e.code}]: {e.message}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        log_error(e, context=f"command {args.command}")
        print(f"error[internal]: {e}", file=sys.stderr)
        return 1


def cli() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli()
