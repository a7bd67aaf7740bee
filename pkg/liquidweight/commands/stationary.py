"""
stationary.py: Stationary weight distribution, structural and by power iteration.
"""
import argparse
import logging

from liquidweight.commands.common import load_suspendible, positive_int
from liquidweight.config import settings
from liquidweight.services.reports import build_stationary_report, render
from liquidweight.utils.logging import log_command

logger = logging.getLogger(__name__)


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        "stationary",
        parents=parents,
        help="Stationary weight distribution",
        description="Analytic and power-iteration stationary distributions, their largest "
                    "difference and the delegation-matrix row-sum check.",
    )
    parser.add_argument("graph", help="Graph file, fixture name or generator")
    parser.add_argument("--max-iters", type=positive_int, default=None,
                        help=f"Power iteration limit (default {settings.max_iters})")
    parser.set_defaults(func=cmd_stationary)
    return parser


def cmd_stationary(args: argparse.Namespace) -> int:
    log_command("stationary", graph=args.graph, issue=args.issue, p=args.p, tolerance=args.tolerance)
    _, sp = load_suspendible(args)
    tolerance = args.tolerance or settings.tolerance
    report = build_stationary_report(sp, tolerance, max_iters=args.max_iters, issue=args.issue)
    print(render(report, args.format or "table"), end="")
    return 0
