"""
analyze.py: Potential, expected and stationary weight for every agent.
"""
import argparse
import logging

from liquidweight.commands.common import load_suspendible
from liquidweight.config import settings
from liquidweight.services.reports import build_report, render
from liquidweight.utils.logging import log_command

logger = logging.getLogger(__name__)


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        "analyze",
        parents=parents,
        help="Per-agent influence report",
        description="Potential, expected and stationary weight for every agent; "
                    "--samples adds a Monte Carlo column.",
    )
    parser.add_argument("graph", help="Graph file, fixture name (figure2) or generator (chain-5, star-10)")
    parser.set_defaults(func=cmd_analyze)
    return parser


def cmd_analyze(args: argparse.Namespace) -> int:
    log_command("analyze", graph=args.graph, issue=args.issue, p=args.p, samples=args.samples)
    _, sp = load_suspendible(args)
    tolerance = args.tolerance or settings.tolerance
    seed = settings.seed if args.seed is None else args.seed
    report = build_report(sp, tolerance, samples=args.samples, seed=seed, workers=args.workers, issue=args.issue)
    print(render(report, args.format or "table"), end="")
    return 0
