"""
sample.py: Seeded Monte Carlo estimate of expected weight.
"""
import argparse
import logging

from liquidweight.commands.common import load_suspendible, targets
from liquidweight.config import settings
from liquidweight.services.lottery_sim import monte_carlo_expected_weight
from liquidweight.services.reports import render
from liquidweight.utils.logging import log_command

logger = logging.getLogger(__name__)


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        "sample",
        parents=parents,
        help="Monte Carlo expected weight",
        description="Output is byte-identical for the same graph, flags and seed, "
                    "whatever the number of workers.",
    )
    parser.add_argument("graph", help="Graph file, fixture name or generator")
    parser.add_argument("--target", default=None, help="Agent to estimate (default: every agent)")
    parser.set_defaults(func=cmd_sample)
    return parser


def cmd_sample(args: argparse.Namespace) -> int:
    samples = args.samples or settings.samples
    seed = settings.seed if args.seed is None else args.seed
    log_command("sample", graph=args.graph, target=args.target, samples=samples, seed=seed)
    _, sp = load_suspendible(args)
    rows = []
    for target in targets(sp, args.target):
        result = monte_carlo_expected_weight(sp, target, samples=samples, seed=seed, workers=args.workers)
        rows.append({"target": target, **result.model_dump()})
    print(render(rows, args.format or "table"), end="")
    return 0
