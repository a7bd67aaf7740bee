"""
oracle.py: Compare analytic expected weight with exact enumeration over the
delegation-graph lottery.
"""
import argparse
import logging

from liquidweight.commands.common import load_suspendible, targets
from liquidweight.config import settings
from liquidweight.documents.schemas import OracleComparison
from liquidweight.services.influence import expected_weight
from liquidweight.services.lottery_sim import enumerate_expected_weight
from liquidweight.services.reports import render
from liquidweight.utils.exceptions import OracleMismatch
from liquidweight.utils.logging import log_command

logger = logging.getLogger(__name__)


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(
        "oracle",
        parents=parents,
        help="Analytic vs exact expected weight",
        description="Exits with status 2 when the two values differ by more than the tolerance.",
    )
    parser.add_argument("graph", help="Graph file, fixture name or generator")
    parser.add_argument("--target", default=None, help="Agent to check (default: every agent)")
    parser.set_defaults(func=cmd_oracle)
    return parser


def compare(sp, target: str) -> OracleComparison:
    psi = expected_weight(sp, target)
    phi = enumerate_expected_weight(sp, target)
    return OracleComparison(target=target, psi=psi, phi_exact=phi, abs_diff=abs(psi - phi))


def cmd_oracle(args: argparse.Namespace) -> int:
    log_command("oracle", graph=args.graph, target=args.target, p=args.p)
    _, sp = load_suspendible(args)
    tolerance = args.tolerance or settings.oracle_tolerance
    comparisons = [compare(sp, target) for target in targets(sp, args.target)]
    print(render(comparisons, args.format or "table"), end="")

    failed = [c.target for c in comparisons if c.abs_diff > tolerance]
    if failed:
        raise OracleMismatch(f"Expected weight differs from enumeration by more than {tolerance} for: "
                             f"{', '.join(failed)}")
    return 0
