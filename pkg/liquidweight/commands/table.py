"""
table.py: Closed-form tables for chains, stars and single delegation paths.
"""
import argparse
import logging

from liquidweight.commands.common import probability
from liquidweight.services.influence import (
    expected_weight_chain,
    expected_weight_chain_limit,
    expected_weight_star,
    path_contribution,
    path_contribution_limit,
)
from liquidweight.services.reports import FORMATS, render
from liquidweight.utils.logging import log_command

logger = logging.getLogger(__name__)

KINDS = ("chain-limit", "chain", "star", "path")

# voting probabilities of the long-chain table
CHAIN_LIMIT_GRID = (0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 0.8)


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return value


def add_parser(subparsers, parents) -> argparse.ArgumentParser:
    # --p takes a list here, so the shared parent flags are not inherited
    parser = subparsers.add_parser(
        "table",
        help="Closed-form expected votes",
        description="chain-limit: 1/p; chain: terminal voter of n delegators; "
                    "star: hub with k delegators; path: contribution of one path of length n.",
    )
    parser.add_argument("kind", nargs="?", choices=KINDS, default="chain-limit")
    parser.add_argument("--p", type=probability, nargs="+", default=None, help="Voting probabilities")
    parser.add_argument("--n", type=_count, nargs="+", default=None, help="Chain or path lengths")
    parser.add_argument("--k", type=_count, nargs="+", default=None, help="Number of direct delegators")
    parser.add_argument("--format", choices=FORMATS, default="csv", help="Output format")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.set_defaults(func=cmd_table)
    return parser


def build_rows(kind: str, ps=None, ns=None, ks=None) -> list:
    if kind == "chain-limit":
        return [{"p": p, "expected_votes": expected_weight_chain_limit(p)} for p in (ps or CHAIN_LIMIT_GRID)]
    ps = ps or [0.5]
    if kind == "chain":
        return [{"n": n, "p": p, "expected_votes": expected_weight_chain(n, p)}
                for n in (ns if ns is not None else [1, 2, 3, 4, 5, 6]) for p in ps]
    if kind == "star":
        return [{"k": k, "p": p, "expected_votes": expected_weight_star(k, p)}
                for k in (ks if ks is not None else [6]) for p in ps]
    return [
        {"length": n, "p": p, "contribution": path_contribution(n, p), "limit": path_contribution_limit(p)}
        for n in (ns or [1, 2, 3]) for p in ps
    ]


def cmd_table(args: argparse.Namespace) -> int:
    log_command("table", kind=args.kind, p=args.p, n=args.n, k=args.k)
    rows = build_rows(args.kind, args.p, args.n, args.k)
    print(render(rows, args.format), end="")
    return 0
