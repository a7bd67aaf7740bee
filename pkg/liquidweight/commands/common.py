"""
common.py: Flags shared by every subcommand and graph/probability loading.
"""
import argparse
import logging
from pathlib import Path
from typing import Optional, Tuple

from liquidweight.config import settings
from liquidweight.documents.parsing import load_probabilities
from liquidweight.documents.schemas import GraphDocument
from liquidweight.services.fixtures import resolve_graph
from liquidweight.services.influence import SuspendibleProfile
from liquidweight.services.reports import FORMATS
from liquidweight.utils.exceptions import ParseError, UnknownAgent, safe_execute

logger = logging.getLogger(__name__)


def probability(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"probability {value!r} outside [0, 1]")
    return value


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def seed_value(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value!r}")
    return value


def common_parser() -> argparse.ArgumentParser:
    """Parent parser: flags accepted after any subcommand"""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--p", type=probability, default=None,
                        help="Uniform voting probability; replaces the document's probabilities")
    parser.add_argument("--prob-file", default=None,
                        help="Per-agent probabilities, JSON object or agent,p CSV; applied last")
    parser.add_argument("--issue", default=None,
                        help="Issue to consolidate scoped delegations for")
    parser.add_argument("--seed", type=seed_value, default=None,
                        help=f"Monte Carlo seed (default {settings.seed})")
    parser.add_argument("--samples", type=positive_int, default=None,
                        help="Monte Carlo sample count")
    parser.add_argument("--workers", type=positive_int, default=None,
                        help="Threads for Monte Carlo chunks; output does not depend on it")
    parser.add_argument("--tolerance", type=positive_float, default=None,
                        help=f"Convergence / comparison tolerance (default {settings.tolerance})")
    parser.add_argument("--format", choices=FORMATS, default=None,
                        help="Output format")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="Log progress to stderr (-vv for debug)")
    return parser


def read_probability_file(path: str) -> dict:
    file = Path(path)
    if not file.is_file():
        raise ParseError(f"Probability file not found: {path}")
    fmt = "json" if file.suffix.lower() == ".json" else "csv"
    return load_probabilities(safe_execute(file.read_bytes, error_message=f"Cannot read {path}"), fmt)


def load_suspendible(args: argparse.Namespace) -> Tuple[GraphDocument, SuspendibleProfile]:
    """
    Probability precedence: --p replaces the document's values; --prob-file
    entries apply last. Without --p the document's per-agent probabilities
    win over its default_probability, which wins over the configured default.
    """
    document = resolve_graph(args.graph)
    overrides: Optional[dict] = read_probability_file(args.prob_file) if args.prob_file else None
    if overrides:
        unknown = sorted(set(overrides) - set(document.agents))
        if unknown:
            raise UnknownAgent(unknown[0], context="graph; named in the probability file")
    sp = document.to_suspendible(
        issue=args.issue,
        uniform=args.p,
        overrides=overrides,
        fallback=settings.default_probability,
    )
    logger.debug(f"Loaded {args.graph}: {sp.profile.n} agents, {len(sp.profile.edges())} delegations")
    return document, sp


def targets(sp: SuspendibleProfile, target: Optional[str]) -> Tuple[str, ...]:
    if target is None:
        return sp.agents
    sp.profile.proxy(target)
    return (target,)
