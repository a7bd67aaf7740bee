"""
fixtures.py: Bundled graph fixtures and chain/star generators.

Graph arguments on the command line are either existing files or names of
bundled fixtures (`figure2`, `figure2.json`) or generators (`chain-5`,
`star-10`).
"""
import logging
import os
import re
from pathlib import Path
from typing import List

from liquidweight.documents.parsing import EDGE_LIST_SUFFIXES, parse_graph
from liquidweight.documents.schemas import DelegationEntry, GraphDocument
from liquidweight.utils.exceptions import ValidationError, safe_execute

logger = logging.getLogger(__name__)

FIXTURE_DIR = os.path.abspath(os.path.join(os.path.dirname(os.path.dirname(__file__)), 'data', 'fixtures'))

_GENERATOR = re.compile(r"^(chain|star)-(\d+)$")


def list_fixtures() -> List[str]:
    return sorted(path.stem for path in Path(FIXTURE_DIR).glob("*.json"))


def load_fixture(name: str) -> GraphDocument:
    path = Path(FIXTURE_DIR) / f"{Path(name).stem}.json"
    if not path.is_file():
        raise ValidationError(
            f"No bundled fixture {name!r}; available: {', '.join(list_fixtures())}", code="unknown-graph"
        )
    return parse_graph(path.read_bytes())


def chain_document(n: int, default_probability: float = 0.5) -> GraphDocument:
    """n delegators x1 -> x2 -> ... -> xn -> t, with t the terminal endpoint"""
    width = len(str(max(n, 1)))
    names = [f"x{i:0{width}d}" for i in range(1, n + 1)] + ["t"]
    return GraphDocument(
        agents=names,
        delegations=[DelegationEntry(source=a, target=b) for a, b in zip(names, names[1:])],
        default_probability=default_probability,
    )


def star_document(k: int, default_probability: float = 0.5) -> GraphDocument:
    """k delegators s1..sk pointing directly at the endpoint `hub`"""
    width = len(str(max(k, 1)))
    leaves = [f"s{i:0{width}d}" for i in range(1, k + 1)]
    return GraphDocument(
        agents=["hub"] + leaves,
        delegations=[DelegationEntry(source=leaf, target="hub") for leaf in leaves],
        default_probability=default_probability,
    )


def resolve_graph(argument: str) -> GraphDocument:
    """Existing file first, then a generator spec, then a bundled fixture stem"""
    path = Path(argument)
    if path.is_file():
        fmt = "edges" if path.suffix.lower() in EDGE_LIST_SUFFIXES else "json"
        logger.debug(f"Reading graph from {path} ({fmt})")
        return parse_graph(safe_execute(path.read_bytes, error_message=f"Cannot read {path}"), fmt)

    match = _GENERATOR.match(argument)
    if match:
        kind, size = match.group(1), int(match.group(2))
        logger.debug(f"Generating {kind} graph of size {size}")
        return chain_document(size) if kind == "chain" else star_document(size)

    return load_fixture(argument)
