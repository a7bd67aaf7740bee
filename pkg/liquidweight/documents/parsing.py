"""
parsing.py: Graph document and probability file readers and writers.

Two graph formats are accepted: the JSON document schema (see
documents/schemas.py and data/fixtures/) and a plain edge list with one
`from,to` pair per line.
"""
import csv
import io
import json
import logging
from typing import Dict, Union

from pydantic import ValidationError as SchemaError

from liquidweight.documents.schemas import GraphDocument
from liquidweight.utils.exceptions import InvalidProbability, ParseError, ValidationError

logger = logging.getLogger(__name__)

EDGE_LIST_SUFFIXES = (".csv", ".txt", ".edges")


def _decode(text: Union[str, bytes]) -> str:
    if isinstance(text, bytes):
        try:
            return text.decode("utf-8")
        except UnicodeDecodeError as e:
            line = text.count(b"\n", 0, e.start) + 1
            column = e.start - (text.rfind(b"\n", 0, e.start) + 1) + 1
            raise ParseError(f"Input is not UTF-8: {e.reason}", line=line, column=column) from None
    return text


def _schema_error(error: SchemaError) -> ValidationError:
    details = "; ".join(
        f"{'.'.join(str(part) for part in issue['loc']) or '<document>'}: {issue['msg']}"
        for issue in error.errors()
    )
    return ValidationError(f"Document does not match the graph schema: {details}", code="schema")


def parse_graph(text: Union[str, bytes], fmt: str = "json") -> GraphDocument:
    """Parse and validate a graph document ("json") or edge list ("edges")"""
    text = _decode(text)
    if fmt == "edges":
        return parse_edge_list(text)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"Malformed JSON: {e.msg}", e.lineno, e.colno) from None
    if not isinstance(data, dict):
        raise ParseError("Graph document must be a JSON object", 1, 1)
    try:
        document = GraphDocument.model_validate(data)
    except SchemaError as e:
        raise _schema_error(e) from None
    logger.debug(f"Parsed graph document: {len(document.agents)} agents, {len(document.delegations)} delegations")
    return document


def parse_edge_list(text: Union[str, bytes]) -> GraphDocument:
    """
    `from,to` per line; `#` starts a comment; a line with a single id
    declares an agent without delegation. Agents are inferred in order of
    first appearance.
    """
    text = _decode(text)
    agents: Dict[str, None] = {}
    delegations = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [field.strip() for field in line.split(",")]
        if len(fields) > 2 or any(not field for field in fields):
            raise ParseError(f"Expected `from,to` or a single agent id, got {raw.strip()!r}", number)
        for agent in fields:
            agents.setdefault(agent)
        if len(fields) == 2:
            delegations.append({"from": fields[0], "to": fields[1]})
    if not agents:
        raise ParseError("Edge list declares no agents")
    try:
        return GraphDocument.model_validate({"agents": list(agents), "delegations": delegations})
    except SchemaError as e:
        raise _schema_error(e) from None


def serialize_graph(document: GraphDocument) -> str:
    """Canonical JSON rendering; parse_graph(serialize_graph(d)) == d"""
    return json.dumps(document.model_dump(by_alias=True, mode="json"), indent=2, sort_keys=True) + "\n"


def load_probabilities(text: Union[str, bytes], fmt: str = "json") -> Dict[str, float]:
    """Per-agent voting probabilities from JSON ({"agent": p}) or CSV (agent,p)"""
    text = _decode(text)
    if fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"Malformed JSON: {e.msg}", e.lineno, e.colno) from None
        if not isinstance(data, dict):
            raise ParseError("Probability file must be a JSON object", 1, 1)
        rows = list(data.items())
    else:
        rows = []
        for number, row in enumerate(csv.reader(io.StringIO(text)), start=1):
            if not row or row[0].strip().startswith("#"):
                continue
            if len(row) != 2:
                raise ParseError(f"Expected `agent,probability`, got {','.join(row)!r}", number)
            rows.append((row[0].strip(), row[1].strip()))

    probabilities = {}
    for agent, value in rows:
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise InvalidProbability(value, f"Probability for {agent!r} is not a number: {value!r}") from None
        if not 0.0 <= value <= 1.0:
            raise InvalidProbability(
                value, f"Probability {value!r} for {agent!r} outside [0, 1]", code="probability-out-of-range"
            )
        probabilities[agent] = value
    return probabilities
