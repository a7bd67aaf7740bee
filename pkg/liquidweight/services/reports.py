"""
reports.py: Assemble per-agent influence reports and render them as JSON, CSV
or a human-readable table.

JSON and CSV carry full precision. The table format rounds to three decimals
for display only.
"""
import csv
import io
import json
import logging
import math
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel

from liquidweight.documents.schemas import (
    MonteCarloCell,
    ReportDocument,
    ReportMetadata,
    ReportRow,
    StationaryMetadata,
    StationaryReport,
    StationaryRow,
)
from liquidweight.services.influence import (
    SuspendibleProfile,
    delegation_matrix,
    expected_weights,
    potential_weight,
    stationary_analytic,
    stationary_iterative,
)
from liquidweight.services.lottery_sim import monte_carlo_expected_weight

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv", "table")


def probability_model(sp: SuspendibleProfile) -> str:
    values = set(sp.vote_prob.values())
    if not values:
        return "endpoints only"
    if len(values) == 1:
        return f"uniform p={values.pop()!r}"
    return "per-agent"


def build_report(
    sp: SuspendibleProfile,
    tolerance: float,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    issue: Optional[str] = None,
) -> ReportDocument:
    """Potential, expected and stationary columns, plus Monte Carlo when samples is given"""
    potential = potential_weight(sp.profile)
    expected = expected_weights(sp)
    stationary = stationary_analytic(sp)

    rows = []
    for agent in sp.agents:
        cell = None
        if samples:
            result = monte_carlo_expected_weight(sp, agent, samples=samples, seed=seed, workers=workers)
            cell = MonteCarloCell(estimate=result.estimate, std_error=result.std_error)
        rows.append(ReportRow(
            agent=agent,
            potential=potential[agent],
            expected=expected[agent],
            stationary_scaled=stationary.scaled_weight[agent],
            monte_carlo=cell,
        ))
    logger.info(f"Built report for {sp.profile.n} agents")
    return ReportDocument(
        rows=rows,
        metadata=ReportMetadata(
            n=sp.profile.n,
            probability_model=probability_model(sp),
            seed=seed if samples else None,
            samples=samples or None,
            tolerance=tolerance,
            issue=issue,
        ),
    )


def build_stationary_report(
    sp: SuspendibleProfile,
    tolerance: float,
    max_iters: Optional[int] = None,
    issue: Optional[str] = None,
) -> StationaryReport:
    analytic = stationary_analytic(sp)
    iterative = stationary_iterative(sp, tolerance=tolerance, max_iters=max_iters)
    row_sums = delegation_matrix(sp).row_sums()
    rows = [
        StationaryRow(
            agent=agent,
            analytic=analytic.distribution[agent],
            iterative=iterative.distribution[agent],
            scaled=analytic.scaled_weight[agent],
        )
        for agent in sp.agents
    ]
    return StationaryReport(
        rows=rows,
        metadata=StationaryMetadata(
            n=sp.profile.n,
            tolerance=tolerance,
            iterations=iterative.iterations,
            max_abs_diff=max(abs(row.analytic - row.iterative) for row in rows),
            max_row_sum_error=float(max(abs(row_sums - 1.0))),
            issue=issue,
        ),
    )


# --- Rendering --------------------------------------------------------------

def format_number(value: Any) -> str:
    """Three decimals with trailing zeros stripped (1.0 -> "1", 1.9375 -> "1.938")"""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return "" if value is None else str(value)
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    text = f"{value:.3f}".rstrip("0").rstrip(".")
    return "0" if text == "-0" else text


def exact_number(value: Any) -> str:
    """Full precision; integral floats print without a fractional part"""
    if isinstance(value, float) and value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return "" if value is None else str(value)


def flatten_row(row: BaseModel) -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in row.model_dump().items():
        if isinstance(value, dict):
            for inner, item in value.items():
                flat[f"{key}_{inner}"] = item
        elif value is None and key == "monte_carlo":
            continue
        else:
            flat[key] = value
    return flat


def _columns(rows: Sequence[Dict[str, Any]]) -> List[str]:
    columns: List[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    return columns


def render_csv(rows: Sequence[Dict[str, Any]]) -> str:
    buffer = io.StringIO()
    columns = _columns(rows)
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([exact_number(row.get(column)) for column in columns])
    return buffer.getvalue()


def render_table(rows: Sequence[Dict[str, Any]], metadata: Optional[Dict[str, Any]] = None) -> str:
    columns = _columns(rows)
    cells = [[format_number(row.get(column)) for column in columns] for row in rows]
    widths = [max([len(column)] + [len(line[i]) for line in cells]) for i, column in enumerate(columns)]
    lines = ["  ".join(column.ljust(width) for column, width in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * width for width in widths))
    for line in cells:
        lines.append("  ".join(cell.rjust(width) if i else cell.ljust(width)
                               for i, (cell, width) in enumerate(zip(line, widths))).rstrip())
    if metadata:
        lines.append("")
        lines.extend(f"{key}: {value}" for key, value in metadata.items() if value is not None)
    return "\n".join(lines) + "\n"


def render_json(payload: Any) -> str:
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json", exclude_none=True)
    elif isinstance(payload, list):
        payload = [item.model_dump(mode="json", exclude_none=True) if isinstance(item, BaseModel) else item
                   for item in payload]
    return json.dumps(payload, indent=2) + "\n"


def render(payload: Any, fmt: str) -> str:
    """
    Render a report model (rows + metadata), a single model or a list of
    models/dicts in the requested format.
    """
    if fmt == "json":
        return render_json(payload)
    metadata = None
    if isinstance(payload, BaseModel) and hasattr(payload, "rows"):
        metadata = payload.metadata.model_dump()
        rows = [flatten_row(row) for row in payload.rows]
    elif isinstance(payload, BaseModel):
        rows = [flatten_row(payload)]
    else:
        rows = [flatten_row(item) if isinstance(item, BaseModel) else dict(item) for item in payload]
    if fmt == "csv":
        return render_csv(rows)
    return render_table(rows, metadata)
