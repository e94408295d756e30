"""
JSON report of a verdict, its schema, and the human summary printed by the CLI.
"""
import logging
from typing import Any, Dict, List, Optional

import jsonschema
from rich.console import Console
from rich.table import Table

from bitterm.driver import TermStatus, Verdict
from bitterm.errors import ReportError
from bitterm.frontend import parse_condition
from bitterm.frontend.ast import TypeSystem
from bitterm.logic import terms as T
from bitterm.logic.terms import Term
from bitterm.ssa import ProcedureTS
from bitterm.synth import LexRanking

logger = logging.getLogger(__name__)

STATUSES = [s.value for s in TermStatus]

REPORT_SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "bitterm report",
    "type": "object",
    "required": ["file", "mode", "check", "status", "precondition", "procedures", "stats"],
    "properties": {
        "file": {"type": "string"},
        "mode": {"enum": ["ipta", "mta"]},
        "check": {"enum": ["universal", "conditional"]},
        "status": {"enum": STATUSES},
        "precondition": {"type": ["string", "null"]},
        "procedures": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "status", "ranking", "precondition"],
                "properties": {
                    "name": {"type": "string"},
                    "status": {"enum": STATUSES},
                    "ranking": {
                        "type": ["array", "null"],
                        "items": {
                            "type": ["array", "null"],
                            "items": {"type": "array", "items": {"type": "integer"}},
                        },
                    },
                    "precondition": {"type": ["string", "null"]},
                    "summary": {"type": "array", "items": {"type": "string"}},
                },
                "additionalProperties": False,
            },
        },
        "stats": {
            "type": "object",
            "required": ["solver_calls", "wall_ms"],
            "additionalProperties": {"type": "number"},
        },
    },
    "additionalProperties": False,
}


def ranking_components(ranking: Optional[LexRanking]) -> Optional[List[Optional[List[List[int]]]]]:
    """Coefficients per loop and component; ``None`` when no ranking was found."""
    if ranking is None or ranking.top:
        return None
    return [None if comps is None else [list(c) for c in comps] for comps in ranking.components]


def build_report(verdict: Verdict, filename: str) -> Dict[str, Any]:
    """
    Turn a verdict into the JSON report and validate it.

    Parameters:
    - verdict (Verdict): outcome of one analysis run.
    - filename (str): the analysed source file.

    Returns:
    Dict[str, Any]: the report; conditional runs carry the entry
    precondition in source syntax, universal runs carry ``null``.
    """
    report = {
        "file": filename,
        "mode": verdict.mode,
        "check": verdict.check,
        "status": verdict.status.value,
        "precondition": verdict.precondition_text,
        "procedures": [
            {
                "name": p.name,
                "status": p.status.value,
                "ranking": ranking_components(p.ranking),
                "precondition": p.precondition,
                "summary": list(p.summary),
            }
            for p in verdict.procedures
        ],
        "stats": dict(verdict.stats),
    }
    validate_report(report)
    return report


def validate_report(report: Dict[str, Any]) -> None:
    try:
        jsonschema.validate(report, REPORT_SCHEMA)
    except jsonschema.ValidationError as e:
        raise ReportError(f"report does not match its schema: {e.message}") from e


def read_precondition(text: str, ts: ProcedureTS, types: TypeSystem) -> Term:
    """Read a printed precondition back as a formula over ``ts``'s inputs."""
    if text == "true":
        return T.TRUE
    if text == "false":
        return T.FALSE
    expr = parse_condition(text, dict(zip(ts.input_names, ts.input_types)), types.widths)
    return ts.condition(expr)


def render_summary(verdict: Verdict, console: Optional[Console] = None) -> None:
    """Print the per-procedure table and the run statistics."""
    console = console or Console()
    table = Table(title=f"{verdict.entry} ({verdict.mode}, {verdict.check}): {verdict.status.value}")
    table.add_column("procedure")
    table.add_column("status")
    table.add_column("ranking")
    if verdict.check == "conditional":
        table.add_column("precondition")
    for p in verdict.procedures:
        ranking = "; ".join(p.ranking.describe()) if p.ranking is not None else ""
        row = [p.name, p.status.value, ranking]
        if verdict.check == "conditional":
            row.append(p.precondition or "")
        table.add_row(*row)
    console.print(table)
    if verdict.precondition_text is not None:
        console.print(f"precondition: {verdict.precondition_text}")
    console.print(", ".join(f"{k}={v:g}" for k, v in sorted(verdict.stats.items())))
