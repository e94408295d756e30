"""Text rendering of encoded procedures, one definition per line."""
from typing import List

from bitterm.logic import terms as T
from bitterm.ssa.encoder import ProcedureTS

REGIONS = ("init", "trans", "out")


def _terms(ts) -> str:
    return ", ".join(T.to_str(t) for t in ts)


def format_procedure(ts: ProcedureTS) -> str:
    lines: List[str] = [f"procedure {ts.name}({_terms(ts.inputs)}) -> ({_terms(ts.outputs)})"]
    for region in REGIONS:
        lines.append(f"  {region.capitalize()}_{ts.name}:")
        defs = [(s, v) for s, v in ts.definitions.items() if ts.regions[s] == region]
        if not defs:
            lines.append("    true")
        for sym, value in defs:
            lines.append(f"    {sym.name} = {T.to_str(value)}")
    for loop in ts.loops:
        parent = "" if loop.parent is None else f" in loop {loop.parent}"
        lines.append(f"  loop {loop.index}{parent}: select {loop.select.name}, head {loop.head_guard.name}")
        lines.append(f"    state ({_terms(loop.state)}) as ({', '.join(loop.names)})")
        lines.append(f"    back ({_terms(loop.back)})")
        lines.append(f"    end ({_terms(loop.end)}) under {T.to_str(loop.end_guard)}")
        for coefficients, guard, label in loop.overflow_rows:
            lines.append(f"    row {label} {list(coefficients)} if {T.to_str(guard)}")
    for site in ts.calls:
        lines.append(
            f"  call {site.label}: {T.to_str(site.guard)} ==> {site.callee}(({_terms(site.inputs)}), "
            f"({_terms(site.outputs)}))"
        )
    if ts.halts:
        lines.append(f"  halts: {_terms(ts.halts)}")
    for kind, records in (("assume", ts.assumptions), ("assert", ts.assertions)):
        for record in records:
            lines.append(f"  {kind} {T.to_str(record)}")
    lines.append(f"  exit {ts.exit_guard.name} = {T.to_str(ts.definitions[ts.exit_guard])}")
    return "\n".join(lines)


def format_program(encoded: List[ProcedureTS]) -> str:
    return "\n\n".join(format_procedure(ts) for ts in encoded) + "\n"
