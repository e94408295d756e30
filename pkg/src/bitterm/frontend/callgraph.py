import logging
from typing import Dict, List, Set

from toposort import CircularDependencyError, toposort_flatten

from bitterm.errors import FrontendError
from bitterm.frontend import ast as A

logger = logging.getLogger(__name__)


def call_edges(program: A.Program) -> Dict[str, Set[str]]:
    """Callee names per caller."""
    return {name: {c.name for c in proc.calls()} for name, proc in program.procedures.items()}


def build_call_graph(program: A.Program) -> List[str]:
    """
    Order procedures so that callees precede callers.

    Parameters:
    - program (A.Program): A program whose calls all name defined procedures.

    Returns:
    List[str]: Procedure names in reverse topological order of the call graph.
    """
    edges = call_edges(program)
    for name, callees in edges.items():
        if name in callees:
            where = next(c.loc for c in program.procedures[name].calls() if c.name == name)
            raise FrontendError(f"recursion detected: '{name}' calls itself", *where)
    try:
        order = toposort_flatten(edges, sort=True)
    except CircularDependencyError as e:
        cycle = sorted(e.data)
        first = program.procedures[cycle[0]]
        where = next((c.loc for c in first.calls() if c.name in e.data), first.loc)
        raise FrontendError(f"recursion detected among procedures: {', '.join(cycle)}", *where) from e
    logger.debug(f"call graph order: {order}")
    return order


def roots(program: A.Program) -> List[str]:
    """Procedures no other procedure calls, in definition order."""
    called = set().union(*call_edges(program).values()) if program.procedures else set()
    return [name for name in program.procedures if name not in called]


def reachable(program: A.Program, root: str) -> List[str]:
    """Procedures reachable from ``root`` (inclusive), callees first."""
    edges = call_edges(program)
    seen = {root}
    stack = [root]
    while stack:
        for callee in edges[stack.pop()]:
            if callee not in seen:
                seen.add(callee)
                stack.append(callee)
    return [name for name in build_call_graph(program) if name in seen]
