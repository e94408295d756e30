"""
Forward analysis: loop invariants, summaries and calling contexts.

All three are solutions of one family of clauses over the procedure body
``B = formula & context & sums & assume/assert records``:

- ``B & Inv_1(lb) & ... & Inv_k(lb) ==> Inv_i(end)`` for each loop ``i``;
- ``B & Invs ==> Sum(in, out)`` for the summary;
- ``B & Invs & g_j ==> CallCtx_j(actuals)`` for call site ``j``.

Timeouts degrade every witness to top.
"""
import logging
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from bitterm.absdom import AbstractValue, Template, concretize
from bitterm.errors import SolverTimeout
from bitterm.logic import terms as T
from bitterm.logic.terms import Term
from bitterm.ssa import CallSite, ProcedureTS, Signature
from bitterm.synth.engine import Clause, Instance, TemplateSolver

logger = logging.getLogger(__name__)


def forward_body(ts: ProcedureTS, context: Term = T.TRUE, sums: Term = T.TRUE, invariants: Term = T.TRUE) -> Term:
    return T.conj([ts.formula, context, sums, invariants] + ts.assumptions + ts.assertions)


def inv_name(index: int) -> str:
    return f"inv{index}"


def loop_premises(ts: ProcedureTS) -> List[Instance]:
    return [Instance(inv_name(loop.index), loop.premise_mapping()) for loop in ts.loops]


def invariant_formula(ts: ProcedureTS, templates: Sequence[Template], values: Sequence[AbstractValue]) -> Term:
    """Invariants as premises: each holds of the back-edge state whenever its loop select is set."""
    return T.conj(concretize(t, v, loop.premise_mapping()) for loop, t, v in zip(ts.loops, templates, values))


def _loop_system(ts: ProcedureTS, templates: Sequence[Template], body: Term):
    named = {inv_name(loop.index): t for loop, t in zip(ts.loops, templates)}
    premises = loop_premises(ts)
    clauses = [
        Clause(body, Instance(inv_name(loop.index), loop.conclusion_mapping()), premises, f"{ts.name}.loop{loop.index}")
        for loop in ts.loops
    ]
    return named, clauses, premises


def _invariants(ts: ProcedureTS, values: Mapping[str, AbstractValue]) -> List[AbstractValue]:
    return [values[inv_name(loop.index)] for loop in ts.loops]


def infer_invariant(
    ts: ProcedureTS,
    templates: Sequence[Template],
    context: Term,
    sums: Term,
    solver: TemplateSolver,
) -> List[AbstractValue]:
    """
    Loop invariants of ``ts`` under a calling context.

    Parameters:
    - ts (ProcedureTS): the encoded procedure.
    - templates (Sequence[Template]): one loop template per loop, in loop order.
    - context (Term): constraint over the procedure's inputs and outputs.
    - sums (Term): instantiated callee summaries.
    - solver (TemplateSolver): the synthesis engine.

    Returns:
    List[AbstractValue]: one value per loop; all top after a timeout.
    """
    named, clauses, _ = _loop_system(ts, templates, forward_body(ts, context, sums))
    try:
        return _invariants(ts, solver.solve(named, clauses))
    except SolverTimeout as e:
        logger.warning(f"invariant inference for {ts.name} timed out, using top: {str(e)}")
        return [AbstractValue.top(len(t)) for t in templates]


def comp_inv_sum_o(
    ts: ProcedureTS,
    templates: Sequence[Template],
    sum_template: Template,
    callctx: Term,
    sums: Term,
    solver: TemplateSolver,
) -> Tuple[List[AbstractValue], AbstractValue]:
    """Invariants and forward summary of ``ts`` under ``callctx``, solved together."""
    named, clauses, premises = _loop_system(ts, templates, forward_body(ts, callctx, sums))
    named["sum"] = sum_template
    clauses.append(Clause(forward_body(ts, callctx, sums), Instance("sum"), premises, f"{ts.name}.sum"))
    try:
        values = solver.solve(named, clauses)
    except SolverTimeout as e:
        logger.warning(f"summary of {ts.name} timed out, using top: {str(e)}")
        return [AbstractValue.top(len(t)) for t in templates], AbstractValue.top(len(sum_template))
    return _invariants(ts, values), values["sum"]


def comp_callctx_o(
    ts: ProcedureTS,
    templates: Sequence[Template],
    callee_templates: Mapping[str, Template],
    signatures: Mapping[str, Signature],
    callctx: Term,
    sums: Term,
    solver: TemplateSolver,
    sites: Optional[Sequence[CallSite]] = None,
) -> Dict[int, AbstractValue]:
    """
    Forward calling contexts of call sites in ``ts``.

    Parameters:
    - ts (ProcedureTS): the caller.
    - templates (Sequence[Template]): the caller's loop templates.
    - callee_templates (Mapping[str, Template]): context template per callee, over the callee's formals.
    - signatures (Mapping[str, Signature]): formals per callee.
    - callctx (Term): the caller's own calling context.
    - sums (Term): callee summaries already available.
    - solver (TemplateSolver): the synthesis engine.
    - sites (Sequence[CallSite]): the sites to solve for, all by default.

    Returns:
    Dict[int, AbstractValue]: context per call-site index, over the callee's formals.
    A site whose guard is unreachable stays bottom.
    """
    sites = list(ts.calls if sites is None else sites)
    body = forward_body(ts, callctx, sums)
    named, clauses, premises = _loop_system(ts, templates, body)
    for site in sites:
        name = f"ctx{site.index}"
        named[name] = callee_templates[site.callee]
        mapping = signatures[site.callee].mapping(site)
        clauses.append(Clause(T.and_(body, site.guard), Instance(name, mapping), premises, site.label))
    try:
        values = solver.solve(named, clauses)
    except SolverTimeout as e:
        logger.warning(f"calling contexts in {ts.name} timed out, using top: {str(e)}")
        return {site.index: AbstractValue.top(len(callee_templates[site.callee])) for site in sites}
    return {site.index: values[f"ctx{site.index}"] for site in sites}
