import itertools
import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Mapping, Optional, Set, Tuple

from bitterm.errors import EncodingError
from bitterm.frontend import ast as A
from bitterm.logic import terms as T
from bitterm.logic.terms import Term
from bitterm.ssa.encoder import CallSite, ProcedureTS, encode

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Signature:
    """Formal inputs, outputs and exit guard of a procedure, as summaries mention them."""

    inputs: Tuple[Term, ...]
    outputs: Tuple[Term, ...]
    exit_guard: Term

    @classmethod
    def of(cls, ts: ProcedureTS) -> "Signature":
        return cls(tuple(ts.inputs), tuple(ts.outputs), ts.exit_guard)

    @property
    def formals(self) -> Tuple[Term, ...]:
        return self.inputs + self.outputs + (self.exit_guard,)

    def mapping(self, site: CallSite) -> Dict[Term, Term]:
        """Formals to the actuals of ``site``; the exit guard holds wherever a call returns."""
        if len(site.inputs) != len(self.inputs) or len(site.outputs) != len(self.outputs):
            raise EncodingError(
                f"call site {site.label} passes {len(site.inputs)} inputs and {len(site.outputs)} outputs, "
                f"'{site.callee}' has {len(self.inputs)} and {len(self.outputs)}"
            )
        mapping = dict(zip(self.inputs, site.inputs))
        mapping.update(zip(self.outputs, site.outputs))
        mapping[self.exit_guard] = T.TRUE
        return mapping


def instantiate(site: CallSite, formula: Term, signature: Signature) -> Term:
    """``formula`` over callee formals, renamed to the actuals of ``site``."""
    return T.substitute(formula, signature.mapping(site))


def instantiate_summaries(ts: ProcedureTS, sums: Mapping[str, Term], signatures: Mapping[str, Signature]) -> Term:
    """
    Constrain call placeholders with callee summaries.

    Parameters:
    - ts (ProcedureTS): the calling procedure.
    - sums (Mapping[str, Term]): summary per callee, over that callee's formals.
    - signatures (Mapping[str, Signature]): formals per callee.

    Returns:
    Term: the conjunction over call sites of ``guard ==> summary(actuals)``;
    callees without a summary contribute nothing.
    """
    conjuncts = []
    for site in ts.calls:
        if site.callee not in sums:
            continue
        conjuncts.append(T.implies(site.guard, instantiate(site, sums[site.callee], signatures[site.callee])))
    return T.conj(conjuncts)


# inlining


class _Inliner:
    def __init__(self, program: A.Program):
        self.program = program
        self.counter = itertools.count()

    def procedure(self, name: str) -> A.Procedure:
        proc = self.program.procedures[name]
        return replace(proc, body=self.block(proc.body))

    def block(self, block: A.Block) -> A.Block:
        stmts: List[A.Stmt] = []
        for stmt in block.stmts:
            stmts.extend(self.stmt(stmt))
        return A.Block(stmts, loc=block.loc)

    def stmt(self, stmt: A.Stmt) -> List[A.Stmt]:
        call = A.call_of(stmt)
        if call is not None:
            return self.expand_call(stmt, call)
        if isinstance(stmt, A.Block):
            return [self.block(stmt)]
        if isinstance(stmt, A.If):
            orelse = self.block(stmt.orelse) if stmt.orelse is not None else None
            return [replace(stmt, then=self.block(stmt.then), orelse=orelse)]
        if isinstance(stmt, A.While):
            return [replace(stmt, body=self.block(stmt.body))]
        if isinstance(stmt, A.InlinedBody):
            return [replace(stmt, body=self.block(stmt.body))]
        return [stmt]

    def expand_call(self, stmt: A.Stmt, call: A.Call) -> List[A.Stmt]:
        callee = self.program.procedures[call.name]
        prefix = f"{call.name}.{next(self.counter)}."
        out: List[A.Stmt] = [
            A.Decl(p.ctype, prefix + p.name, arg, loc=call.loc) for p, arg in zip(callee.params, call.args)
        ]
        result = None
        if callee.ret is not None:
            result = prefix + "ret"
            out.append(A.Decl(callee.ret, result, None, loc=call.loc))
        renamed = _Renamer(prefix, {p.name for p in callee.params}).block(callee.body)
        out.append(A.InlinedBody(call.name, self.block(renamed), result, loc=call.loc))
        if result is not None:
            value = A.Name(result, loc=call.loc, ctype=callee.ret)
            if isinstance(stmt, A.Decl):
                out.append(replace(stmt, init=value))
            elif isinstance(stmt, A.Assign):
                out.append(replace(stmt, value=value))
        return out


class _Renamer:
    """Prefix a callee's parameters and locals; globals get the ``::`` spelling so caller locals cannot capture them."""

    def __init__(self, prefix: str, bound: Set[str]):
        self.prefix = prefix
        self.scopes: List[Set[str]] = [set(bound)]

    def name(self, ident: str) -> str:
        if ident.startswith("::"):
            return ident
        if any(ident in s for s in self.scopes):
            return self.prefix + ident
        return "::" + ident

    def expr(self, e: A.Expr) -> A.Expr:
        if isinstance(e, A.Name):
            return replace(e, ident=self.name(e.ident))
        if isinstance(e, A.Unary):
            return replace(e, operand=self.expr(e.operand))
        if isinstance(e, A.Cast):
            return replace(e, operand=self.expr(e.operand))
        if isinstance(e, A.Binary):
            return replace(e, left=self.expr(e.left), right=self.expr(e.right))
        return replace(e)

    def rhs(self, value):
        if isinstance(value, A.Call):
            return replace(value, args=[self.expr(a) for a in value.args])
        return self.expr(value)

    def block(self, block: A.Block) -> A.Block:
        self.scopes.append(set())
        stmts = [self.stmt(s) for s in block.stmts]
        self.scopes.pop()
        return A.Block(stmts, loc=block.loc)

    def stmt(self, stmt: A.Stmt) -> A.Stmt:
        if isinstance(stmt, A.Block):
            return self.block(stmt)
        if isinstance(stmt, A.Decl):
            init = self.rhs(stmt.init) if stmt.init is not None else None
            self.scopes[-1].add(stmt.name)
            return replace(stmt, name=self.prefix + stmt.name, init=init)
        if isinstance(stmt, A.Assign):
            return replace(stmt, target=self.name(stmt.target), value=self.rhs(stmt.value))
        if isinstance(stmt, A.CallStmt):
            return replace(stmt, call=self.rhs(stmt.call))
        if isinstance(stmt, A.If):
            orelse = self.block(stmt.orelse) if stmt.orelse is not None else None
            return replace(stmt, cond=self.expr(stmt.cond), then=self.block(stmt.then), orelse=orelse)
        if isinstance(stmt, A.While):
            return replace(stmt, cond=self.expr(stmt.cond), body=self.block(stmt.body))
        if isinstance(stmt, A.Return):
            return replace(stmt, value=self.expr(stmt.value) if stmt.value is not None else None)
        if isinstance(stmt, (A.Assume, A.Assert)):
            return replace(stmt, cond=self.expr(stmt.cond))
        if isinstance(stmt, A.InlinedBody):
            return replace(stmt, body=self.block(stmt.body))
        raise EncodingError(f"unexpected statement {stmt!r}")


def inline_procedure(program: A.Program, name: Optional[str] = None) -> A.Procedure:
    """The procedure ``name`` (default: the entry) with every call replaced by a renamed copy of the callee body."""
    proc = _Inliner(program).procedure(name or program.entry)
    inlined = sum(isinstance(s, A.InlinedBody) for s in A.walk(proc.body))
    logger.debug(f"inlined {inlined} call sites into {proc.name}")
    return proc


def inline_all(program: A.Program) -> ProcedureTS:
    """Single transition system for the entry procedure with all calls inlined."""
    return encode(inline_procedure(program), program, frozenset())

