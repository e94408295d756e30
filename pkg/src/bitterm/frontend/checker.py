"""Scoping, typing and normalization of parsed programs."""
import logging
from typing import Dict, List, Mapping, Optional

from bitterm.errors import FrontendError
from bitterm.frontend import ast as A
from bitterm.frontend.callgraph import build_call_graph, roots

logger = logging.getLogger(__name__)

COMPARISONS = ("<", "<=", ">", ">=", "==", "!=")
SHIFTS = ("<<", ">>")
LOGICAL = ("&&", "||")


class Scope:
    def __init__(self, parent: Optional["Scope"] = None):
        self.parent = parent
        self.names: Dict[str, A.IntType] = {}

    def lookup(self, name: str) -> Optional[A.IntType]:
        scope = self
        while scope is not None:
            if name in scope.names:
                return scope.names[name]
            scope = scope.parent
        return None


def _literal_type(lit: A.IntLit, types: A.TypeSystem) -> A.IntType:
    if lit.unsigned:
        candidates = [A.IntType("long", False)] if lit.long else [A.UINT, A.IntType("long", False)]
    else:
        candidates = [A.IntType("long", True)] if lit.long else [A.INT, A.IntType("long", True)]
        if lit.long:
            candidates.append(A.IntType("long", False))
    for ctype in candidates:
        lo, hi = types.range(ctype)
        if lo <= lit.value <= hi:
            return ctype
    raise FrontendError(f"integer literal {lit.value} does not fit any integer type", *lit.loc)


class _ExprTyper:
    def __init__(self, types: A.TypeSystem):
        self.types = types

    def __call__(self, e: A.Expr, scope: Scope) -> A.IntType:
        ctype = self._type(e, scope)
        e.ctype = ctype
        return ctype

    def _type(self, e: A.Expr, scope: Scope) -> A.IntType:
        if isinstance(e, A.IntLit):
            return _literal_type(e, self.types)
        if isinstance(e, A.Name):
            ctype = scope.lookup(e.ident)
            if ctype is None:
                raise FrontendError(f"unknown identifier '{e.ident}'", *e.loc)
            return ctype
        if isinstance(e, A.Nondet):
            return e.target
        if isinstance(e, A.Cast):
            self(e.operand, scope)
            return e.target
        if isinstance(e, A.Unary):
            operand = self(e.operand, scope)
            return A.INT if e.op == "!" else self.types.promote(operand)
        if isinstance(e, A.Binary):
            left = self(e.left, scope)
            right = self(e.right, scope)
            if e.op in COMPARISONS or e.op in LOGICAL:
                return A.INT
            if e.op in SHIFTS:
                return self.types.promote(left)
            return self.types.common(left, right)
        raise FrontendError(f"unexpected expression {e!r}")


def type_expression(e: A.Expr, variables: Mapping[str, A.IntType], types: Optional[A.TypeSystem] = None) -> A.Expr:
    scope = Scope()
    scope.names.update(variables)
    _ExprTyper(types or A.TypeSystem())(e, scope)
    return e


class _ProcedureChecker:
    def __init__(self, program: A.Program, globals_scope: Scope, proc: A.Procedure):
        self.program = program
        self.proc = proc
        self.typer = _ExprTyper(program.types)
        self.globals_scope = globals_scope
        self.sites = 0
        self.temporaries = 0

    def run(self) -> None:
        scope = Scope(self.globals_scope)
        for p in self.proc.params:
            if p.name in scope.names:
                raise FrontendError(f"parameter '{p.name}' declared twice", *self.proc.loc)
            scope.names[p.name] = p.ctype
        self.block(self.proc.body, Scope(scope))
        body = self.proc.body.stmts
        if not body or not isinstance(body[-1], A.Return):
            value = None if self.proc.ret is None else A.IntLit(0, ctype=A.INT)
            body.append(A.Return(value, loc=self.proc.loc))

    def block(self, block: A.Block, scope: Scope) -> None:
        block.stmts = [lowered for stmt in block.stmts for lowered in self.lower_return_call(stmt, scope)]
        for stmt in block.stmts:
            self.stmt(stmt, scope)

    def lower_return_call(self, stmt: A.Stmt, scope: Scope) -> List[A.Stmt]:
        """``return g(..);`` becomes a declaration of a fresh temporary followed by its return."""
        if not isinstance(stmt, A.Return) or not isinstance(stmt.value, A.Call) or self.proc.ret is None:
            return [stmt]
        self.temporaries += 1
        name = f"__ret{self.temporaries}"
        while scope.lookup(name) is not None:
            name += "_"
        decl = A.Decl(self.proc.ret, name, stmt.value, loc=stmt.loc)
        return [decl, A.Return(A.Name(name, loc=stmt.loc), loc=stmt.loc)]

    def call(self, call: A.Call, scope: Scope, needs_value: bool) -> Optional[A.IntType]:
        callee = self.program.procedures.get(call.name)
        if callee is None:
            raise FrontendError(f"unknown procedure '{call.name}'", *call.loc)
        if len(call.args) != len(callee.params):
            raise FrontendError(
                f"'{call.name}' takes {len(callee.params)} arguments, {len(call.args)} given", *call.loc
            )
        if needs_value and callee.ret is None:
            raise FrontendError(f"void procedure '{call.name}' used as a value", *call.loc)
        for arg in call.args:
            self.typer(arg, scope)
        call.site = self.sites
        self.sites += 1
        return callee.ret

    def rhs(self, value, scope: Scope) -> None:
        if isinstance(value, A.Call):
            self.call(value, scope, needs_value=True)
        else:
            self.typer(value, scope)

    def stmt(self, stmt: A.Stmt, scope: Scope) -> None:
        if isinstance(stmt, A.Block):
            self.block(stmt, Scope(scope))
        elif isinstance(stmt, A.Decl):
            if stmt.name in scope.names:
                raise FrontendError(f"'{stmt.name}' redeclared in the same scope", *stmt.loc)
            if stmt.init is not None:
                self.rhs(stmt.init, scope)
            scope.names[stmt.name] = stmt.ctype
        elif isinstance(stmt, A.Assign):
            target = scope.lookup(stmt.target)
            if target is None:
                raise FrontendError(f"unknown identifier '{stmt.target}'", *stmt.loc)
            stmt.ctype = target
            self.rhs(stmt.value, scope)
        elif isinstance(stmt, A.CallStmt):
            self.call(stmt.call, scope, needs_value=False)
        elif isinstance(stmt, A.If):
            self.typer(stmt.cond, scope)
            self.block(stmt.then, Scope(scope))
            if stmt.orelse is not None:
                self.block(stmt.orelse, Scope(scope))
        elif isinstance(stmt, A.While):
            self.typer(stmt.cond, scope)
            self.block(stmt.body, Scope(scope))
        elif isinstance(stmt, A.Return):
            if self.proc.ret is None and stmt.value is not None:
                raise FrontendError(f"void procedure '{self.proc.name}' returns a value", *stmt.loc)
            if self.proc.ret is not None and stmt.value is None:
                raise FrontendError(f"'{self.proc.name}' must return a value", *stmt.loc)
            if stmt.value is not None:
                self.typer(stmt.value, scope)
        elif isinstance(stmt, (A.Assume, A.Assert)):
            self.typer(stmt.cond, scope)
        else:
            raise FrontendError(f"unexpected statement {stmt!r}", *getattr(stmt, "loc", (0, 0)))


def select_entry(program: A.Program, requested: Optional[str] = None) -> str:
    """Requested entry if given, else ``main``, else the last root procedure in definition order."""
    if requested:
        if requested not in program.procedures:
            raise FrontendError(f"entry procedure '{requested}' is not defined")
        return requested
    if "main" in program.procedures:
        return "main"
    candidates = roots(program)
    if not candidates:
        raise FrontendError("program defines no procedures")
    return candidates[-1]


def check(program: A.Program) -> A.Program:
    """
    Type-check ``program`` in place and return it.

    Annotates every expression with its promoted C type, numbers call sites
    per caller in source order, appends the final return of each procedure,
    rejects recursion and fixes the entry procedure.
    """
    try:
        for base, width in program.type_widths.items():
            if base not in A.RANKS:
                raise FrontendError(f"unknown base type '{base}'")
            if width < 2:
                raise FrontendError(f"width of '{base}' must be at least 2, got {width}")
        globals_scope = Scope()
        typer = _ExprTyper(program.types)
        for g in program.globals:
            if g.name in globals_scope.names:
                raise FrontendError(f"global '{g.name}' declared twice", *g.loc)
            if isinstance(g.init, A.Call):
                raise FrontendError(f"global '{g.name}' cannot be initialized by a call", *g.loc)
            if g.init is not None:
                typer(g.init, globals_scope)
            globals_scope.names[g.name] = g.ctype
        for proc in program.procedures.values():
            if proc.name in globals_scope.names:
                raise FrontendError(f"'{proc.name}' is both a global and a procedure", *proc.loc)
            _ProcedureChecker(program, globals_scope, proc).run()
        build_call_graph(program)
        program.entry = select_entry(program, program.entry or None)
    except FrontendError as e:
        e.filename = e.filename or program.filename
        raise
    return program

