"""
SSA encoding of a checked procedure into a guarded transition system.

Every assignment introduces a fresh symbol ``name#k`` together with its
defining term; branch conditions become guard symbols ``g@k``. A loop head
selects, through the free Boolean ``ls@i``, between the value entering the
loop and an unconstrained back-edge value ``name#lb{i}``, which keeps the
definitions acyclic and over-approximates the loop. Calls leave a
placeholder: fresh output symbols constrained only by summaries added later.

Control points are numbered for the backward analysis: ``ENTRY`` and each
loop head by its index. Each loop records the points its entry and
back edges start from; each call site records the points it is reached from
and the loop heads or exit it leads to.
"""
import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from bitterm.errors import EncodingError
from bitterm.frontend import ast as A
from bitterm.frontend.callgraph import build_call_graph
from bitterm.logic import terms as T
from bitterm.logic.terms import Term

logger = logging.getLogger(__name__)

ENTRY = -1

_COMPARE = {
    "<": T.lt,
    "<=": T.le,
    ">": T.gt,
    ">=": T.ge,
    "==": T.eq,
    "!=": T.ne,
}
_ARITH = {
    "+": T.add,
    "-": T.sub,
    "*": T.mul,
    "&": T.bvand,
    "|": T.bvor,
    "^": T.bvxor,
}


class ExpressionCompiler:
    """Translate typed expressions into terms, applying C conversions explicitly."""

    def __init__(
        self,
        types: A.TypeSystem,
        lookup: Callable[[str], Term],
        nondet: Optional[Callable[[A.IntType], Term]] = None,
        on_linear: Optional[Callable[[str, A.Expr, A.Expr], None]] = None,
    ):
        self.types = types
        self.lookup = lookup
        self.nondet = nondet
        self.on_linear = on_linear

    def _cast(self, t: Term, ctype: A.IntType) -> Term:
        return T.cast(t, self.types.width(ctype), ctype.signed)

    def value(self, e: A.Expr) -> Term:
        """Integer value of ``e`` at its C type; truth values read as 0 or 1."""
        t = self._compile(e)
        if e.ctype is None:
            raise EncodingError(f"expression {e!r} was not type-checked")
        return self._cast(t, e.ctype)

    def condition(self, e: A.Expr) -> Term:
        return T.to_bool(self._compile(e))

    def _compile(self, e: A.Expr) -> Term:
        if isinstance(e, A.IntLit):
            return T.const(e.value, self.types.width(e.ctype), e.ctype.signed)
        if isinstance(e, A.Name):
            return self.lookup(e.ident)
        if isinstance(e, A.Nondet):
            if self.nondet is None:
                raise EncodingError(f"{e.spelling}() is not allowed here")
            return self.nondet(e.target)
        if isinstance(e, A.Cast):
            return self._cast(self.value(e.operand), e.target)
        if isinstance(e, A.Unary):
            if e.op == "!":
                return T.not_(self.condition(e.operand))
            operand = self._cast(self.value(e.operand), e.ctype)
            if e.op == "-":
                return T.neg(operand)
            if e.op == "~":
                return T.bvnot(operand)
            return operand
        if isinstance(e, A.Binary):
            return self._binary(e)
        raise EncodingError(f"unexpected expression {e!r}")

    def _binary(self, e: A.Binary) -> Term:
        if e.op == "&&":
            return T.and_(self.condition(e.left), self.condition(e.right))
        if e.op == "||":
            return T.or_(self.condition(e.left), self.condition(e.right))
        if e.op in _COMPARE:
            common = self.types.common(e.left.ctype, e.right.ctype)
            return _COMPARE[e.op](self._cast(self.value(e.left), common), self._cast(self.value(e.right), common))
        left = self._cast(self.value(e.left), e.ctype)
        if e.op in ("<<", ">>"):
            amount = T.cast(self.value(e.right), left.width, False)
            return T.shl(left, amount) if e.op == "<<" else T.shr(left, amount)
        if e.op in ("+", "-") and self.on_linear is not None:
            self.on_linear(e.op, e.left, e.right)
        return _ARITH[e.op](left, self._cast(self.value(e.right), e.ctype))


def compile_condition(expr: A.Expr, variables: Mapping[str, Term], types: A.TypeSystem) -> Term:
    """Boolean term for a typed condition whose names denote ``variables``."""

    def lookup(name: str) -> Term:
        if name not in variables:
            raise EncodingError(f"unknown variable '{name}' in condition")
        return variables[name]

    return ExpressionCompiler(types, lookup).condition(expr)


def expand(term: Term, definitions: Mapping[Term, Term], stop: Iterable[Term] = ()) -> Term:
    """Substitute definitions into ``term`` until only free or ``stop`` symbols remain."""
    stop = set(stop)
    while True:
        mapping = {v: definitions[v] for v in T.free_vars(term) if v in definitions and v not in stop}
        if not mapping:
            return term
        term = T.substitute(term, mapping)


@dataclass(frozen=True)
class Target:
    """Where control goes after a call: a loop head through its entry or back edge, or the exit."""

    kind: str
    loop: int = -1


@dataclass(eq=False)
class CallSite:
    callee: str
    index: int
    guard: Term
    inputs: List[Term]
    outputs: List[Term]
    from_set: FrozenSet[int] = frozenset()
    to_set: Set[Target] = field(default_factory=set)
    loop: Optional[int] = None

    @property
    def label(self) -> str:
        return f"{self.callee}#{self.index}"


@dataclass(eq=False)
class LoopInfo:
    index: int
    select: Term
    head_guard: Term
    body_guard: Term
    exit_guard: Term
    state: List[Term]
    names: List[str]
    back: List[Term]
    entry: List[Term]
    modified: int
    end: List[Term] = field(default_factory=list)
    end_guard: Term = T.FALSE
    overflow_rows: List[Tuple[Tuple[int, ...], Term, str]] = field(default_factory=list)
    entered_from: FrozenSet[int] = frozenset()
    back_from: FrozenSet[int] = frozenset()
    parent: Optional[int] = None

    @property
    def formals(self) -> List[Term]:
        return self.state + [self.head_guard]

    def premise_mapping(self) -> Dict[Term, Term]:
        """Head state to back-edge values, head guard to the loop-select symbol."""
        mapping = {x: b for x, b in zip(self.state, self.back) if x is not b}
        mapping[self.head_guard] = self.select
        return mapping

    def conclusion_mapping(self) -> Dict[Term, Term]:
        """Head state to the values at the end of the body."""
        mapping = {x: e for x, e in zip(self.state, self.end) if x is not e}
        mapping[self.head_guard] = self.end_guard
        return mapping

    def entry_mapping(self) -> Dict[Term, Term]:
        return {x: e for x, e in zip(self.state, self.entry) if x is not e}


@dataclass(eq=False)
class ProcedureTS:
    name: str
    inputs: List[Term]
    input_names: List[str]
    input_types: List[A.IntType]
    outputs: List[Term]
    output_names: List[str]
    exit_guard: Term
    definitions: Dict[Term, Term]
    regions: Dict[Term, str]
    loops: List[LoopInfo]
    calls: List[CallSite]
    halts: List[Term]
    assumptions: List[Term]
    assertions: List[Term]
    exit_from: FrozenSet[int]
    types: A.TypeSystem

    def _part(self, region: Optional[str] = None) -> Term:
        return T.conj(
            T.eq(sym, value) for sym, value in self.definitions.items() if region is None or self.regions[sym] == region
        )

    @property
    def formula(self) -> Term:
        """All definitions: the unrolled-once body with loops cut by loop-select symbols."""
        return self._part()

    @property
    def init(self) -> Term:
        return self._part("init")

    @property
    def trans(self) -> Term:
        return self._part("trans")

    @property
    def out(self) -> Term:
        return self._part("out")

    @property
    def io_formals(self) -> List[Term]:
        return self.inputs + self.outputs + [self.exit_guard]

    @property
    def termination_points(self) -> Term:
        """Guards under which an execution leaves the procedure or halts."""
        return T.disj([self.exit_guard] + self.halts)

    def variables(self) -> Dict[str, Term]:
        return dict(zip(self.input_names, self.inputs))

    def expand(self, term: Term, stop: Iterable[Term] = ()) -> Term:
        return expand(term, self.definitions, stop)

    def condition(self, expr: A.Expr) -> Term:
        return compile_condition(expr, self.variables(), self.types)

    def call_sites(self, callee: str) -> List[CallSite]:
        return [c for c in self.calls if c.callee == callee]


class _Frame:
    """Returns collected from one procedure body or inlined copy."""

    def __init__(self, ret: Optional[A.IntType]):
        self.ret = ret
        self.exits: List[Tuple[Term, Optional[Term], Dict[str, Term]]] = []
        self.origins: Set[int] = set()
        self.pending: List[CallSite] = []


class _Encoder:
    def __init__(self, program: A.Program, proc: A.Procedure, halting: FrozenSet[str]):
        self.program = program
        self.proc = proc
        self.halting = halting
        self.types = program.types
        self.definitions: Dict[Term, Term] = {}
        self.placement: Dict[Term, Tuple[int, int]] = {}
        self.versions: Counter = Counter()
        self.used_names: Counter = Counter()
        self.key_types: Dict[str, A.IntType] = {}
        self.key_names: Dict[str, str] = {}
        self.scopes: List[Dict[str, str]] = [{}]
        self.global_keys: List[str] = []
        self.env: Dict[str, Term] = {}
        self.guard: Term = T.TRUE
        self.origins: FrozenSet[int] = frozenset({ENTRY})
        self.pending: List[CallSite] = []
        self.frames: List[_Frame] = []
        self.loops: List[LoopInfo] = []
        self.loop_stack: List[Tuple[LoopInfo, Dict[int, int]]] = []
        self.calls: List[CallSite] = []
        self.halts: List[Term] = []
        self.assumptions: List[Term] = []
        self.assertions: List[Term] = []
        self.depth = 0
        self.segment = 0
        self.guard_ids = itertools.count()
        self.nondet_ids = itertools.count()
        self.compiler = ExpressionCompiler(self.types, self._lookup_term, self._nondet, self._note_linear)

    # symbols

    def _declare(self, name: str, ctype: A.IntType) -> str:
        n = self.used_names[name]
        self.used_names[name] += 1
        key = name if n == 0 else f"{name}~{n}"
        self.key_types[key] = ctype
        self.key_names[key] = name
        self.scopes[-1][name] = key
        return key

    def _symbol(self, key: str, suffix) -> Term:
        ctype = self.key_types[key]
        return T.var(f"{key}#{suffix}", self.types.width(ctype), ctype.signed)

    def _bind(self, sym: Term, value: Term) -> Term:
        self.definitions[sym] = value
        self.placement[sym] = (self.depth, self.segment)
        return sym

    def _define(self, key: str, value: Term) -> Term:
        self.versions[key] += 1
        sym = self._bind(self._symbol(key, self.versions[key]), value)
        self.env[key] = sym
        return sym

    def _havoc(self, key: str) -> Term:
        self.versions[key] += 1
        sym = self._symbol(key, self.versions[key])
        self.env[key] = sym
        return sym

    def _guard(self, value: Term, force: bool = False) -> Term:
        if value.is_const and not force:
            return value
        return self._bind(T.bool_var(f"g@{next(self.guard_ids)}"), value)

    def _nondet(self, ctype: A.IntType) -> Term:
        return T.var(f"nondet@{next(self.nondet_ids)}", self.types.width(ctype), ctype.signed)

    def _lookup_key(self, name: str) -> str:
        if name.startswith("::"):
            return self.scopes[0][name[2:]]
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        raise EncodingError(f"unknown variable '{name}' in {self.proc.name}")

    def _lookup_term(self, name: str) -> Term:
        return self.env[self._lookup_key(name)]

    def _visible_keys(self) -> List[str]:
        resolved: Dict[str, str] = {}
        for scope in self.scopes:
            resolved.update(scope)
        keys = [key for key in resolved.values() if key in self.env]
        return keys + [key for key in self.global_keys if key not in keys]

    # overflow rows

    def _note_linear(self, op: str, left: A.Expr, right: A.Expr) -> None:
        if not self.loop_stack or not isinstance(left, A.Name) or not isinstance(right, A.Name):
            return
        loop, position = self.loop_stack[-1]
        a, b = self._lookup_term(left.ident), self._lookup_term(right.ident)
        if id(a) not in position or id(b) not in position or (a is b and op == "-"):
            return
        guard = self._loop_guard(loop)
        if guard is None:
            return
        coefficients = [0] * len(loop.state)
        coefficients[position[id(a)]] += 1
        coefficients[position[id(b)]] += 1 if op == "+" else -1
        text = f"{left.ident}{op}{right.ident}"
        for sign, label in ((1, f"{text}<=d"), (-1, f"-({text})<=d")):
            row = (tuple(sign * c for c in coefficients), guard, label)
            if all(existing[0] != row[0] or existing[1] is not guard for existing in loop.overflow_rows):
                loop.overflow_rows.append(row)

    def _loop_guard(self, loop: LoopInfo) -> Optional[Term]:
        stop = set(loop.formals)
        guard = expand(self.guard, self.definitions, stop)
        if not T.free_vars(guard) <= stop:
            return None
        return guard

    # statements

    def _block(self, block: A.Block) -> None:
        self.scopes.append({})
        for stmt in block.stmts:
            self._stmt(stmt)
        self.scopes.pop()

    def _stmt(self, stmt: A.Stmt) -> None:
        if isinstance(stmt, A.Block):
            self._block(stmt)
        elif isinstance(stmt, A.Decl):
            self._decl(stmt)
        elif isinstance(stmt, A.Assign):
            self._assign(stmt)
        elif isinstance(stmt, A.CallStmt):
            self._call(stmt.call)
        elif isinstance(stmt, A.If):
            self._if(stmt)
        elif isinstance(stmt, A.While):
            self._while(stmt)
        elif isinstance(stmt, A.Return):
            self._return(stmt)
        elif isinstance(stmt, (A.Assume, A.Assert)):
            self._check(stmt)
        elif isinstance(stmt, A.InlinedBody):
            self._inlined(stmt)
        else:
            raise EncodingError(f"unexpected statement {stmt!r}")

    def _cast(self, t: Term, ctype: A.IntType) -> Term:
        return T.cast(t, self.types.width(ctype), ctype.signed)

    def _decl(self, stmt: A.Decl) -> None:
        if stmt.init is None:
            self._havoc(self._declare(stmt.name, stmt.ctype))
            return
        if isinstance(stmt.init, A.Call):
            value = self._call(stmt.init)
        else:
            value = self.compiler.value(stmt.init)
        self._define(self._declare(stmt.name, stmt.ctype), self._cast(value, stmt.ctype))

    def _assign(self, stmt: A.Assign) -> None:
        key = self._lookup_key(stmt.target)
        ctype = self.key_types[key]
        if stmt.op == "=":
            value = self._call(stmt.value) if isinstance(stmt.value, A.Call) else self.compiler.value(stmt.value)
            self._define(key, self._cast(value, ctype))
            return
        op = stmt.op[:-1]
        right = stmt.value
        if isinstance(right, A.Call):
            result = self._call(right)
            ret = self.program.procedures[right.name].ret
            temp = self._declare(f"{right.name}.{right.site}.ret", ret)
            self.env[temp] = result
            right = A.Name(temp, ctype=ret)
        if op in ("<<", ">>"):
            result_type = self.types.promote(ctype)
        else:
            result_type = self.types.common(ctype, right.ctype)
        expr = A.Binary(op, A.Name(stmt.target, ctype=ctype), right, ctype=result_type)
        self._define(key, self._cast(self.compiler.value(expr), ctype))

    def _call(self, call: A.Call) -> Optional[Term]:
        callee = self.program.procedures[call.name]
        site = call.site if call.site >= 0 else len(self.calls)
        inputs = []
        for j, (param, arg) in enumerate(zip(callee.params, call.args)):
            value = self._cast(self.compiler.value(arg), param.ctype)
            if not value.is_var:
                sym = T.var(f"{call.name}#{site}.in{j}", value.width, value.signed)
                value = self._bind(sym, value)
            inputs.append(value)
        inputs += [self.env[key] for key in self.global_keys]
        outputs = []
        result = None
        if callee.ret is not None:
            result = T.var(f"{call.name}#{site}.ret", self.types.width(callee.ret), callee.ret.signed)
            outputs.append(result)
        outputs += [self._havoc(key) for key in self.global_keys]
        loop = self.loop_stack[-1][0].index if self.loop_stack else None
        cs = CallSite(call.name, site, self.guard, inputs, outputs, frozenset(self.origins), set(), loop)
        self.calls.append(cs)
        self.pending.append(cs)
        if call.name in self.halting and self.guard is not T.FALSE:
            self.halts.append(self.guard)
        return result

    def _branch(self, guard: Term, block: Optional[A.Block], env, origins, pending):
        self.env = dict(env)
        self.origins = origins
        self.pending = list(pending)
        self.guard = guard
        if block is not None:
            self._block(block)
        return self.env, self.guard, self.origins, self.pending

    def _if(self, stmt: A.If) -> None:
        cond = self.compiler.condition(stmt.cond)
        outer_guard = self.guard
        env, origins, pending = dict(self.env), self.origins, list(self.pending)
        then_guard = self._guard(T.and_(outer_guard, cond))
        else_guard = self._guard(T.and_(outer_guard, T.not_(cond)))
        env1, g1, o1, p1 = self._branch(then_guard, stmt.then, env, origins, pending)
        env2, g2, o2, p2 = self._branch(else_guard, stmt.orelse, env, origins, pending)
        self.env = {key: env1[key] for key in env}
        self.guard = self._guard(T.or_(g1, g2))
        for key in env:
            if env1[key] is not env2[key]:
                self._define(key, T.ite(g1, env1[key], env2[key]))
        self.origins = o1 | o2
        self.pending = _unique(p1 + p2)

    def _modified(self, stmts: Sequence[A.Stmt], local: Set[str]) -> Set[str]:
        local = set(local)
        keys: Set[str] = set()
        for s in stmts:
            if A.call_of(s) is not None:
                keys.update(self.global_keys)
            if isinstance(s, A.Decl):
                local.add(s.name)
            elif isinstance(s, A.Assign):
                if s.target not in local:
                    keys.add(self._lookup_key(s.target))
            elif isinstance(s, A.Block):
                keys |= self._modified(s.stmts, local)
            elif isinstance(s, A.If):
                keys |= self._modified(s.then.stmts, local)
                if s.orelse is not None:
                    keys |= self._modified(s.orelse.stmts, local)
            elif isinstance(s, A.While):
                keys |= self._modified(s.body.stmts, local)
            elif isinstance(s, A.InlinedBody):
                keys |= self._modified(s.body.stmts, local)
        return keys

    def _while(self, stmt: A.While) -> None:
        index = len(self.loops)
        modified = self._modified(stmt.body.stmts, set())
        visible = self._visible_keys()
        order = [k for k in visible if k in modified] + [k for k in visible if k not in modified]
        for cs in self.pending:
            cs.to_set.add(Target("entry", index))
        entered_from = frozenset(self.origins)
        entry_guard = self.guard
        self.depth += 1
        select = T.bool_var(f"ls@{index}")
        head = self._guard(entry_guard, force=True)
        state, back, entry = [], [], []
        for key in order:
            value = self.env[key]
            if key in modified:
                lb = self._symbol(key, f"lb{index}")
                state.append(self._define(key, T.ite(select, lb, value)))
                back.append(lb)
            else:
                state.append(value)
                back.append(value)
            entry.append(value)
        cond = self.compiler.condition(stmt.cond)
        body_guard = self._guard(T.and_(head, cond), force=True)
        exit_guard = self._guard(T.and_(head, T.not_(cond)), force=True)
        parent = self.loop_stack[-1][0].index if self.loop_stack else None
        loop = LoopInfo(
            index, select, head, body_guard, exit_guard, state,
            [self.key_names[k] for k in order], back, entry, len(modified & set(order)),
            entered_from=entered_from, parent=parent,
        )
        self.loops.append(loop)
        self.loop_stack.append((loop, {id(x): i for i, x in enumerate(state)}))
        head_env = dict(self.env)
        self.guard = body_guard
        self.origins = frozenset({index})
        self.pending = []
        self._block(stmt.body)
        loop.end = [self.env[key] for key in order]
        loop.end_guard = self.guard
        loop.back_from = frozenset(self.origins)
        for cs in self.pending:
            cs.to_set.add(Target("back", index))
        self.loop_stack.pop()
        self.env = head_env
        self.guard = exit_guard
        self.origins = frozenset({index})
        self.pending = []
        self.depth -= 1
        if self.depth == 0:
            self.segment += 1
        logger.debug(f"loop {index} of {self.proc.name}: state {loop.names}, {len(loop.overflow_rows)} overflow rows")

    def _return(self, stmt: A.Return) -> None:
        frame = self.frames[-1]
        if self.guard is not T.FALSE:
            value = None
            if stmt.value is not None and frame.ret is not None:
                value = self._cast(self.compiler.value(stmt.value), frame.ret)
            snapshot = {key: self.env[key] for key in self.global_keys}
            frame.exits.append((self.guard, value, snapshot))
            frame.origins |= self.origins
            frame.pending.extend(self.pending)
        self.guard = T.FALSE
        self.origins = frozenset()
        self.pending = []

    def _check(self, stmt) -> None:
        cond = self.compiler.condition(stmt.cond)
        record = T.implies(self.guard, cond)
        (self.assumptions if isinstance(stmt, A.Assume) else self.assertions).append(record)
        blocked = T.and_(self.guard, T.not_(cond))
        if blocked is not T.FALSE:
            self.halts.append(self._guard(blocked))
        self.guard = self._guard(T.and_(self.guard, cond))

    def _merge(self, frame: _Frame) -> Tuple[Term, Optional[Term], Dict[str, Term]]:
        guard = T.disj(g for g, _, _ in frame.exits)
        values = [(g, v) for g, v, _ in frame.exits if v is not None]
        value = _select(values) if values else None
        globals_out = {}
        for key in self.global_keys:
            pairs = [(g, snap[key]) for g, _, snap in frame.exits]
            globals_out[key] = _select(pairs) if pairs else self.env[key]
        return guard, value, globals_out

    def _inlined(self, stmt: A.InlinedBody) -> None:
        callee = self.program.procedures[stmt.callee]
        frame = _Frame(callee.ret)
        self.frames.append(frame)
        self._block(stmt.body)
        self._return(A.Return(None))
        self.frames.pop()
        guard, value, globals_out = self._merge(frame)
        self.guard = self._guard(guard)
        for key, v in globals_out.items():
            if v is not self.env[key]:
                self._define(key, v)
        if stmt.result is not None and value is not None:
            key = self._lookup_key(stmt.result)
            self._define(key, self._cast(value, self.key_types[key]))
        self.origins = frozenset(frame.origins)
        self.pending = _unique(frame.pending)

    # procedure

    def run(self) -> ProcedureTS:
        proc = self.proc
        inputs, names, ctypes = [], [], []
        for g in self.program.globals:
            key = self._declare(g.name, g.ctype)
            self.global_keys.append(key)
        self.scopes.append({})
        for p in proc.params:
            key = self._declare(p.name, p.ctype)
            self.env[key] = self._symbol(key, 0)
            inputs.append(self.env[key])
            names.append(p.name)
            ctypes.append(p.ctype)
        for key in self.global_keys:
            self.env[key] = self._symbol(key, 0)
            inputs.append(self.env[key])
            names.append(key)
            ctypes.append(self.key_types[key])
        frame = _Frame(proc.ret)
        self.frames.append(frame)
        self._block(proc.body)
        self._return(A.Return(None))
        self.frames.pop()
        guard, value, globals_out = self._merge(frame)
        top_loops = self.segment
        exit_guard = self._bind(T.bool_var("g@ret"), guard)
        outputs, out_names = [], []
        if proc.ret is not None:
            ret = T.var(f"{proc.name}#ret", self.types.width(proc.ret), proc.ret.signed)
            if value is not None:
                self._bind(ret, value)
            outputs.append(ret)
            out_names.append("ret")
        for key in self.global_keys:
            sym = self._symbol(key, "out")
            self._bind(sym, globals_out[key])
            outputs.append(sym)
            out_names.append(f"{key}'")
        for cs in frame.pending:
            cs.to_set.add(Target("exit"))
        regions = {sym: _region(depth, segment, top_loops) for sym, (depth, segment) in self.placement.items()}
        ts = ProcedureTS(
            name=proc.name,
            inputs=inputs,
            input_names=names,
            input_types=ctypes,
            outputs=outputs,
            output_names=out_names,
            exit_guard=exit_guard,
            definitions=self.definitions,
            regions=regions,
            loops=self.loops,
            calls=self.calls,
            halts=self.halts,
            assumptions=self.assumptions,
            assertions=self.assertions,
            exit_from=frozenset(frame.origins),
            types=self.types,
        )
        logger.debug(f"encoded {proc.name}: {len(self.definitions)} definitions, {len(self.loops)} loops, "
                     f"{len(self.calls)} call sites")
        return ts


def _region(depth: int, segment: int, top_loops: int) -> str:
    if depth > 0:
        return "trans"
    if top_loops == 0 or segment == top_loops:
        return "out"
    return "init" if segment == 0 else "trans"


def _select(pairs: Sequence[Tuple[Term, Term]]) -> Term:
    result = pairs[-1][1]
    for guard, value in reversed(pairs[:-1]):
        result = T.ite(guard, value, result)
    return result


def _unique(sites: Iterable[CallSite]) -> List[CallSite]:
    seen, out = set(), []
    for cs in sites:
        if id(cs) not in seen:
            seen.add(id(cs))
            out.append(cs)
    return out


def halting_procedures(program: A.Program) -> FrozenSet[str]:
    """Procedures with a path that can stop at a failing assume or assert, directly or in a callee."""
    halting: Set[str] = set()
    for name in build_call_graph(program):
        for s in A.walk(program.procedures[name].body):
            call = A.call_of(s)
            if isinstance(s, (A.Assume, A.Assert)) or (call is not None and call.name in halting):
                halting.add(name)
                break
    return frozenset(halting)


def encode(proc: A.Procedure, program: A.Program, halting: Optional[FrozenSet[str]] = None) -> ProcedureTS:
    """
    Encode one checked procedure.

    Parameters:
    - proc (A.Procedure): the procedure, as annotated by the checker.
    - program (A.Program): the enclosing program, for callee signatures, globals and type widths.
    - halting (FrozenSet[str]): callees whose calls may halt; computed when omitted.

    Returns:
    ProcedureTS: definitions partitioned into init, trans and out, with loop and call-site tables.
    """
    if halting is None:
        halting = halting_procedures(program)
    return _Encoder(program, proc, halting).run()
