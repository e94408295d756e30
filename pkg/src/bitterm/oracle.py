"""
Exhaustive-state termination oracle.

Runs the entry procedure concretely from every valuation of its parameters,
following every outcome of ``nondet()`` and of uninitialized declarations,
and reports per valuation whether some execution runs forever. Expressions
are evaluated through the same compiler the encoder uses, so both agree on
every C conversion. Only meant for small widths.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from bitterm.driver.records import TermStatus
from bitterm.errors import OracleLimitExceeded
from bitterm.frontend import ast as A
from bitterm.logic import terms as T
from bitterm.logic.evaluate import evaluate
from bitterm.logic.terms import Term
from bitterm.ssa.encoder import ExpressionCompiler

logger = logging.getLogger(__name__)

MAX_STATES = 1 << 24

POP = -1

Scope = Tuple[Tuple[str, A.IntType, int], ...]
# procedure, continuation, scopes, index of the caller statement awaiting the result
Frame = Tuple[str, Tuple[int, ...], Tuple[Scope, ...], int]
Config = Tuple[Tuple[int, ...], Tuple[Frame, ...]]

DONE: Config = ((), ())

_GRAY, _BLACK = 1, 2


@dataclass(frozen=True)
class Outcome:
    terminates: bool
    states: int


@dataclass
class OracleResult:
    """Per input valuation of the entry parameters, whether every execution terminates."""

    entry: str
    inputs: Tuple[str, ...]
    outcomes: Dict[Tuple[int, ...], Outcome]

    @property
    def terminating(self) -> List[Tuple[int, ...]]:
        return [values for values, o in self.outcomes.items() if o.terminates]

    @property
    def diverging(self) -> List[Tuple[int, ...]]:
        return [values for values, o in self.outcomes.items() if not o.terminates]

    @property
    def status(self) -> TermStatus:
        if not self.diverging:
            return TermStatus.TERMINATING
        if not self.terminating:
            return TermStatus.NON_TERMINATING
        return TermStatus.POTENTIALLY_NON_TERMINATING

    def contradicts(self, status: TermStatus) -> bool:
        """Whether an analyzer verdict claims something these outcomes refute."""
        if status is TermStatus.TERMINATING:
            return bool(self.diverging)
        if status is TermStatus.NON_TERMINATING:
            return bool(self.terminating)
        return False

    def violations(self, precondition: Term, variables: Sequence[Term],
                   fixed: Optional[Mapping[str, int]] = None) -> List[Tuple[int, ...]]:
        """
        Diverging valuations that satisfy ``precondition``.

        Parameters:
        - precondition (Term): condition over the entry procedure's inputs.
        - variables (Sequence[Term]): the input symbols, in parameter order.
        - fixed (Mapping[str, int]): values of any further symbols, such as globals.

        Returns:
        List[Tuple[int, ...]]: empty when the precondition is sufficient.
        """
        bad = []
        for values in self.diverging:
            valuation = dict(fixed or {})
            valuation.update({x.name: v for x, v in zip(variables, values)})
            if evaluate(precondition, valuation):
                bad.append(values)
        return bad

    def rows(self) -> List[Dict[str, object]]:
        return [
            {**dict(zip(self.inputs, values)), "terminates": o.terminates, "states": o.states}
            for values, o in self.outcomes.items()
        ]


class _Machine:
    """Small-step interpreter whose configurations are hashable tuples."""

    def __init__(self, program: A.Program):
        self.program = program
        self.types = program.types
        self.stmts: List[A.Stmt] = []
        self.index: Dict[int, int] = {}
        for proc in program.procedures.values():
            for s in A.walk(proc.body):
                self.index[id(s)] = len(self.stmts)
                self.stmts.append(s)
        self.global_types = [g.ctype for g in program.globals]
        self.global_slots = {g.name: i for i, g in enumerate(program.globals)}

    # values

    def _lookup(self, frame: Optional[Frame], globals_: Tuple[int, ...]) -> Callable[[str], Term]:
        def lookup(name: str) -> Term:
            for scope in reversed(frame[2] if frame else ()):
                for n, ctype, value in scope:
                    if n == name:
                        return T.const(value, self.types.width(ctype), ctype.signed)
            i = self.global_slots[name]
            ctype = self.global_types[i]
            return T.const(globals_[i], self.types.width(ctype), ctype.signed)

        return lookup

    def _outcomes(self, build: Callable[[ExpressionCompiler], Term], frame: Optional[Frame],
                  globals_: Tuple[int, ...]) -> List:
        holes: List[Term] = []

        def nondet(ctype: A.IntType) -> Term:
            hole = T.var(f"nondet@{len(holes)}", self.types.width(ctype), ctype.signed)
            holes.append(hole)
            return hole

        term = build(ExpressionCompiler(self.types, self._lookup(frame, globals_), nondet))
        results = {}
        for values in itertools.product(*(range(1 << h.width) for h in holes)):
            results[evaluate(term, {h.name: v for h, v in zip(holes, values)})] = None
        return list(results)

    def _values(self, expr: A.Expr, ctype: A.IntType, frame: Optional[Frame], globals_: Tuple[int, ...]) -> List[int]:
        width = self.types.width(ctype)
        return self._outcomes(lambda c: T.cast(c.value(expr), width, ctype.signed), frame, globals_)

    def _truths(self, expr: A.Expr, frame: Frame, globals_: Tuple[int, ...]) -> List[bool]:
        return self._outcomes(lambda c: c.condition(expr), frame, globals_)

    def _havoc(self, ctype: A.IntType) -> List[int]:
        lo, hi = self.types.range(ctype)
        return list(range(lo, hi + 1))

    def _convert(self, value: int, source: A.IntType, target: A.IntType) -> int:
        t = T.cast(T.const(value, self.types.width(source), source.signed), self.types.width(target), target.signed)
        return evaluate(t, {})

    # variables

    def _type_of(self, frame: Frame, name: str) -> A.IntType:
        for scope in reversed(frame[2]):
            for n, ctype, _ in scope:
                if n == name:
                    return ctype
        return self.global_types[self.global_slots[name]]

    def _declare(self, frame: Frame, name: str, ctype: A.IntType, value: int) -> Frame:
        proc, cont, scopes, waiting = frame
        scope = tuple(e for e in scopes[-1] if e[0] != name) + ((name, ctype, value),)
        return proc, cont, scopes[:-1] + (scope,), waiting

    def _write(self, frame: Frame, globals_: Tuple[int, ...], name: str, value: int) -> Config:
        proc, cont, scopes, waiting = frame
        for k in range(len(scopes) - 1, -1, -1):
            for j, (n, ctype, _) in enumerate(scopes[k]):
                if n == name:
                    scope = scopes[k][:j] + ((n, ctype, value),) + scopes[k][j + 1:]
                    return globals_, ((proc, cont, scopes[:k] + (scope,) + scopes[k + 1:], waiting),)
        i = self.global_slots[name]
        return globals_[:i] + (value,) + globals_[i + 1:], (frame,)

    def _assigned(self, frame: Frame, globals_: Tuple[int, ...], stmt: A.Assign, right: A.Expr) -> List[int]:
        ctype = self._type_of(frame, stmt.target)
        if stmt.op == "=":
            return self._values(right, ctype, frame, globals_)
        op = stmt.op[:-1]
        result_type = self.types.promote(ctype) if op in ("<<", ">>") else self.types.common(ctype, right.ctype)
        expr = A.Binary(op, A.Name(stmt.target, ctype=ctype), right, ctype=result_type)
        return self._values(expr, ctype, frame, globals_)

    # steps

    def initial(self, values: Sequence[int]) -> List[Config]:
        """Start configurations for one valuation of the entry parameters; globals take their initializers."""
        partial: List[Tuple[int, ...]] = [()]
        for g in self.program.globals:
            extended = []
            for prefix in partial:
                if g.init is None:
                    extended.append(prefix + (0,))
                else:
                    extended.extend(prefix + (v,) for v in self._values(g.init, g.ctype, None, prefix))
            partial = extended
        entry = self.program.procedures[self.program.entry]
        scope = tuple((p.name, p.ctype, v) for p, v in zip(entry.params, values))
        frame = (entry.name, (self.index[id(entry.body)],), (scope,), POP)
        return [(globals_, (frame,)) for globals_ in partial]

    def successors(self, config: Config) -> List[Config]:
        globals_, frames = config
        if not frames:
            return []
        proc, cont, scopes, waiting = frames[-1]
        below = frames[:-1]
        if not cont:
            return self._return(globals_, below, frames[-1], [None])
        item, rest = cont[0], cont[1:]
        frame = (proc, rest, scopes, waiting)
        if item == POP:
            return [(globals_, below + ((proc, rest, scopes[:-1], waiting),))]
        stmt = self.stmts[item]
        out = self._step(stmt, item, globals_, below, frame)
        return list(dict.fromkeys(out))

    def _step(self, stmt: A.Stmt, item: int, globals_, below, frame: Frame) -> List[Config]:
        proc, rest, scopes, waiting = frame
        if isinstance(stmt, A.Block):
            cont = tuple(self.index[id(s)] for s in stmt.stmts) + (POP,) + rest
            return [(globals_, below + ((proc, cont, scopes + ((),), waiting),))]
        if isinstance(stmt, A.Decl):
            if isinstance(stmt.init, A.Call):
                return self._call(globals_, below, frame, stmt.init, item)
            values = self._havoc(stmt.ctype) if stmt.init is None else self._values(stmt.init, stmt.ctype, frame,
                                                                                     globals_)
            return [(globals_, below + (self._declare(frame, stmt.name, stmt.ctype, v),)) for v in values]
        if isinstance(stmt, A.Assign):
            if isinstance(stmt.value, A.Call):
                return self._call(globals_, below, frame, stmt.value, item)
            out = []
            for v in self._assigned(frame, globals_, stmt, stmt.value):
                g, top = self._write(frame, globals_, stmt.target, v)
                out.append((g, below + top))
            return out
        if isinstance(stmt, A.CallStmt):
            return self._call(globals_, below, frame, stmt.call, item)
        if isinstance(stmt, A.If):
            out = []
            for truth in self._truths(stmt.cond, frame, globals_):
                branch = stmt.then if truth else stmt.orelse
                cont = ((self.index[id(branch)],) if branch is not None else ()) + rest
                out.append((globals_, below + ((proc, cont, scopes, waiting),)))
            return out
        if isinstance(stmt, A.While):
            out = []
            for truth in self._truths(stmt.cond, frame, globals_):
                cont = (self.index[id(stmt.body)], item) + rest if truth else rest
                out.append((globals_, below + ((proc, cont, scopes, waiting),)))
            return out
        if isinstance(stmt, A.Return):
            ret = self.program.procedures[proc].ret
            if stmt.value is None or ret is None:
                values = [None]
            else:
                values = self._values(stmt.value, ret, frame, globals_)
            return self._return(globals_, below, frame, values)
        if isinstance(stmt, (A.Assume, A.Assert)):
            # a failed check halts the path
            truths = self._truths(stmt.cond, frame, globals_)
            return [(globals_, below + (frame,)) if truth else DONE for truth in truths]
        raise ValueError(f"unexpected statement {stmt!r}")

    def _call(self, globals_, below, frame: Frame, call: A.Call, waiting: int) -> List[Config]:
        callee = self.program.procedures[call.name]
        choices = [self._values(arg, p.ctype, frame, globals_) for p, arg in zip(callee.params, call.args)]
        out = []
        for args in itertools.product(*choices):
            scope = tuple((p.name, p.ctype, v) for p, v in zip(callee.params, args))
            out.append((globals_, below + (frame, (call.name, (self.index[id(callee.body)],), (scope,), waiting))))
        return out

    def _return(self, globals_, below, frame: Frame, values: List[Optional[int]]) -> List[Config]:
        if not below:
            return [DONE]
        caller, rest = below[-1], below[:-1]
        stmt = self.stmts[frame[3]]
        ret = self.program.procedures[frame[0]].ret
        out = []
        for value in values:
            if isinstance(stmt, A.CallStmt):
                out.append((globals_, below))
            elif isinstance(stmt, A.Decl):
                received = self._havoc(stmt.ctype) if value is None else [self._convert(value, ret, stmt.ctype)]
                out.extend((globals_, rest + (self._declare(caller, stmt.name, stmt.ctype, v),)) for v in received)
            elif value is None:
                for v in self._havoc(self._type_of(caller, stmt.target)):
                    g, top = self._write(caller, globals_, stmt.target, v)
                    out.append((g, rest + top))
            else:
                temp = f"{frame[0]}.ret"
                scoped = (caller[0], caller[1], caller[2] + (((temp, ret, value),),), caller[3])
                for v in self._assigned(scoped, globals_, stmt, A.Name(temp, ctype=ret)):
                    g, top = self._write(caller, globals_, stmt.target, v)
                    out.append((g, rest + top))
        return list(dict.fromkeys(out))

    def explore(self, roots: List[Config], limit: int) -> Tuple[bool, int]:
        """Depth-first search for a reachable cycle; returns (terminates, states visited)."""
        color: Dict[Config, int] = {}
        for root in roots:
            if root in color:
                continue
            color[root] = _GRAY
            stack: List[Tuple[Config, Iterator[Config]]] = [(root, iter(self.successors(root)))]
            while stack:
                config, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    color[config] = _BLACK
                    stack.pop()
                    continue
                seen = color.get(nxt)
                if seen == _GRAY:
                    return False, len(color)
                if seen is None:
                    color[nxt] = _GRAY
                    if len(color) > limit:
                        raise OracleLimitExceeded(f"more than {limit} states to explore")
                    stack.append((nxt, iter(self.successors(nxt))))
        return True, len(color)


def oracle(program: A.Program, max_states: int = MAX_STATES) -> OracleResult:
    """
    Decide termination of the entry procedure for every input by exhaustive exploration.

    Parameters:
    - program (A.Program): a checked program, best parsed at a small width.
    - max_states (int): bound on the input valuations and on the states visited over all of them.

    Returns:
    OracleResult: one outcome per valuation of the entry parameters.
    """
    machine = _Machine(program)
    entry = program.procedures[program.entry]
    ranges = [machine.types.range(p.ctype) for p in entry.params]
    count = math.prod(hi - lo + 1 for lo, hi in ranges)
    if count > max_states:
        raise OracleLimitExceeded(f"{count} input valuations exceed the limit of {max_states}")
    outcomes: Dict[Tuple[int, ...], Outcome] = {}
    explored = 0
    for values in itertools.product(*(range(lo, hi + 1) for lo, hi in ranges)):
        terminates, states = machine.explore(machine.initial(values), max_states - explored)
        explored += states
        outcomes[values] = Outcome(terminates, states)
    result = OracleResult(program.entry, tuple(p.name for p in entry.params), outcomes)
    logger.info(f"oracle {program.entry}: {len(result.terminating)} of {len(outcomes)} inputs terminate, "
                f"{explored} states")
    return result
