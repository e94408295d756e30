"""
Tseitin bit-blasting of bit-vector terms to CNF.

Literal numbering comes from a pysat ``IDPool`` so it is stable for a given
sequence of blasted terms. Gates are structurally hashed and constant literals
are folded before any clause is emitted.
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

from pysat.formula import CNF, IDPool

from bitterm.logic import terms as T
from bitterm.logic.terms import Term

logger = logging.getLogger(__name__)

Bits = List[int]


class BitBlaster:
    def __init__(self, pool: Optional[IDPool] = None):
        self.pool = pool or IDPool()
        self.true_lit = self.pool.id("__true__")
        self.clauses: List[List[int]] = []
        self.variables: Dict[str, Tuple[Term, Bits]] = {}
        self._bits: Dict[int, Tuple[Term, Bits]] = {}
        self._gates: Dict[tuple, int] = {}
        self._true_emitted = False
        self._flushed = 0
        self._next_gate = 0

    # clause emission

    def _emit(self, clause: List[int]) -> None:
        if not self._true_emitted and any(abs(lit) == self.true_lit for lit in clause):
            self._true_emitted = True
            self.clauses.append([self.true_lit])
        self.clauses.append(clause)

    def ensure_true(self) -> None:
        if not self._true_emitted:
            self._true_emitted = True
            self.clauses.append([self.true_lit])

    def take_new_clauses(self) -> List[List[int]]:
        fresh = self.clauses[self._flushed:]
        self._flushed = len(self.clauses)
        return fresh

    @property
    def nof_vars(self) -> int:
        return self.pool.top

    def _fresh(self) -> int:
        self._next_gate += 1
        return self.pool.id(("gate", self._next_gate))

    # gates

    def _and(self, a: int, b: int) -> int:
        t = self.true_lit
        if a == -t or b == -t or a == -b:
            return -t
        if a == t or a == b:
            return b
        if b == t:
            return a
        key = ("and", min(a, b), max(a, b))
        out = self._gates.get(key)
        if out is None:
            out = self._gates[key] = self._fresh()
            self._emit([-out, a])
            self._emit([-out, b])
            self._emit([out, -a, -b])
        return out

    def _or(self, a: int, b: int) -> int:
        return -self._and(-a, -b)

    def _xor(self, a: int, b: int) -> int:
        t = self.true_lit
        if abs(a) == t:
            return -b if a == t else b
        if abs(b) == t:
            return -a if b == t else a
        if a == b:
            return -t
        if a == -b:
            return t
        sign = 1
        if a < 0:
            a, sign = -a, -sign
        if b < 0:
            b, sign = -b, -sign
        key = ("xor", min(a, b), max(a, b))
        out = self._gates.get(key)
        if out is None:
            out = self._gates[key] = self._fresh()
            self._emit([-out, a, b])
            self._emit([-out, -a, -b])
            self._emit([out, -a, b])
            self._emit([out, a, -b])
        return sign * out

    def _mux(self, c: int, a: int, b: int) -> int:
        t = self.true_lit
        if c == t or a == b:
            return a
        if c == -t:
            return b
        if a == t:
            return self._or(c, b)
        if a == -t:
            return self._and(-c, b)
        if b == t:
            return self._or(-c, a)
        if b == -t:
            return self._and(c, a)
        key = ("mux", c, a, b)
        out = self._gates.get(key)
        if out is None:
            out = self._gates[key] = self._fresh()
            self._emit([-c, -a, out])
            self._emit([-c, a, -out])
            self._emit([c, -b, out])
            self._emit([c, b, -out])
            self._emit([-a, -b, out])
            self._emit([a, b, -out])
        return out

    def _maj(self, a: int, b: int, c: int) -> int:
        return self._or(self._and(a, b), self._and(c, self._or(a, b)))

    def _all(self, lits: Sequence[int]) -> int:
        out = self.true_lit
        for lit in lits:
            out = self._and(out, lit)
        return out

    def _any(self, lits: Sequence[int]) -> int:
        return -self._all([-lit for lit in lits])

    # word-level circuits

    def _adder(self, a: Bits, b: Bits, carry: int) -> Bits:
        out = []
        for x, y in zip(a, b):
            out.append(self._xor(self._xor(x, y), carry))
            carry = self._maj(x, y, carry)
        return out

    def _multiplier(self, a: Bits, b: Bits) -> Bits:
        t = self.true_lit
        if sum(abs(x) == t for x in a) > sum(abs(y) == t for y in b):
            a, b = b, a
        width = len(a)
        acc = [-t] * width
        for i, bit in enumerate(b):
            if bit == -t:
                continue
            partial = [-t] * i + [self._and(bit, x) for x in a[: width - i]]
            acc = self._adder(acc, partial, -t)
        return acc

    def _shift(self, a: Bits, amount: Bits, left: bool, arithmetic: bool) -> Bits:
        t = self.true_lit
        width = len(a)
        fill = a[-1] if arithmetic else -t
        result = list(a)
        overflow = -t
        for k, bit in enumerate(amount):
            step = 1 << k
            if step >= width:
                overflow = self._or(overflow, bit)
                continue
            if left:
                shifted = [-t] * step + result[: width - step]
            else:
                shifted = result[step:] + [fill] * step
            result = [self._mux(bit, s, r) for s, r in zip(shifted, result)]
        return [self._mux(overflow, fill, r) for r in result]

    def _ult(self, a: Bits, b: Bits) -> int:
        lt = -self.true_lit
        for x, y in zip(a, b):
            lt = self._mux(self._xor(x, y), y, lt)
        return lt

    def _lt(self, a: Bits, b: Bits, signed: bool) -> int:
        if signed:
            a = a[:-1] + [-a[-1]]
            b = b[:-1] + [-b[-1]]
        return self._ult(a, b)

    def _eq(self, a: Bits, b: Bits) -> int:
        return self._all([-self._xor(x, y) for x, y in zip(a, b)])

    # terms

    def _variable(self, node: Term) -> Bits:
        known = self.variables.get(node.name)
        if known is not None:
            if known[0].width != node.width:
                raise ValueError(f"variable {node.name} used at widths {known[0].width} and {node.width}")
            return known[1]
        lits = [self.pool.id((node.name, i)) for i in range(node.width)]
        self.variables[node.name] = (node, lits)
        return lits

    def _node(self, node: Term, args: List[Bits]) -> Bits:
        t = self.true_lit
        op = node.op
        if op == "const":
            return [t if (node.value >> i) & 1 else -t for i in range(node.width)]
        if op == "var":
            return self._variable(node)
        if op == "add":
            return self._adder(args[0], args[1], -t)
        if op == "sub":
            return self._adder(args[0], [-x for x in args[1]], t)
        if op == "neg":
            return self._adder([-t] * node.width, [-x for x in args[0]], t)
        if op == "mul":
            return self._multiplier(args[0], args[1])
        if op == "and":
            return [self._and(x, y) for x, y in zip(*args)]
        if op == "or":
            return [self._or(x, y) for x, y in zip(*args)]
        if op == "xor":
            return [self._xor(x, y) for x, y in zip(*args)]
        if op == "not":
            return [-x for x in args[0]]
        if op in ("shl", "shr"):
            return self._shift(args[0], args[1], op == "shl", op == "shr" and node.args[0].signed)
        if op == "eq":
            return [self._eq(args[0], args[1])]
        if op in ("lt", "le"):
            signed = node.args[0].signed and node.args[1].signed
            if op == "lt":
                return [self._lt(args[0], args[1], signed)]
            return [-self._lt(args[1], args[0], signed)]
        if op == "ite":
            c = args[0][0]
            return [self._mux(c, x, y) for x, y in zip(args[1], args[2])]
        if op == "cast":
            src = args[0]
            if node.width <= len(src):
                return src[: node.width]
            pad = src[-1] if node.args[0].signed else -t
            return src + [pad] * (node.width - len(src))
        raise ValueError(f"cannot blast operator {op}")

    def bits(self, term: Term) -> Bits:
        cached = self._bits.get(id(term))
        if cached is not None:
            return cached[1]
        for node in T.postorder([term]):
            if id(node) in self._bits:
                continue
            args = [self._bits[id(a)][1] for a in node.args]
            self._bits[id(node)] = (node, self._node(node, args))
        return self._bits[id(term)][1]

    def literal(self, formula: Term) -> int:
        if formula.width != 1:
            raise ValueError("expected a Boolean term")
        return self.bits(formula)[0]

    def _disjuncts(self, formula: Term) -> List[Term]:
        out, stack = [], [formula]
        while stack:
            f = stack.pop()
            if f.op == "or" and f.width == 1:
                stack.extend(reversed(f.args))
            else:
                out.append(f)
        return out

    def add_formula(self, formula: Term) -> None:
        """Assert a Boolean term, splitting top-level conjunctions."""
        stack = [formula]
        while stack:
            f = stack.pop()
            if f.width != 1:
                raise ValueError("expected a Boolean term")
            if f is T.TRUE:
                continue
            if f.op == "and":
                stack.extend(reversed(f.args))
            elif f.op == "not" and f.args[0].op == "or":
                stack.extend(T.bvnot(a) for a in reversed(f.args[0].args))
            elif f.op == "eq" and f.args[0].width > 1:
                a, b = self.bits(f.args[0]), self.bits(f.args[1])
                for x, y in zip(a, b):
                    self._add_clause([-self._xor(x, y)])
            elif f.op == "or":
                self._add_clause([self.literal(d) for d in self._disjuncts(f)])
            else:
                self._add_clause([self.literal(f)])

    def _add_clause(self, lits: List[int]) -> None:
        t = self.true_lit
        if t in lits:
            return
        kept = [lit for lit in lits if lit != -t]
        self._emit(kept if kept else [-t])

    def value_of(self, name: str, model: Dict[int, bool]) -> Optional[int]:
        known = self.variables.get(name)
        if known is None:
            return None
        return sum(1 << i for i, lit in enumerate(known[1]) if model.get(lit, False))


def bitblast(formula: Term, pool: Optional[IDPool] = None) -> CNF:
    """Equisatisfiable CNF for a Boolean term."""
    blaster = BitBlaster(pool)
    blaster.add_formula(formula)
    logger.debug(f"blasted formula into {len(blaster.clauses)} clauses over {blaster.nof_vars} variables")
    return CNF(from_clauses=blaster.clauses)
