"""
Quantifier-free fixed-width bit-vector terms.

Terms are immutable and hash-consed: constructing the same node twice yields
the same object, so identity comparison and ``id``-keyed caches are safe.
Boolean formulas are terms of width 1. Arithmetic wraps modulo ``2**width``;
the ``signed`` flag only changes how comparisons, right shifts and widening
casts read the bit pattern.

Values are stored as unsigned bit patterns throughout.
"""
import threading
import weakref
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Sequence, Tuple

ARITH_OPS = ("add", "sub", "mul")
BITWISE_OPS = ("and", "or", "xor")
SHIFT_OPS = ("shl", "shr")
COMPARE_OPS = ("eq", "lt", "le")


class Term:
    __slots__ = ("op", "width", "signed", "args", "value", "name", "_vars", "__weakref__")

    def __init__(self, op: str, width: int, signed: bool, args: Tuple["Term", ...], value: int, name: str):
        self.op = op
        self.width = width
        self.signed = signed
        self.args = args
        self.value = value
        self.name = name
        self._vars = None

    @property
    def is_const(self) -> bool:
        return self.op == "const"

    @property
    def is_var(self) -> bool:
        return self.op == "var"

    @property
    def is_bool(self) -> bool:
        return self.width == 1

    @property
    def signed_value(self) -> int:
        return to_signed(self.value, self.width) if self.signed else self.value

    def __repr__(self) -> str:
        return to_str(self)

    def __copy__(self) -> "Term":
        return self

    def __deepcopy__(self, memo) -> "Term":
        return self

    def __reduce__(self):
        # unpickling goes through the table again
        return _make, (self.op, self.width, self.signed, self.args, self.value, self.name)


_TABLE: "weakref.WeakValueDictionary[tuple, Term]" = weakref.WeakValueDictionary()
_LOCK = threading.Lock()


def _make(op: str, width: int, signed: bool, args: Tuple[Term, ...] = (), value: int = 0, name: str = "") -> Term:
    key = (op, width, signed, tuple(id(a) for a in args), value, name)
    with _LOCK:
        term = _TABLE.get(key)
        if term is None:
            term = Term(op, width, signed, args, value, name)
            _TABLE[key] = term
    return term


def mask(width: int) -> int:
    return (1 << width) - 1


def to_signed(value: int, width: int) -> int:
    value &= mask(width)
    return value - (1 << width) if value >> (width - 1) else value


def type_range(width: int, signed: bool) -> Tuple[int, int]:
    if signed:
        return -(1 << (width - 1)), (1 << (width - 1)) - 1
    return 0, mask(width)


def compute(op: str, width: int, args: Sequence[Term], values: Sequence[int]) -> int:
    """Concrete semantics of one node given the bit patterns of its operands."""
    m = mask(width)
    if op == "add":
        return (values[0] + values[1]) & m
    if op == "sub":
        return (values[0] - values[1]) & m
    if op == "mul":
        return (values[0] * values[1]) & m
    if op == "neg":
        return (-values[0]) & m
    if op == "and":
        return values[0] & values[1]
    if op == "or":
        return values[0] | values[1]
    if op == "xor":
        return values[0] ^ values[1]
    if op == "not":
        return ~values[0] & m
    if op == "shl":
        return 0 if values[1] >= width else (values[0] << values[1]) & m
    if op == "shr":
        if args[0].signed:
            sv = to_signed(values[0], width)
            return (sv >> min(values[1], width)) & m
        return 0 if values[1] >= width else values[0] >> values[1]
    if op in COMPARE_OPS:
        a, b = values
        if op == "eq":
            return int(a == b)
        if args[0].signed and args[1].signed:
            a, b = to_signed(a, args[0].width), to_signed(b, args[1].width)
        return int(a < b) if op == "lt" else int(a <= b)
    if op == "ite":
        return values[1] if values[0] else values[2]
    if op == "cast":
        src = args[0]
        if width >= src.width and src.signed:
            return to_signed(values[0], src.width) & m
        return values[0] & m
    raise ValueError(f"unknown operator {op}")


def const(value: int, width: int, signed: bool = False) -> Term:
    return _make("const", width, signed, value=value & mask(width))


def var(name: str, width: int, signed: bool = False) -> Term:
    return _make("var", width, signed, name=name)


def bool_var(name: str) -> Term:
    return var(name, 1)


TRUE = const(1, 1)
FALSE = const(0, 1)


def _same_width(a: Term, b: Term) -> None:
    if a.width != b.width:
        raise ValueError(f"width mismatch: {a.width} vs {b.width}")


def _fold(op: str, width: int, signed: bool, args: Tuple[Term, ...]) -> Term:
    if all(a.is_const for a in args):
        return const(compute(op, width, args, [a.value for a in args]), width, signed)
    return _make(op, width, signed, args)


def _zero(t: Term) -> bool:
    return t.is_const and t.value == 0


def _ones(t: Term) -> bool:
    return t.is_const and t.value == mask(t.width)


def _one(t: Term) -> bool:
    return t.is_const and t.value == 1


def add(a: Term, b: Term) -> Term:
    _same_width(a, b)
    if _zero(b):
        return a
    if _zero(a):
        return b
    return _fold("add", a.width, a.signed and b.signed, (a, b))


def sub(a: Term, b: Term) -> Term:
    _same_width(a, b)
    if _zero(b):
        return a
    if a is b:
        return const(0, a.width, a.signed)
    return _fold("sub", a.width, a.signed and b.signed, (a, b))


def mul(a: Term, b: Term) -> Term:
    _same_width(a, b)
    signed = a.signed and b.signed
    if _zero(a) or _zero(b):
        return const(0, a.width, signed)
    if _one(a):
        return b
    if _one(b):
        return a
    return _fold("mul", a.width, signed, (a, b))


def neg(a: Term) -> Term:
    if a.op == "neg":
        return a.args[0]
    return _fold("neg", a.width, a.signed, (a,))


def bvnot(a: Term) -> Term:
    if a.op == "not":
        return a.args[0]
    return _fold("not", a.width, a.signed, (a,))


def bvand(a: Term, b: Term) -> Term:
    _same_width(a, b)
    if _zero(a) or _zero(b):
        return const(0, a.width, a.signed and b.signed)
    if _ones(a) or a is b:
        return b
    if _ones(b):
        return a
    if (a.op == "not" and a.args[0] is b) or (b.op == "not" and b.args[0] is a):
        return const(0, a.width, a.signed and b.signed)
    return _fold("and", a.width, a.signed and b.signed, (a, b))


def bvor(a: Term, b: Term) -> Term:
    _same_width(a, b)
    if _ones(a) or _ones(b):
        return const(mask(a.width), a.width, a.signed and b.signed)
    if _zero(a) or a is b:
        return b
    if _zero(b):
        return a
    if (a.op == "not" and a.args[0] is b) or (b.op == "not" and b.args[0] is a):
        return const(mask(a.width), a.width, a.signed and b.signed)
    return _fold("or", a.width, a.signed and b.signed, (a, b))


def bvxor(a: Term, b: Term) -> Term:
    _same_width(a, b)
    if _zero(a):
        return b
    if _zero(b):
        return a
    if a is b:
        return const(0, a.width, a.signed and b.signed)
    return _fold("xor", a.width, a.signed and b.signed, (a, b))


def shl(a: Term, b: Term) -> Term:
    _same_width(a, b)
    if _zero(b):
        return a
    return _fold("shl", a.width, a.signed, (a, b))


def shr(a: Term, b: Term) -> Term:
    _same_width(a, b)
    if _zero(b):
        return a
    return _fold("shr", a.width, a.signed, (a, b))


def eq(a: Term, b: Term) -> Term:
    _same_width(a, b)
    if a is b:
        return TRUE
    if a.width == 1:
        if b.is_const:
            return a if b.value else bvnot(a)
        if a.is_const:
            return b if a.value else bvnot(b)
    return _fold("eq", 1, False, (a, b))


def ne(a: Term, b: Term) -> Term:
    return bvnot(eq(a, b))


def lt(a: Term, b: Term) -> Term:
    _same_width(a, b)
    if a is b:
        return FALSE
    return _fold("lt", 1, False, (a, b))


def le(a: Term, b: Term) -> Term:
    _same_width(a, b)
    if a is b:
        return TRUE
    return _fold("le", 1, False, (a, b))


def gt(a: Term, b: Term) -> Term:
    return lt(b, a)


def ge(a: Term, b: Term) -> Term:
    return le(b, a)


def ite(c: Term, a: Term, b: Term) -> Term:
    if c.width != 1:
        raise ValueError("ite condition must be Boolean")
    _same_width(a, b)
    if c.is_const:
        return a if c.value else b
    if a is b:
        return a
    if a.width == 1 and a.is_const and b.is_const:
        return c if a.value else bvnot(c)
    return _make("ite", a.width, a.signed and b.signed, (c, a, b))


def cast(a: Term, width: int, signed: bool) -> Term:
    if a.width == width and a.signed == signed:
        return a
    if a.is_const:
        return const(compute("cast", width, (a,), (a.value,)), width, signed)
    if a.op == "cast" and width <= a.width and width <= a.args[0].width:
        # truncating a widening cast sees only the original bits
        return cast(a.args[0], width, signed)
    return _make("cast", width, signed, (a,))


def not_(a: Term) -> Term:
    if a.width != 1:
        raise ValueError("logical not needs a Boolean")
    return bvnot(a)


def and_(*terms: Term) -> Term:
    return conj(terms)


def or_(*terms: Term) -> Term:
    return disj(terms)


def conj(terms: Iterable[Term]) -> Term:
    result = TRUE
    for t in terms:
        if t is FALSE:
            return FALSE
        result = bvand(result, t)
    return result


def disj(terms: Iterable[Term]) -> Term:
    result = FALSE
    for t in terms:
        if t is TRUE:
            return TRUE
        result = bvor(result, t)
    return result


def implies(a: Term, b: Term) -> Term:
    return bvor(bvnot(a), b)


def iff(a: Term, b: Term) -> Term:
    return eq(a, b)


def to_bool(a: Term) -> Term:
    """C truth value of an integer term."""
    return a if a.width == 1 else ne(a, const(0, a.width, a.signed))


def postorder(roots: Iterable[Term]) -> Iterator[Term]:
    """Yield every node reachable from ``roots`` once, operands first."""
    seen = set()
    for root in roots:
        if id(root) in seen:
            continue
        stack: List[Tuple[Term, bool]] = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                yield node
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for arg in reversed(node.args):
                if id(arg) not in seen:
                    stack.append((arg, False))


def free_vars(t: Term) -> FrozenSet[Term]:
    if t._vars is None:
        for node in postorder([t]):
            if node._vars is not None:
                continue
            if node.is_var:
                node._vars = frozenset((node,))
            elif not node.args:
                node._vars = frozenset()
            else:
                node._vars = frozenset().union(*(a._vars for a in node.args))
    return t._vars


def free_var_names(t: Term) -> FrozenSet[str]:
    return frozenset(v.name for v in free_vars(t))


_BUILDERS: Dict[str, Callable[..., Term]] = {
    "add": add,
    "sub": sub,
    "mul": mul,
    "neg": neg,
    "and": bvand,
    "or": bvor,
    "xor": bvxor,
    "not": bvnot,
    "shl": shl,
    "shr": shr,
    "eq": eq,
    "lt": lt,
    "le": le,
    "ite": ite,
}


def rebuild(node: Term, args: Sequence[Term]) -> Term:
    if not node.args:
        return node
    if all(a is b for a, b in zip(args, node.args)):
        return node
    if node.op == "cast":
        return cast(args[0], node.width, node.signed)
    return _BUILDERS[node.op](*args)


def substitute(t: Term, mapping: Mapping[Term, Term]) -> Term:
    """Replace sub-terms (normally variables) according to ``mapping``."""
    if not mapping:
        return t
    keys = {id(k): v for k, v in mapping.items()}
    for k, v in mapping.items():
        if k.width != v.width:
            raise ValueError(f"substituting {k!r} of width {k.width} by width {v.width}")
    done: Dict[int, Term] = {}
    for node in postorder([t]):
        if id(node) in keys:
            done[id(node)] = keys[id(node)]
        else:
            done[id(node)] = rebuild(node, [done[id(a)] for a in node.args])
    return done[id(t)]


_INFIX = {
    "add": "+", "sub": "-", "mul": "*", "and": "&", "or": "|", "xor": "^",
    "shl": "<<", "shr": ">>", "eq": "==", "lt": "<", "le": "<=",
}
_BOOL_INFIX = {"and": "&&", "or": "||", "xor": "!="}


def to_str(t: Term) -> str:
    """Debug rendering; shared sub-terms are printed repeatedly."""
    done: Dict[int, str] = {}
    for node in postorder([t]):
        a = [done[id(x)] for x in node.args]
        if node.is_const:
            if node.width == 1:
                s = "true" if node.value else "false"
            else:
                s = str(node.signed_value)
        elif node.is_var:
            s = node.name
        elif node.op == "not":
            s = f"!{a[0]}" if node.width == 1 else f"~{a[0]}"
        elif node.op == "neg":
            s = f"-{a[0]}"
        elif node.op == "ite":
            s = f"({a[0]} ? {a[1]} : {a[2]})"
        elif node.op == "cast":
            s = f"({'s' if node.signed else 'u'}{node.width}){a[0]}"
        else:
            sym = _BOOL_INFIX.get(node.op) if node.width == 1 and node.op in _BOOL_INFIX else _INFIX[node.op]
            s = f"({a[0]} {sym} {a[1]})"
        done[id(node)] = s
    return done[id(t)]
