"""
Syntax tree of the input language.

Node equality ignores source positions and the types the checker attaches,
so trees parsed from differently formatted sources compare equal.
"""
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple, Union

Loc = Tuple[int, int]

RANKS = {"char": 1, "short": 2, "int": 3, "long": 4}
DEFAULT_WIDTHS = {"char": 8, "short": 16, "int": 32, "long": 64}


@dataclass(frozen=True)
class IntType:
    base: str = "int"
    signed: bool = True

    def __str__(self) -> str:
        if self.base == "char":
            return "char" if self.signed else "unsigned char"
        return self.base if self.signed else f"unsigned {self.base}"

    @property
    def rank(self) -> int:
        return RANKS[self.base]

    def with_signed(self, signed: bool) -> "IntType":
        return IntType(self.base, signed)


INT = IntType("int", True)
UINT = IntType("int", False)


class TypeSystem:
    """C integer promotions and usual arithmetic conversions for configurable widths."""

    def __init__(self, widths: Optional[Dict[str, int]] = None):
        self.widths = dict(DEFAULT_WIDTHS)
        self.widths.update(widths or {})

    def width(self, ctype: IntType) -> int:
        return self.widths[ctype.base]

    def range(self, ctype: IntType) -> Tuple[int, int]:
        w = self.width(ctype)
        if ctype.signed:
            return -(1 << (w - 1)), (1 << (w - 1)) - 1
        return 0, (1 << w) - 1

    def promote(self, ctype: IntType) -> IntType:
        if ctype.rank >= INT.rank:
            return ctype
        if ctype.signed or self.width(ctype) < self.width(INT):
            return INT
        return UINT

    def common(self, a: IntType, b: IntType) -> IntType:
        a, b = self.promote(a), self.promote(b)
        if a == b:
            return a
        if a.signed == b.signed:
            return a if a.rank >= b.rank else b
        unsigned, signed = (a, b) if not a.signed else (b, a)
        if unsigned.rank >= signed.rank:
            return unsigned
        if self.width(signed) > self.width(unsigned):
            return signed
        return signed.with_signed(False)


# expressions


@dataclass
class Expr:
    pass


@dataclass
class IntLit(Expr):
    value: int
    unsigned: bool = False
    long: bool = False
    loc: Loc = field(default=(0, 0), compare=False, repr=False)
    ctype: Optional[IntType] = field(default=None, compare=False, repr=False)


@dataclass
class Name(Expr):
    ident: str
    loc: Loc = field(default=(0, 0), compare=False, repr=False)
    ctype: Optional[IntType] = field(default=None, compare=False, repr=False)


@dataclass
class Unary(Expr):
    op: str
    operand: Expr
    loc: Loc = field(default=(0, 0), compare=False, repr=False)
    ctype: Optional[IntType] = field(default=None, compare=False, repr=False)


@dataclass
class Binary(Expr):
    op: str
    left: Expr
    right: Expr
    loc: Loc = field(default=(0, 0), compare=False, repr=False)
    ctype: Optional[IntType] = field(default=None, compare=False, repr=False)


@dataclass
class Cast(Expr):
    target: IntType
    operand: Expr
    loc: Loc = field(default=(0, 0), compare=False, repr=False)
    ctype: Optional[IntType] = field(default=None, compare=False, repr=False)


@dataclass
class Nondet(Expr):
    spelling: str = "nondet"
    target: IntType = INT
    loc: Loc = field(default=(0, 0), compare=False, repr=False)
    ctype: Optional[IntType] = field(default=None, compare=False, repr=False)


@dataclass
class Call:
    name: str
    args: List[Expr]
    loc: Loc = field(default=(0, 0), compare=False, repr=False)
    site: int = field(default=-1, compare=False, repr=False)


# statements


@dataclass
class Stmt:
    pass


@dataclass
class Block(Stmt):
    stmts: List[Stmt]
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Decl(Stmt):
    ctype: IntType
    name: str
    init: Union[Expr, Call, None] = None
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Assign(Stmt):
    target: str
    op: str
    value: Union[Expr, Call]
    loc: Loc = field(default=(0, 0), compare=False, repr=False)
    ctype: Optional[IntType] = field(default=None, compare=False, repr=False)


@dataclass
class CallStmt(Stmt):
    call: Call
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class If(Stmt):
    cond: Expr
    then: Block
    orelse: Optional[Block] = None
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class While(Stmt):
    cond: Expr
    body: Block
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Return(Stmt):
    value: Optional[Expr] = None
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Assume(Stmt):
    cond: Expr
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Assert(Stmt):
    cond: Expr
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class InlinedBody(Stmt):
    """A callee body spliced in at a call site; its returns assign `result` and leave the body."""

    callee: str
    body: Block
    result: Optional[str] = None
    loc: Loc = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Param:
    ctype: IntType
    name: str


@dataclass
class Procedure:
    name: str
    params: List[Param]
    ret: Optional[IntType]
    body: Block
    loc: Loc = field(default=(0, 0), compare=False, repr=False)

    def loops(self) -> List[While]:
        return [s for s in walk(self.body) if isinstance(s, While)]

    def calls(self) -> List[Call]:
        return [c for c in iter_calls(self.body)]


@dataclass
class Program:
    procedures: Dict[str, Procedure]
    globals: List[Decl] = field(default_factory=list)
    entry: str = ""
    type_widths: Dict[str, int] = field(default_factory=lambda: dict(DEFAULT_WIDTHS))
    filename: str = field(default="<input>", compare=False)

    @property
    def types(self) -> TypeSystem:
        return TypeSystem(self.type_widths)

    def global_types(self) -> Dict[str, IntType]:
        return {g.name: g.ctype for g in self.globals}


def walk(stmt: Stmt) -> Iterator[Stmt]:
    """Pre-order traversal of nested statements."""
    stack = [stmt]
    while stack:
        s = stack.pop()
        yield s
        if isinstance(s, Block):
            stack.extend(reversed(s.stmts))
        elif isinstance(s, If):
            if s.orelse is not None:
                stack.append(s.orelse)
            stack.append(s.then)
        elif isinstance(s, While):
            stack.append(s.body)
        elif isinstance(s, InlinedBody):
            stack.append(s.body)


def iter_calls(stmt: Stmt) -> Iterator[Call]:
    for s in walk(stmt):
        call = call_of(s)
        if call is not None:
            yield call


def call_of(stmt: Stmt) -> Optional[Call]:
    """The call a statement performs, if any."""
    if isinstance(stmt, CallStmt):
        return stmt.call
    if isinstance(stmt, Decl) and isinstance(stmt.init, Call):
        return stmt.init
    if isinstance(stmt, Assign) and isinstance(stmt.value, Call):
        return stmt.value
    return None
