"""
pyparsing grammar for the analyzed C subset.

The published EBNF lives in ``docs/source/grammar.rst``. Parse actions build
``bitterm.frontend.ast`` nodes directly; ``for`` loops and ``++``/``--`` are
desugared here so the checker and encoder only see the core statements.
"""
import logging
import re
from typing import Dict, List, Mapping, Optional

import pyparsing as pp

from bitterm.errors import FrontendError
from bitterm.frontend import ast as A
from bitterm.frontend.checker import check, type_expression

pp.ParserElement.enable_packrat()

logger = logging.getLogger(__name__)

KEYWORDS = (
    "if", "else", "while", "for", "return", "void", "unsigned", "signed", "char", "short", "int", "long",
    "assume", "assert", "break", "continue", "nondet",
)

NONDET_TYPES = {
    "nondet": A.INT,
    "__VERIFIER_nondet_int": A.INT,
    "__VERIFIER_nondet_uint": A.UINT,
    "__VERIFIER_nondet_char": A.IntType("char", True),
    "__VERIFIER_nondet_uchar": A.IntType("char", False),
    "__VERIFIER_nondet_short": A.IntType("short", True),
    "__VERIFIER_nondet_ushort": A.IntType("short", False),
    "__VERIFIER_nondet_long": A.IntType("long", True),
    "__VERIFIER_nondet_ulong": A.IntType("long", False),
}

_LITERAL = re.compile(r"(0[xX][0-9a-fA-F]+|\d+)([uUlL]*)")


def _loc(s: str, loc: int) -> A.Loc:
    return pp.lineno(loc, s), pp.col(loc, s)


def _int_type(s, loc, t):
    words = t[0].split()
    signed = "unsigned" not in words
    for base in ("char", "short", "long"):
        if base in words:
            return A.IntType(base, signed)
    return A.IntType("int", signed)


def _int_lit(s, loc, t):
    digits, suffix = _LITERAL.fullmatch(t[0]).groups()
    lowered = suffix.lower()
    if lowered.count("u") > 1 or lowered.replace("u", "") not in ("", "l", "ll"):
        raise pp.ParseFatalException(s, loc, f"invalid integer suffix {suffix!r}")
    if digits[:2].lower() == "0x":
        value = int(digits, 16)
    elif len(digits) > 1 and digits.startswith("0"):
        if not set(digits) <= set("01234567"):
            raise pp.ParseFatalException(s, loc, f"invalid octal literal {digits!r}")
        value = int(digits, 8)
    else:
        value = int(digits)
    return A.IntLit(value, "u" in lowered, "l" in lowered, loc=_loc(s, loc))


def _nondet(s, loc, t):
    return A.Nondet(t[0], NONDET_TYPES[t[0]], loc=_loc(s, loc))


class _CastOp:
    def __init__(self, target: A.IntType):
        self.target = target


def _unary(s, loc, t):
    op, operand = t[0][0], t[0][1]
    if isinstance(op, _CastOp):
        return A.Cast(op.target, operand, loc=_loc(s, loc))
    return A.Unary(op, operand, loc=_loc(s, loc))


def _binary(s, loc, t):
    items = t[0]
    node = items[0]
    for i in range(1, len(items), 2):
        node = A.Binary(items[i], node, items[i + 1], loc=_loc(s, loc))
    return node


def _reject(message: str):
    def action(s, loc, t):
        raise pp.ParseFatalException(s, loc, message)

    return action


def _as_block(stmt) -> A.Block:
    return stmt if isinstance(stmt, A.Block) else A.Block([stmt], loc=getattr(stmt, "loc", (0, 0)))


def _call(s, loc, t):
    return A.Call(t[0], list(t[1:]), loc=_loc(s, loc))


def _decl(s, loc, t):
    ctype = t[0]
    out = []
    for declarator in t[1:]:
        init = declarator[1] if len(declarator) > 1 else None
        out.append(A.Decl(ctype, declarator[0], init, loc=_loc(s, loc)))
    return out


def _assign(s, loc, t):
    return A.Assign(t[0], t[1], t[2], loc=_loc(s, loc))


def _incdec(s, loc, t):
    name, op = (t[0], t[1]) if t[1] in ("++", "--") else (t[1], t[0])
    return A.Assign(name, "+=" if op == "++" else "-=", A.IntLit(1, loc=_loc(s, loc)), loc=_loc(s, loc))


def _if(s, loc, t):
    orelse = _as_block(t[2]) if len(t) > 2 else None
    return A.If(t[0], _as_block(t[1]), orelse, loc=_loc(s, loc))


def _for(s, loc, t):
    init, cond, step, body = list(t[0]), t[1], list(t[2]), t[3]
    where = _loc(s, loc)
    cond = cond[0] if len(cond) else A.IntLit(1, loc=where)
    loop = A.While(cond, A.Block([_as_block(body)] + step, loc=where), loc=where)
    return A.Block(init + [loop], loc=where)


def _procedure(s, loc, t):
    ret = None if t[0] == "void" else t[0]
    params = [A.Param(p[0], p[1]) for p in t[2]]
    return A.Procedure(t[1], params, ret, t[3], loc=_loc(s, loc))


def _grammar():
    LPAR, RPAR, LBRACE, RBRACE, SEMI = map(pp.Suppress, "(){};")

    keyword = pp.Regex(r"(?:" + "|".join(KEYWORDS) + r"|__VERIFIER_\w+)\b")
    ident = (~keyword + pp.Regex(r"[A-Za-z_]\w*")).set_name("identifier")
    type_spec = pp.Regex(
        r"(?:(?:un)?signed\s+)?(?:char|short(?:\s+int)?|long(?:\s+long)?(?:\s+int)?|int)\b|(?:un)?signed\b"
    ).set_name("type").set_parse_action(_int_type)
    VOID = pp.Regex(r"void\b")

    int_lit = pp.Regex(r"(?:0[xX][0-9a-fA-F]+|\d+)[uUlL]*\b").set_name("integer").set_parse_action(_int_lit)
    nondet = (pp.Regex(r"(?:" + "|".join(NONDET_TYPES) + r")\b") + LPAR + RPAR).set_parse_action(_nondet)
    name = ident.copy().set_parse_action(lambda s, loc, t: A.Name(t[0], loc=_loc(s, loc)))
    cast_op = (LPAR + type_spec + RPAR).set_parse_action(lambda t: _CastOp(t[0]))
    division = pp.Regex(r"[/%](?!=)").set_parse_action(_reject("division and modulo are not supported"))

    expr = pp.infix_notation(
        int_lit | nondet | name,
        [
            (pp.Regex(r"!(?!=)|~|-(?!-)|\+(?!\+)") | cast_op, 1, pp.OpAssoc.RIGHT, _unary),
            (pp.Regex(r"\*(?!=)") | division, 2, pp.OpAssoc.LEFT, _binary),
            (pp.Regex(r"\+(?![+=])|-(?![-=])"), 2, pp.OpAssoc.LEFT, _binary),
            (pp.Regex(r"(?:<<|>>)(?!=)"), 2, pp.OpAssoc.LEFT, _binary),
            (pp.Regex(r"<=|>=|<|>"), 2, pp.OpAssoc.LEFT, _binary),
            (pp.Regex(r"==|!="), 2, pp.OpAssoc.LEFT, _binary),
            (pp.Regex(r"&(?![&=])"), 2, pp.OpAssoc.LEFT, _binary),
            (pp.Regex(r"\^(?!=)"), 2, pp.OpAssoc.LEFT, _binary),
            (pp.Regex(r"\|(?![|=])"), 2, pp.OpAssoc.LEFT, _binary),
            (pp.Literal("&&"), 2, pp.OpAssoc.LEFT, _binary),
            (pp.Literal("||"), 2, pp.OpAssoc.LEFT, _binary),
        ],
    ).set_name("expression")

    call = (ident + LPAR + pp.Optional(pp.DelimitedList(expr)) + RPAR).set_parse_action(_call)
    rhs = call | expr
    declarator = pp.Group(ident + pp.Optional(pp.Suppress(pp.Regex(r"=(?!=)")) + rhs))
    decl = (type_spec + pp.DelimitedList(declarator)).set_parse_action(_decl)
    assign = (ident + pp.Regex(r"(?:<<|>>|[-+*&|^])?=(?!=)") + rhs).set_parse_action(_assign)
    incdec_op = pp.Regex(r"\+\+|--")
    incdec = ((ident + incdec_op) | (incdec_op + ident)).set_parse_action(_incdec)
    call_stmt = call.copy().add_parse_action(lambda s, loc, t: A.CallStmt(t[0], loc=_loc(s, loc)))
    simple = assign | incdec | call_stmt

    stmt = pp.Forward()
    block_item = pp.Forward()
    block = (LBRACE + pp.ZeroOrMore(block_item) + RBRACE).set_parse_action(
        lambda s, loc, t: A.Block(list(t), loc=_loc(s, loc))
    )
    if_stmt = (
        pp.Suppress(pp.Keyword("if")) + LPAR + expr + RPAR + stmt + pp.Optional(pp.Suppress(pp.Keyword("else")) + stmt)
    ).set_parse_action(_if)
    while_stmt = (pp.Suppress(pp.Keyword("while")) + LPAR + expr + RPAR + stmt).set_parse_action(
        lambda s, loc, t: A.While(t[0], _as_block(t[1]), loc=_loc(s, loc))
    )
    for_stmt = (
        pp.Suppress(pp.Keyword("for")) + LPAR
        + pp.Group(pp.Optional(decl | simple)) + SEMI
        + pp.Group(pp.Optional(expr)) + SEMI
        + pp.Group(pp.Optional(simple)) + RPAR + stmt
    ).set_parse_action(_for)
    return_stmt = (pp.Suppress(pp.Keyword("return")) + pp.Optional(call | expr) + SEMI).set_parse_action(
        lambda s, loc, t: A.Return(t[0] if len(t) else None, loc=_loc(s, loc))
    )
    check_stmt = (pp.Regex(r"(?:__VERIFIER_)?(?:assume|assert)\b") + LPAR + expr + RPAR + SEMI).set_parse_action(
        lambda s, loc, t: (A.Assume if t[0].endswith("assume") else A.Assert)(t[1], loc=_loc(s, loc))
    )
    unsupported = pp.Regex(r"(?:break|continue)\b").set_parse_action(
        lambda s, loc, t: _reject(f"'{t[0]}' is not supported")(s, loc, t)
    )
    empty = SEMI.copy().set_parse_action(lambda s, loc, t: A.Block([], loc=_loc(s, loc)))

    stmt <<= block | if_stmt | while_stmt | for_stmt | return_stmt | check_stmt | unsupported | (simple + SEMI) | empty
    block_item <<= (decl + SEMI) | stmt

    param = pp.Group(type_spec + ident)
    params = pp.Group(pp.Optional(pp.Suppress(VOID + pp.FollowedBy(")")) | pp.DelimitedList(param)))
    procedure = ((type_spec | VOID) + ident + LPAR - params + RPAR + block).set_parse_action(_procedure)
    program = pp.ZeroOrMore(procedure | (decl + SEMI)) + pp.StringEnd()
    program.ignore(pp.cpp_style_comment)
    program.ignore(pp.Regex(r"#[^\n]*"))

    condition = expr + pp.StringEnd()
    condition.ignore(pp.cpp_style_comment)
    return program, condition


_PROGRAM, _CONDITION = _grammar()


def parse_items(source: str, filename: str = "<input>") -> List:
    """Raw top-level items (procedures and global declarations) in source order."""
    try:
        return list(_PROGRAM.parse_string(source, parse_all=True))
    except pp.ParseBaseException as e:
        raise FrontendError(e.msg, e.lineno, e.col, filename) from e


def parse(source: str, filename: str = "<input>", widths: Optional[Mapping[str, int]] = None,
          entry: Optional[str] = None) -> A.Program:
    """
    Parse and type-check a program.

    Parameters:
    - source (str): Program text.
    - filename (str): Name used in diagnostics.
    - widths (Mapping[str, int]): Bit widths overriding the defaults per base type.
    - entry (str): Entry procedure; defaults to ``main`` or the last root procedure.

    Returns:
    A.Program: The checked program, procedures in definition order.
    """
    items = parse_items(source, filename)
    procedures: Dict[str, A.Procedure] = {}
    globals_: List[A.Decl] = []
    for item in items:
        if isinstance(item, A.Procedure):
            if item.name in procedures:
                raise FrontendError(f"procedure '{item.name}' defined twice", *item.loc, filename)
            procedures[item.name] = item
        else:
            globals_.append(item)
    type_widths = dict(A.DEFAULT_WIDTHS)
    type_widths.update(widths or {})
    program = A.Program(procedures, globals_, entry or "", type_widths, filename)
    program = check(program)
    logger.debug(f"parsed {filename}: {len(program.procedures)} procedures, entry {program.entry}")
    return program


def parse_condition(text: str, params: Mapping[str, A.IntType], widths: Optional[Mapping[str, int]] = None) -> A.Expr:
    """Parse and type a condition over the given parameters, e.g. a printed precondition."""
    try:
        expr = _CONDITION.parse_string(text, parse_all=True)[0]
    except pp.ParseBaseException as e:
        raise FrontendError(e.msg, e.lineno, e.col, "<condition>") from e
    return type_expression(expr, params, A.TypeSystem(widths))
