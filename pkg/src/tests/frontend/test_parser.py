import logging

import pytest

from bitterm.errors import FrontendError
from bitterm.frontend import ast as A
from bitterm.frontend import parse, parse_condition, print_program
from tests.conftest import CORPUS


def test_foo2_has_one_loop_over_an_unsigned_parameter(load_program):
    program = load_program("foo2")
    assert list(program.procedures) == ["foo2"]
    proc = program.procedures["foo2"]
    assert len(proc.loops()) == 1
    assert proc.params == [A.Param(A.IntType("int", False), "x")]
    assert program.types.width(proc.params[0].ctype) == 32


def test_empty_procedure_has_no_loops():
    program = parse("void f(){}")
    assert program.procedures["f"].loops() == []
    assert program.entry == "f"


def test_direct_recursion_is_rejected():
    with pytest.raises(FrontendError, match="recursion"):
        parse("void f(){f();}")


def test_mutual_recursion_is_rejected():
    with pytest.raises(FrontendError, match="recursion"):
        parse("void f(){g();}\nvoid g(){f();}")


def test_unknown_identifier_reports_position():
    with pytest.raises(FrontendError) as info:
        parse("void f() {\n  x = 1;\n}", filename="bad.mc")
    assert info.value.line == 2
    assert info.value.render().startswith("bad.mc:2:")


def test_syntax_error_reports_position():
    with pytest.raises(FrontendError) as info:
        parse("void f() {\n  while (1 {}\n}")
    assert info.value.line == 2


@pytest.mark.parametrize(
    "source, message",
    [
        ("void f(int x) { x = x / 2; }", "division"),
        ("void f() { while (1) { break; } }", "break"),
        ("void f() { g(); }", "unknown procedure"),
        ("int g(int a) { return a; }\nvoid f() { g(); g(1, 2); }", "arguments"),
        ("void g() {}\nvoid f() { int a = g(); }", "void procedure"),
        ("void f() { return 1; }", "returns a value"),
        ("void f() { int a; int a; }", "redeclared"),
    ],
)
def test_semantic_errors(source, message):
    with pytest.raises(FrontendError, match=message):
        parse(source)


def test_for_loop_desugars_to_while():
    program = parse("void f(int n) { for (int i = 0; i < n; i++) { n = n; } }")
    outer = program.procedures["f"].body.stmts[0]
    assert isinstance(outer, A.Block)
    decl, loop = outer.stmts
    assert decl == A.Decl(A.INT, "i", A.IntLit(0))
    assert isinstance(loop, A.While)
    assert loop.body.stmts[-1] == A.Assign("i", "+=", A.IntLit(1))


def test_expression_precedence_follows_c():
    program = parse("int f(int a, int b) { return a + b * 2 << 1 & 3; }")
    ret = program.procedures["f"].body.stmts[0].value
    assert ret.op == "&"
    assert ret.left.op == "<<"
    assert ret.left.left.op == "+"
    assert ret.left.left.right.op == "*"


def test_casts_and_nondet_aliases_are_typed():
    program = parse("void f() { unsigned char c = (unsigned char)__VERIFIER_nondet_int(); int d = c + 1; }")
    c_decl, d_decl = program.procedures["f"].body.stmts[:2]
    assert isinstance(c_decl.init, A.Cast)
    assert c_decl.init.ctype == A.IntType("char", False)
    assert c_decl.init.operand.ctype == A.INT
    assert d_decl.init.ctype == A.INT


def test_mixed_signedness_converts_to_unsigned():
    program = parse("int f(unsigned a, int b) { return a < b; }")
    cond = program.procedures["f"].body.stmts[0].value
    assert cond.ctype == A.INT
    assert program.types.common(cond.left.ctype, cond.right.ctype) == A.UINT


def test_hex_and_octal_literals():
    program = parse("int f() { return 0x1F + 010 + 3u; }")
    ret = program.procedures["f"].body.stmts[0].value
    assert ret.left.left.value == 31
    assert ret.left.right.value == 8
    assert ret.right.unsigned and ret.ctype == A.UINT


def test_call_sites_are_numbered_in_source_order():
    program = parse(
        "unsigned h(unsigned y) { return y; }\n"
        "unsigned f(unsigned z) { unsigned w = h(z); if (z) { w = h(w); } else { h(1); } return w; }"
    )
    assert [c.site for c in program.procedures["f"].calls()] == [0, 1, 2]


def test_implicit_return_is_appended():
    program = parse("void f() { int a = 1; }\nint g() { int b = 2; }")
    assert program.procedures["f"].body.stmts[-1] == A.Return()
    assert program.procedures["g"].body.stmts[-1] == A.Return(A.IntLit(0))


def test_custom_widths():
    program = parse("void f(int x) {}", widths={"int": 4})
    assert program.types.range(A.INT) == (-8, 7)
    with pytest.raises(FrontendError, match="at least 2"):
        parse("void f() {}", widths={"char": 1})


def test_entry_selection():
    assert parse("void g() {}\nvoid main() { g(); }\nvoid k() {}").entry == "main"
    assert parse("void g() {}\nvoid f() { g(); }\nvoid k() {}").entry == "k"
    assert parse("void g() {}\nvoid f() { g(); }", entry="g").entry == "g"
    with pytest.raises(FrontendError):
        parse("void g() {}", entry="nope")


def test_comments_and_preprocessor_lines_are_ignored():
    program = parse("#include <stdio.h>\n/* block */ void f() { // tail\n }")
    assert list(program.procedures) == ["f"]


def test_globals_are_declared_before_procedures():
    program = parse("unsigned g = 3, k;\nvoid f() { g = g + k; }")
    assert [(d.name, d.init) for d in program.globals] == [("g", A.IntLit(3)), ("k", None)]


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*.mc")), ids=lambda p: p.stem)
def test_round_trip_through_printer(path):
    first = parse(path.read_text())
    second = parse(print_program(first))
    assert second == first
    assert print_program(second) == print_program(first)


def test_round_trip_keeps_operators_and_casts():
    source = (
        "int k = 0x10;\n"
        "int f(int a, unsigned char b) {\n"
        "  int c = -(a - -b) + ~a * !b;\n"
        "  c <<= 2;\n"
        "  c = (int)(unsigned char)(c + 1) | (a ^ b) & 7;\n"
        "  if (a > 0 && b <= 3 || a != b) { assume(a >= 1); } else if (c == 0) assert(c < 9);\n"
        "  return c;\n"
        "}\n"
    )
    first = parse(source)
    assert parse(print_program(first)) == first


def test_parse_condition_over_parameters():
    cond = parse_condition("n <= 14", {"n": A.UINT})
    assert cond == A.Binary("<=", A.Name("n"), A.IntLit(14))
    assert cond.ctype == A.INT
    with pytest.raises(FrontendError):
        parse_condition("m <= 14", {"n": A.UINT})


def test_returned_call_is_bound_to_a_temporary():
    program = parse("unsigned h(unsigned y) { return y; }\nunsigned f(unsigned z) { if (z) return h(z); return h(1); }")
    body = program.procedures["f"].body.stmts
    then = body[0].then.stmts
    assert [type(s) for s in then] == [A.Decl, A.Return]
    assert isinstance(then[0].init, A.Call) and then[0].init.name == "h"
    assert then[1].value == A.Name(then[0].name)
    assert [type(s) for s in body[1:]] == [A.Decl, A.Return]
    assert [call.site for call in (then[0].init, body[1].init)] == [0, 1]
    assert parse(print_program(program)) == program


def test_void_procedure_cannot_return_a_call():
    with pytest.raises(FrontendError, match="returns a value"):
        parse("unsigned h(unsigned y) { return y; }\nvoid f(unsigned z) { return h(z); }")


def test_parse_logs_a_formatted_summary(caplog):
    with caplog.at_level(logging.DEBUG, logger="bitterm.frontend.parser"):
        parse("void g(unsigned a, int b) { }\nvoid f(unsigned a) { g(a, 1); }")
    assert "parsed <input>: 2 procedures, entry f" in caplog.messages
