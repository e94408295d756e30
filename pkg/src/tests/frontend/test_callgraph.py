from bitterm.frontend import build_call_graph, parse, reachable
from bitterm.frontend.callgraph import roots


def _position(order):
    return {name: i for i, name in enumerate(order)}


def test_fig1_orders_callee_first(load_program):
    assert build_call_graph(load_program("fig1")) == ["h", "f"]


def test_single_procedure():
    assert build_call_graph(parse("void f() {}")) == ["f"]


def test_diamond_respects_every_edge():
    program = parse(
        "void k() {}\n"
        "void g() { k(); }\n"
        "void h() { k(); }\n"
        "void f() { g(); h(); }\n"
    )
    order = build_call_graph(program)
    pos = _position(order)
    for caller, callee in [("f", "g"), ("f", "h"), ("g", "k"), ("h", "k")]:
        assert pos[callee] < pos[caller]
    assert order[0] == "k" and order[-1] == "f"


def test_roots_and_reachability():
    program = parse("void k() {}\nvoid g() { k(); }\nvoid f() { g(); }\nvoid lone() {}")
    assert roots(program) == ["f", "lone"]
    assert reachable(program, "g") == ["k", "g"]
    assert reachable(program, "lone") == ["lone"]
