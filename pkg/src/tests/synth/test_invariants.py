import itertools

from bitterm.absdom import AbstractValue, Bound, concretize
from bitterm.frontend import parse
from bitterm.logic import terms as T
from bitterm.logic.evaluate import evaluate
from bitterm.ssa import Signature, encode
from bitterm.synth import comp_callctx_o, comp_inv_sum_o, infer_invariant

WIDTH4 = {"int": 4}


def models(formula, variables, fixed=None):
    """All width-4 valuations of ``variables`` satisfying ``formula``."""
    out = set()
    for values in itertools.product(range(16), repeat=len(variables)):
        valuation = dict(fixed or {})
        valuation.update({v.name: x for v, x in zip(variables, values)})
        if evaluate(formula, valuation):
            out.add(values)
    return out


def test_h_invariant_under_unit_step(encoded, templates, solver):
    ts = encoded("h", widths=WIDTH4)
    loop_templates = templates.loops(ts)
    y = ts.inputs[0]
    (inv,) = infer_invariant(ts, loop_templates, T.eq(y, T.const(1, 4)), T.TRUE, solver)
    template = loop_templates[0]
    formula = concretize(template, inv, {ts.loops[0].head_guard: T.TRUE})
    assert models(formula, template.variables) == {(x, 1) for x in range(1, 11)}


def test_h_invariant_under_zero_step_is_the_start_value(encoded, templates, solver):
    ts = encoded("h", widths=WIDTH4)
    loop_templates = templates.loops(ts)
    (inv,) = infer_invariant(ts, loop_templates, T.eq(ts.inputs[0], T.const(0, 4)), T.TRUE, solver)
    formula = concretize(loop_templates[0], inv, {ts.loops[0].head_guard: T.TRUE})
    assert models(formula, loop_templates[0].variables) == {(0, 0)}


def test_h_summary_under_unit_step(encoded, templates, solver):
    ts = encoded("h", widths=WIDTH4)
    context = T.eq(ts.inputs[0], T.const(1, 4))
    _, summary = comp_inv_sum_o(ts, templates.loops(ts), templates.summary(ts), context, T.TRUE, solver)
    template = templates.summary(ts)
    formula = concretize(template, summary, {ts.exit_guard: T.TRUE})
    assert models(formula, template.variables) == {(1, 10)}


def test_unreachable_exit_gives_bottom_summary(templates, solver):
    program = parse("void f(int x) { assume(0); }")
    ts = encode(program.procedures["f"], program)
    invs, summary = comp_inv_sum_o(ts, [], templates.summary(ts), T.TRUE, T.TRUE, solver)
    assert invs == []
    assert summary.is_bottom


def test_loop_free_summary_is_exact(templates, solver):
    program = parse("int inc(int a) { return a + 1; }", widths=WIDTH4)
    ts = encode(program.procedures["inc"], program)
    context = T.eq(ts.inputs[0], T.const(5, 4, True))
    _, summary = comp_inv_sum_o(ts, [], templates.summary(ts), context, T.TRUE, solver)
    assert summary == AbstractValue((5, -5, 6, -6))


def test_fig1_calling_context_of_h(load_program, templates, solver):
    program = load_program("fig1", widths=WIDTH4)
    f = encode(program.procedures["f"], program)
    h = encode(program.procedures["h"], program)
    contexts = comp_callctx_o(
        f, templates.loops(f), {"h": templates.context(h)}, {"h": Signature.of(h)}, T.TRUE, T.TRUE, solver
    )
    assert contexts == {0: AbstractValue((Bound.TOP, -1, Bound.TOP, Bound.TOP))}


def test_context_of_unreachable_site_is_bottom(templates, solver):
    program = parse("void g(int a) {}\nvoid f(int x) { if (x > 5) { if (x < 3) g(x); } }")
    f = encode(program.procedures["f"], program)
    g = encode(program.procedures["g"], program)
    contexts = comp_callctx_o(f, [], {"g": templates.context(g)}, {"g": Signature.of(g)}, T.TRUE, T.TRUE, solver)
    assert contexts[0].is_bottom


def test_context_of_site_inside_loop(templates, solver):
    program = parse(
        "void g(unsigned a) {}\nvoid f() { unsigned i = 0; while (i < 3) { g(i); i++; } }", widths=WIDTH4
    )
    f = encode(program.procedures["f"], program)
    g = encode(program.procedures["g"], program)
    contexts = comp_callctx_o(
        f, templates.loops(f), {"g": templates.context(g)}, {"g": Signature.of(g)}, T.TRUE, T.TRUE, solver
    )
    assert contexts[0] == AbstractValue((2, Bound.TOP))
