import pytest

from bitterm.frontend import parse
from bitterm.logic import terms as T
from bitterm.logic.evaluate import evaluate
from bitterm.ssa import Signature, encode
from bitterm.ssa.summaries import instantiate
from bitterm.synth import BackwardAnalysis, LexRanking, SynthesisBounds

WIDTH4 = {"int": 4}

CALLER = """
unsigned h(unsigned y) { unsigned x; for (x = 0; x < 10; x += y); return x; }
unsigned f(unsigned z) { return h(z); }
"""


@pytest.fixture
def backward(templates, solver):
    def build(ts, **kwargs):
        return BackwardAnalysis(ts, templates, solver, SynthesisBounds(), **kwargs)

    return build


def test_h_terminates_exactly_for_nonzero_step(encoded, backward, sessions):
    ts = encoded("h")
    (y,) = ts.inputs
    pre = backward(ts).comp_precond_term()
    with sessions() as session:
        assert session.is_valid(T.iff(pre, T.ne(y, T.const(0, 32))))


def test_foo1_terminates_below_the_type_maximum(encoded, backward):
    ts = encoded("foo1", widths=WIDTH4)
    (n,) = ts.inputs
    pre = backward(ts).comp_precond_term()
    assert [evaluate(pre, {n.name: v}) for v in range(16)] == [True] * 15 + [False]


def test_spin_loop_has_false_precondition(encoded, backward):
    assert backward(encoded("while_true")).comp_precond_term() is T.FALSE


def test_unranked_reachable_loop_makes_every_input_bad(encoded, backward):
    ts = encoded("while_true")
    pre_u = backward(ts).comp_nec_precond(LexRanking((None,), ((),)))
    assert pre_u.is_top


def test_unknown_ranking_is_not_checked(encoded, backward):
    ts = encoded("h", widths=WIDTH4)
    assert backward(ts).comp_nec_precond(LexRanking.unknown()).is_bottom


def test_callee_precondition_propagates_to_caller(templates, backward, sessions):
    program = parse(CALLER, widths=WIDTH4)
    f = encode(program.procedures["f"], program)
    h = encode(program.procedures["h"], program)
    (site,) = f.calls
    callee_pre = T.ne(h.inputs[0], T.const(0, 4))
    preconds = {site.index: instantiate(site, callee_pre, Signature.of(h))}
    pre = backward(f).comp_precond_term(callee_preconds=preconds)
    with sessions() as session:
        assert session.is_valid(T.iff(pre, T.ne(f.inputs[0], T.const(0, 4))))


def test_backward_context_without_requirement_is_true(load_program, templates, backward, sessions):
    program = load_program("fig1", widths=WIDTH4)
    f = encode(program.procedures["f"], program)
    h = encode(program.procedures["h"], program)
    (site,) = f.calls
    ctx = backward(f).comp_callctx_u(T.TRUE, site, templates.context(h), Signature.of(h))
    with sessions() as session:
        assert session.is_valid(ctx)


def test_backward_context_of_unreachable_site_is_false(templates, backward):
    program = parse("void g(int a) {}\nvoid f(int x) { if (x > 5) { if (x < 3) g(x); } }")
    f = encode(program.procedures["f"], program)
    g = encode(program.procedures["g"], program)
    (site,) = f.calls
    assert backward(f).comp_callctx_u(T.TRUE, site, templates.context(g), Signature.of(g)) is T.FALSE
