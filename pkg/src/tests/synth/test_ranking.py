import pytest

from bitterm.logic import terms as T
from bitterm.synth import LexRanking, SynthesisBounds, comp_term_arg, infer_invariant, invariant_formula


def forward_invariant(ts, templates, solver, context=T.TRUE):
    loop_templates = templates.loops(ts)
    values = infer_invariant(ts, loop_templates, context, T.TRUE, solver)
    return invariant_formula(ts, loop_templates, values)


def test_h_with_positive_step_ranks_by_minus_x(encoded, templates, solver, sessions):
    ts = encoded("h")
    context = T.ge(ts.inputs[0], T.const(1, 32))
    inv = forward_invariant(ts, templates, solver, context)
    ranking = comp_term_arg(ts, inv, T.TRUE, SynthesisBounds(), sessions, context)
    assert not ranking.top
    assert ranking.components == (((-1,),),)
    assert ranking.names == (("x",),)
    assert ranking.describe() == ["loop 0: (-x)"]


def test_h_with_zero_step_has_no_ranking(encoded, templates, solver, sessions):
    ts = encoded("h", widths={"int": 4})
    context = T.eq(ts.inputs[0], T.const(0, 4))
    inv = forward_invariant(ts, templates, solver, context)
    assert comp_term_arg(ts, inv, T.TRUE, SynthesisBounds(), sessions, context).top


def test_wrapping_counter_has_no_ranking(encoded, sessions):
    ts = encoded("wrap_char")
    assert comp_term_arg(ts, T.TRUE, T.TRUE, SynthesisBounds(), sessions).top


def test_wrapping_counter_is_ranked_when_arithmetic_is_not_widened(encoded, sessions):
    ts = encoded("wrap_char")
    ranking = comp_term_arg(ts, T.TRUE, T.TRUE, SynthesisBounds(extend_width=False), sessions)
    assert not ranking.top
    assert ranking.components == (((-1,),),)


def test_spin_loop_has_no_ranking(encoded, sessions):
    assert comp_term_arg(encoded("while_true"), T.TRUE, T.TRUE, SynthesisBounds(), sessions).top


def test_loop_free_procedure_needs_no_ranking(sessions):
    from bitterm.frontend import parse
    from bitterm.ssa import encode

    program = parse("int id(int a) { return a; }")
    ts = encode(program.procedures["id"], program)
    ranking = comp_term_arg(ts, T.TRUE, T.TRUE, SynthesisBounds(), sessions)
    assert ranking == LexRanking((), (), True)
    assert ranking.condition(ts) is T.TRUE


@pytest.mark.parametrize("max_lex, found", [(1, False), (2, True)])
def test_fig8_needs_two_components_with_small_coefficients(encoded, sessions, max_lex, found):
    ts = encoded("fig8", widths={"int": 8})
    bounds = SynthesisBounds(max_lex=max_lex, coeff_schedule=(1, 10))
    ranking = comp_term_arg(ts, T.TRUE, T.TRUE, bounds, sessions)
    assert ranking.top is not found
    if found:
        assert len(ranking.components[0]) == 2
        assert ranking.names == (("x", "y"),)


def test_fig8_small_range_is_searched_with_every_component_count_first(encoded, sessions):
    ts = encoded("fig8", widths={"int": 8})
    ranking = comp_term_arg(ts, T.TRUE, T.TRUE, SynthesisBounds(), sessions)
    (components,) = ranking.components
    assert len(components) == 2
    assert all(abs(c) <= 1 for comp in components for c in comp)


def test_fig8_single_component_needs_full_range_coefficients(encoded, sessions):
    ts = encoded("fig8", widths={"int": 8})
    ranking = comp_term_arg(ts, T.TRUE, T.TRUE, SynthesisBounds(max_lex=1), sessions)
    assert not ranking.top
    ((component,),) = ranking.components
    assert max(abs(c) for c in component) > 10


def test_ranking_condition_is_valid_in_a_fresh_session(encoded, sessions):
    from bitterm.synth import forward_body

    ts = encoded("fig8", widths={"int": 8})
    ranking = comp_term_arg(ts, T.TRUE, T.TRUE, SynthesisBounds(), sessions)
    with sessions() as session:
        assert session.check([forward_body(ts), T.not_(ranking.condition(ts))]) is None


def test_first_component_dominates():
    x, x2 = T.var("x", 4), T.var("x2", 4)
    y, y2 = T.var("y", 4), T.var("y2", 4)
    one, minus = T.const(1, 8, True), T.const(-1, 8, True)
    zero = T.const(0, 8, True)
    from bitterm.synth.ranking import lex_decrease
    from bitterm.logic.evaluate import evaluate

    formula = lex_decrease([[zero, minus], [one, zero]], [x, y], [x2, y2], 8)
    assert evaluate(formula, {"x": 3, "x2": 9, "y": 1, "y2": 2})
    assert evaluate(formula, {"x": 3, "x2": 2, "y": 5, "y2": 5})
    assert not evaluate(formula, {"x": 3, "x2": 2, "y": 5, "y2": 4})
    assert not evaluate(formula, {"x": 3, "x2": 3, "y": 5, "y2": 5})


@pytest.mark.slow
def test_fig8_at_full_width(encoded, sessions):
    ts = encoded("fig8")
    ranking = comp_term_arg(ts, T.TRUE, T.TRUE, SynthesisBounds(), sessions)
    assert not ranking.top
    assert len(ranking.components[0]) <= 2


def test_negative_coefficients_are_subtracted_not_multiplied():
    from bitterm.synth.ranking import lex_decrease

    x, x2 = T.var("x", 32), T.var("x2", 32)
    minus = T.const(-1, 34, True)
    formula = lex_decrease([[minus]], [x], [x2], 34)
    assert all(node.op != "mul" for node in T.postorder([formula]))


def test_h_ranking_at_full_width_within_the_procedure_budget(encoded, templates, solver, sessions):
    import time

    ts = encoded("h")
    context = T.ge(ts.inputs[0], T.const(1, 32))
    inv = forward_invariant(ts, templates, solver, context)
    started = time.monotonic()
    ranking = comp_term_arg(ts, inv, T.TRUE, SynthesisBounds(), sessions, context)
    assert not ranking.top
    assert time.monotonic() - started < 60
