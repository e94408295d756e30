import pytest

from bitterm.driver import Analyzer, Budget, TermStatus
from bitterm.errors import ConfigError
from bitterm.frontend import parse
from bitterm.logic import terms as T
from bitterm.logic.solver import SolverSession
from bitterm.report import read_precondition
from bitterm.synth import SynthesisBounds

WIDTH4 = {"int": 4}

DIVERGING_CALLEE = """
void spin() { while (1); }
void f(unsigned c) { if (c > 3) spin(); }
"""

ALWAYS_DIVERGING_CALLEE = """
void spin() { while (1); }
void f(unsigned c) { spin(); }
"""

TWO_CALLS = """
unsigned h(unsigned y) { unsigned x; for (x = 0; x < 10; x += y); return x; }
unsigned f(unsigned z) { unsigned a = h(z + 1); unsigned b = h(z + 1); return a + b; }
"""

INITIALIZED_GLOBAL = """
unsigned step = 1;
void main() { unsigned x = 0; while (x < 10) x += step; }
"""


def equivalent(analyzer, name, text, expected):
    """Whether the printed precondition ``text`` of ``name`` reads back as ``expected``."""
    formula = read_precondition(text, analyzer.procedures[name], analyzer.program.types)
    with SolverSession() as session:
        return session.is_valid(T.iff(formula, expected))


@pytest.fixture
def analyzer(load_program):
    def build(name, widths=None, **kwargs):
        return Analyzer(load_program(name, widths=widths), **kwargs)

    return build


@pytest.mark.parametrize("check", ["universal", "conditional"])
def test_guarded_callee_terminates(analyzer, check):
    verdict = analyzer("fig1").run(check)
    assert verdict.entry == "f"
    assert verdict.status is TermStatus.TERMINATING
    assert verdict.exit_code == 0
    assert verdict.procedure("h").status is TermStatus.TERMINATING
    if check == "conditional":
        assert verdict.precondition_text == "true"
        assert verdict.precondition is T.TRUE


def test_standalone_step_loop_needs_nonzero_step(analyzer):
    a = analyzer("h")
    verdict = a.analyze_conditional()
    assert verdict.status is TermStatus.POTENTIALLY_NON_TERMINATING
    assert verdict.exit_code == 20
    (y,) = a.procedures["h"].inputs
    assert equivalent(a, "h", verdict.precondition_text, T.ne(y, T.const(0, y.width)))


@pytest.mark.parametrize("check", ["universal", "conditional"])
def test_spin_loop_never_terminates(analyzer, check):
    verdict = analyzer("while_true").run(check)
    assert verdict.status is TermStatus.NON_TERMINATING
    assert verdict.exit_code == 10
    if check == "conditional":
        assert verdict.precondition_text == "false"
        assert verdict.precondition is T.FALSE


def test_wrapping_counter_never_exits(analyzer):
    assert analyzer("wrap_char").analyze_universal().status is TermStatus.NON_TERMINATING


def test_lexicographic_ranking_proves_termination(analyzer):
    verdict = analyzer("fig8", widths={"int": 8}).analyze_universal()
    assert verdict.status is TermStatus.TERMINATING
    (components,) = verdict.procedure("fig8").ranking.components
    assert len(components) == 2


def test_single_small_component_is_not_enough(analyzer):
    bounds = SynthesisBounds(max_lex=1, coeff_schedule=(1, 10))
    verdict = analyzer("fig8", widths={"int": 8}, bounds=bounds).analyze_universal()
    assert verdict.status is TermStatus.POTENTIALLY_NON_TERMINATING


def test_wrap_to_exit_has_no_linear_ranking(analyzer):
    assert analyzer("foo2", widths=WIDTH4).analyze_universal().status is TermStatus.POTENTIALLY_NON_TERMINATING


def test_inclusive_bound_precondition_excludes_type_maximum(analyzer):
    a = analyzer("foo1", widths=WIDTH4)
    verdict = a.analyze_conditional()
    assert verdict.status is TermStatus.POTENTIALLY_NON_TERMINATING
    (n,) = a.procedures["foo1"].inputs
    assert equivalent(a, "foo1", verdict.precondition_text, T.le(n, T.const(14, 4)))


def test_diverging_callee_makes_caller_potentially_non_terminating():
    verdict = Analyzer(parse(DIVERGING_CALLEE, widths=WIDTH4)).analyze_universal()
    assert verdict.procedure("spin").status is TermStatus.NON_TERMINATING
    assert verdict.status is TermStatus.POTENTIALLY_NON_TERMINATING


def test_diverging_callee_precondition_avoids_the_call():
    a = Analyzer(parse(DIVERGING_CALLEE, widths=WIDTH4))
    verdict = a.analyze_conditional()
    assert verdict.procedure("spin").precondition == "false"
    (c,) = a.procedures["f"].inputs
    assert equivalent(a, "f", verdict.precondition_text, T.lt(c, T.const(4, 4)))


def test_unconditional_diverging_call_never_terminates():
    verdict = Analyzer(parse(ALWAYS_DIVERGING_CALLEE, widths=WIDTH4)).analyze_universal()
    assert verdict.status is TermStatus.NON_TERMINATING


def test_covered_calling_context_reuses_stored_entry():
    a = Analyzer(parse(TWO_CALLS, widths=WIDTH4))
    a.analyze_universal()
    assert len(a.record("h").forward) == 1
    assert a.record("h").reachable_sites == set()
    assert a.record("f").reachable_sites == {site.index for site in a.procedures["f"].calls}
    calls = a.stats.calls
    a.analyze_forward("h", T.TRUE)
    assert a.stats.calls == calls + 1
    assert len(a.record("h").forward) == 1


def test_stored_context_value_is_reused_by_the_domain_order():
    a = Analyzer(parse(TWO_CALLS, widths=WIDTH4))
    a.analyze_universal()
    (entry,) = a.record("h").forward
    assert entry.context_value is not None
    calls = a.stats.calls
    a.analyze_forward("h", entry.context, entry.context_value)
    assert a.stats.calls == calls
    assert len(a.record("h").forward) == 1


def test_procedure_summaries_are_reported(analyzer):
    verdict = analyzer("fig1", widths=WIDTH4).analyze_universal()
    summary = verdict.procedure("h").summary
    assert summary and summary != ["false"]
    assert all("<=" in line for line in summary)


def test_initialized_globals_hold_at_entry():
    a = Analyzer(parse(INITIALIZED_GLOBAL, widths={"int": 8}))
    assert a.analyze_universal().status is TermStatus.TERMINATING


def test_solver_calls_are_charged_per_procedure(analyzer):
    a = analyzer("fig1", widths=WIDTH4)
    verdict = a.analyze_universal()
    per_procedure = sum(a.record(name).stats["solver_calls"] for name in a.analyzed())
    assert 0 < per_procedure <= verdict.stats["solver_calls"]
    assert verdict.stats["wall_ms"] >= 0


def test_monolithic_run_on_call_free_program_matches(analyzer):
    a = analyzer("while_true")
    ipta = a.analyze_universal()
    mta = a.analyze_monolithic()
    assert (ipta.mode, mta.mode) == ("ipta", "mta")
    assert mta.status is ipta.status is TermStatus.NON_TERMINATING


def test_monolithic_and_interprocedural_verdicts_do_not_conflict(analyzer):
    statuses = {analyzer("fig1", widths=WIDTH4).analyze_universal().status,
                analyzer("fig1", widths=WIDTH4).analyze_monolithic().status}
    assert not {TermStatus.TERMINATING, TermStatus.NON_TERMINATING} <= statuses


def test_unknown_check_is_rejected(analyzer):
    with pytest.raises(ConfigError):
        analyzer("h").run("total")


def test_exhausted_run_budget_reports_timeout(analyzer):
    budget = Budget(timeout_proc=None, timeout=1e-9)
    verdict = analyzer("fig8", widths={"int": 8}, budget=budget).analyze_universal()
    assert verdict.status is TermStatus.UNKNOWN_TIMEOUT
    assert verdict.exit_code == 30
