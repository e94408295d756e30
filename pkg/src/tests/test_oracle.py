import pytest

from bitterm.driver import TermStatus
from bitterm.errors import OracleLimitExceeded
from bitterm.frontend import parse
from bitterm.logic import terms as T
from bitterm.oracle import oracle

WIDTH4 = {"int": 4}


def test_inclusive_bound_diverges_only_at_type_maximum(load_program):
    result = oracle(load_program("foo1", widths=WIDTH4))
    assert result.inputs == ("n",)
    assert result.terminating == [(n,) for n in range(15)]
    assert result.diverging == [(15,)]
    assert result.status is TermStatus.POTENTIALLY_NON_TERMINATING


def test_inclusive_bound_at_width_two(load_program):
    result = oracle(load_program("foo1", widths={"int": 2}))
    assert result.terminating == [(0,), (1,), (2,)]
    assert result.diverging == [(3,)]


def test_wrap_to_exit_terminates_everywhere(load_program):
    result = oracle(load_program("foo2", widths=WIDTH4))
    assert len(result.terminating) == 16
    assert result.status is TermStatus.TERMINATING


def test_spin_loop_diverges(load_program):
    result = oracle(load_program("while_true"))
    assert result.diverging == [()]
    assert result.status is TermStatus.NON_TERMINATING


def test_wrapping_char_counter_diverges(load_program):
    assert oracle(load_program("wrap_char")).diverging == [()]


def test_step_loop_diverges_for_steps_that_cycle_below_the_bound(load_program):
    # at four bits, a step of 8 cycles through 0 and 8
    assert oracle(load_program("h", widths=WIDTH4)).diverging == [(0,), (8,)]


def test_calls_are_followed_into_the_callee(load_program):
    assert oracle(load_program("fig1", widths=WIDTH4)).diverging == [(8,)]


@pytest.mark.parametrize(
    "source, diverging",
    [
        ("void f() { int x = nondet(); while (x > 0) x--; }", []),
        ("void f() { int x = nondet(); while (x != 0) x = nondet(); }", [()]),
        ("void f(unsigned n) { assume(n < 3); while (n != 5) n++; }", []),
        ("void f(unsigned n) { assert(n == 0); while (n != 0) n++; }", []),
        ("unsigned step = 1;\nvoid main() { unsigned x = 0; while (x < 10) x += step; }", []),
        ("unsigned step;\nvoid main() { unsigned x = 0; while (x < 10) x += step; }", [()]),
        ("void f() { unsigned x; while (x < 10) x++; }", []),
        ("unsigned g(unsigned a) { return a + 1; }\nvoid f(unsigned n) { unsigned x = 0; while (x < n) x += g(0); }",
         []),
    ],
)
def test_small_programs(source, diverging):
    assert oracle(parse(source, widths=WIDTH4)).diverging == diverging


def test_nondeterministic_exit_diverges_if_some_path_does():
    result = oracle(parse("void f(unsigned c) { while (c > 0) { if (nondet()) c--; } }", widths=WIDTH4))
    assert result.terminating == [(0,)]


def test_verdicts_against_outcomes(load_program):
    result = oracle(load_program("foo1", widths=WIDTH4))
    assert result.contradicts(TermStatus.TERMINATING)
    assert result.contradicts(TermStatus.NON_TERMINATING)
    assert not result.contradicts(TermStatus.POTENTIALLY_NON_TERMINATING)
    assert not result.contradicts(TermStatus.UNKNOWN_TIMEOUT)


def test_precondition_violations(load_program):
    result = oracle(load_program("foo1", widths=WIDTH4))
    n = T.var("n", 4)
    assert result.violations(T.le(n, T.const(14, 4)), [n]) == []
    assert result.violations(T.TRUE, [n]) == [(15,)]


def test_rows_list_every_input(load_program):
    rows = oracle(load_program("foo1", widths={"int": 2})).rows()
    assert [r["n"] for r in rows] == [0, 1, 2, 3]
    assert [r["terminates"] for r in rows] == [True, True, True, False]


def test_state_space_guard(load_program):
    with pytest.raises(OracleLimitExceeded):
        oracle(load_program("foo1", widths=WIDTH4), max_states=8)
