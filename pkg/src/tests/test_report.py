import pytest
from rich.console import Console

from bitterm.driver import Analyzer, ProcedureVerdict, TermStatus, Verdict
from bitterm.errors import ReportError
from bitterm.logic import terms as T
from bitterm.logic.solver import SolverSession
from bitterm.report import build_report, ranking_components, read_precondition, render_summary, validate_report
from bitterm.synth import LexRanking

FIG8_RANKING = LexRanking((((0, -1), (1, 0)),), (("x", "y"),))


@pytest.fixture
def verdict():
    return Verdict(
        "fig8", "ipta", "universal", TermStatus.TERMINATING,
        [ProcedureVerdict("fig8", TermStatus.TERMINATING, FIG8_RANKING)],
        stats={"solver_calls": 12, "solver_seconds": 0.25, "wall_ms": 310},
    )


def test_report_layout(verdict):
    report = build_report(verdict, "fig8.mc")
    assert report["file"] == "fig8.mc"
    assert report["status"] == "TERMINATING"
    assert report["precondition"] is None
    assert report["procedures"] == [
        {"name": "fig8", "status": "TERMINATING", "ranking": [[[0, -1], [1, 0]]], "precondition": None, "summary": []}
    ]
    assert report["stats"]["solver_calls"] == 12


@pytest.mark.parametrize(
    "ranking, expected",
    [
        (None, None),
        (LexRanking.unknown(), None),
        (LexRanking((None, ((1,),)), ((), ("i",))), [None, [[1]]]),
        (LexRanking(), []),
    ],
)
def test_ranking_components(ranking, expected):
    assert ranking_components(ranking) == expected


@pytest.mark.parametrize(
    "change",
    [
        lambda r: r.update(status="MAYBE"),
        lambda r: r["stats"].pop("wall_ms"),
        lambda r: r["procedures"][0].update(extra=1),
        lambda r: r.update(mode="fast"),
    ],
)
def test_schema_rejects_malformed_reports(verdict, change):
    report = build_report(verdict, "fig8.mc")
    change(report)
    with pytest.raises(ReportError):
        validate_report(report)


def test_conditional_report_reads_back(load_program):
    analyzer = Analyzer(load_program("foo1", widths={"int": 4}))
    report = build_report(analyzer.analyze_conditional(), "foo1.mc")
    ts = analyzer.procedures["foo1"]
    (n,) = ts.inputs
    pre = read_precondition(report["precondition"], ts, analyzer.program.types)
    with SolverSession() as session:
        assert session.is_valid(T.iff(pre, T.le(n, T.const(14, 4))))


def test_read_precondition_constants(load_program):
    analyzer = Analyzer(load_program("h", widths={"int": 4}))
    ts = analyzer.procedures["h"]
    assert read_precondition("true", ts, analyzer.program.types) is T.TRUE
    assert read_precondition("false", ts, analyzer.program.types) is T.FALSE


def test_summary_table(verdict):
    console = Console(record=True, width=120)
    render_summary(verdict, console)
    text = console.export_text()
    assert "fig8 (ipta, universal): TERMINATING" in text
    assert "loop 0: (-y, x)" in text
    assert "solver_calls=12" in text
