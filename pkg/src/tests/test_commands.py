import json

import pandas as pd
import pytest
from click.testing import CliRunner

from bitterm.commands import cli, main
from bitterm.report import validate_report
from tests.conftest import CORPUS


@pytest.fixture
def invoke(tmp_path):
    """Run the CLI against built-in defaults instead of the project configuration."""
    runner = CliRunner()
    conf = tmp_path / "no_conf"

    def run(*args):
        return runner.invoke(cli, ["--conf-source", str(conf), *map(str, args)], catch_exceptions=False)

    return run


def program(name):
    return CORPUS / f"{name}.mc"


class TestRun:
    def test_terminating_program_exits_zero(self, invoke):
        result = invoke("run", program("fig1"))
        assert result.exit_code == 0
        assert "f (ipta, conditional): TERMINATING" in result.output
        assert "precondition: true" in result.output

    def test_non_terminating_program_exits_ten(self, invoke):
        assert invoke("run", program("while_true"), "--check", "universal").exit_code == 10

    def test_conditional_termination_exits_twenty(self, invoke):
        assert invoke("run", program("h")).exit_code == 20

    def test_json_report(self, invoke):
        result = invoke("run", program("h"), "--json")
        report = json.loads(result.output[result.output.index("{"):])
        validate_report(report)
        assert report["status"] == "POTENTIALLY_NON_TERMINATING"
        assert report["precondition"] not in (None, "true", "false")

    def test_exhausted_budget_exits_thirty(self, invoke):
        assert invoke("run", program("fig8"), "--width-int", "8", "--check", "universal",
                      "--timeout", "1e-9").exit_code == 30

    def test_monolithic_mode(self, invoke):
        result = invoke("run", program("while_true"), "--mode", "mta", "--check", "universal")
        assert result.exit_code == 10
        assert "(mta, universal)" in result.output

    def test_emit_ssa_prints_encoded_procedures(self, invoke):
        result = invoke("run", program("h"), "--emit-ssa", "--width-int", "4")
        assert "procedure h(" in result.output
        assert "Trans_h:" in result.output

    def test_emit_dimacs_writes_last_query(self, invoke, tmp_path):
        target = tmp_path / "last.cnf"
        invoke("run", program("foo2"), "--width-int", "4", "--emit-dimacs", target)
        assert "p cnf" in target.read_text()

    def test_oracle_confirms_precondition(self, invoke):
        result = invoke("run", program("foo1"), "--width-int", "4", "--oracle")
        assert result.exit_code == 20
        assert "15 of 16 inputs terminate" in result.output

    def test_cdcl_backend_agrees(self, invoke):
        result = invoke("run", program("while_true"), "--check", "universal", "--solver", "cdcl")
        assert result.exit_code == 10

    def test_parse_error_exits_one(self, invoke, tmp_path):
        source = tmp_path / "broken.mc"
        source.write_text("void f( {")
        result = invoke("run", source)
        assert result.exit_code == 1
        assert "broken.mc" in result.output

    def test_invalid_configuration_exits_one(self, tmp_path):
        conf = tmp_path / "conf"
        (conf / "base").mkdir(parents=True)
        (conf / "base" / "parameters.yml").write_text("analysis:\n  mode: fast\n")
        result = CliRunner().invoke(cli, ["--conf-source", str(conf), "run", str(program("h"))])
        assert result.exit_code == 1
        assert "mode must be one of" in result.output


class TestMain:
    def test_usage_errors_exit_one(self, tmp_path):
        with pytest.raises(SystemExit) as exit_info:
            main(["--conf-source", str(tmp_path / "none"), "run"])
        assert exit_info.value.code == 1

    def test_exit_code_is_the_verdict(self, tmp_path):
        with pytest.raises(SystemExit) as exit_info:
            main(["--conf-source", str(tmp_path / "none"), "run", str(program("while_true")), "--check", "universal"])
        assert exit_info.value.code == 10


def test_oracle_command_lists_every_input(invoke):
    result = invoke("oracle", program("foo1"), "--width", "4")
    assert result.exit_code == 0
    assert "POTENTIALLY_NON_TERMINATING: 15 of 16 inputs terminate" in result.output


def test_oracle_width_is_bounded(invoke):
    assert invoke("oracle", program("foo1"), "--width", "12").exit_code == 2


def test_corpus_command_writes_results(invoke, tmp_path):
    sources = tmp_path / "programs"
    sources.mkdir()
    for name in ("while_true", "foo2"):
        (sources / f"{name}.mc").write_text(program(name).read_text())
    output = tmp_path / "results.csv"
    result = invoke("corpus", sources, "--mode", "ipta", "--mode", "mta", "--width-int", "4", "--output", output)
    assert result.exit_code == 0
    results = pd.read_csv(output)
    assert len(results) == 4
    assert set(results["mode"]) == {"ipta", "mta"}
    assert "conflicts" in result.output
