from pathlib import Path

import pytest

from bitterm.config import RunConfig, load_run_config
from bitterm.errors import ConfigError
from bitterm.frontend import parse
from bitterm.synth import SynthesisBounds

PROJECT_CONF = Path(__file__).resolve().parents[2] / "conf"


def test_project_parameters_match_builtin_defaults():
    config = load_run_config(PROJECT_CONF)
    assert config == RunConfig()
    assert config.bounds.coeff_schedule == (1, 10, None)
    assert config.type_widths["int"] == 32


def test_missing_conf_directory_gives_defaults(tmp_path):
    assert load_run_config(tmp_path / "nowhere") == RunConfig()


def test_base_parameters_are_read_without_local_env(tmp_path):
    base = tmp_path / "base"
    base.mkdir()
    (base / "parameters.yml").write_text("analysis:\n  check: universal\n  bounds:\n    max_lex: 2\n")
    config = load_run_config(tmp_path)
    assert config.check == "universal"
    assert config.bounds == SynthesisBounds(max_lex=2)


def test_overrides_win_and_none_is_ignored(tmp_path):
    config = load_run_config(tmp_path, overrides={"max_lex": 1, "type_widths": {"int": 4}, "mode": None,
                                                  "coeff_schedule": "1,full"})
    assert config.bounds.max_lex == 1
    assert config.bounds.coeff_schedule == (1, None)
    assert config.type_widths["int"] == 4
    assert config.type_widths["char"] == 8
    assert config.mode == "ipta"


@pytest.mark.parametrize(
    "params",
    [
        {"analysis": {"colour": "red"}},
        {"analysis": {"bounds": {"max_depth": 3}}},
        {"analysis": {"mode": "fast"}},
        {"analysis": {"check": "total"}},
        {"analysis": {"type_widths": {"int": 1}}},
        {"analysis": {"type_widths": {"byte": 8}}},
        {"analysis": {"budgets": {"timeout": -5}}},
        {"analysis": {"bounds": {"coeff_schedule": "1,abc"}}},
        {"analysis": {"oracle": {"width": 9}}},
    ],
)
def test_invalid_parameters(params):
    with pytest.raises(ConfigError):
        RunConfig.from_params(params)


def test_zero_budget_disables_it():
    config = RunConfig.from_params({"budgets": {"timeout_proc": 0, "timeout": 10}})
    assert config.timeout_proc is None
    assert config.budget().timeout == 10


def test_nested_sections():
    config = RunConfig.from_params({
        "analysis": {
            "solver": {"backend": "cdcl"},
            "output": {"json": True, "emit_dimacs": "last.cnf"},
            "oracle": {"enabled": True, "width": 3},
        }
    })
    assert config.solver.backend == "cdcl"
    assert (config.json, config.emit_dimacs) == (True, "last.cnf")
    assert (config.oracle, config.oracle_width) == (True, 3)
    assert config.oracle_widths["int"] == 3


def test_analyzer_follows_mode():
    program = parse("void f() {}")
    assert not RunConfig().analyzer(program).monolithic
    assert RunConfig(mode="mta").analyzer(program).mode == "mta"
