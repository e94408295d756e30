"""
Command line of bitterm: ``run`` analyses one file, ``oracle`` decides it by
exhaustive exploration at a small width, ``corpus`` runs a directory.

Exit codes of ``run``: 0 terminating, 10 non-terminating, 20 potentially
non-terminating, 30 out of time, 1 for usage and input errors.
"""
import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
import yaml
from kedro.framework.project import LOGGING
from rich.console import Console
from rich.table import Table

from bitterm.config import MAX_ORACLE_WIDTH, MODES, RunConfig, load_run_config
from bitterm.corpus import compare_modes, generate_corpus, load_sources, run_corpus, summarize_comparison
from bitterm.driver import Verdict
from bitterm.driver.analyzer import CHECKS
from bitterm.errors import BittermError, UnboundVariable
from bitterm.frontend import parse
from bitterm.frontend.ast import Program
from bitterm.oracle import OracleResult, oracle
from bitterm.report import build_report, read_precondition, render_summary
from bitterm.ssa import encode, halting_procedures
from bitterm.ssa.printer import format_program

logger = logging.getLogger(__name__)


def _configure_logging(conf_source: str, verbose: bool) -> None:
    path = Path(conf_source) / "base" / "logging.yml"
    if path.is_file():
        LOGGING.configure(yaml.safe_load(path.read_text()))
    if verbose:
        logging.getLogger("bitterm").setLevel(logging.DEBUG)
        for handler in logging.getLogger().handlers:
            handler.setLevel(logging.DEBUG)


def _load(path: str, widths: Dict[str, int], entry: Optional[str] = None) -> Program:
    try:
        return parse(Path(path).read_text(), filename=path, widths=widths, entry=entry)
    except BittermError as e:
        raise click.ClickException(str(e)) from e


def _widths(width_int: Optional[int], width_char: Optional[int]) -> Optional[Dict[str, int]]:
    widths = {k: v for k, v in (("int", width_int), ("char", width_char)) if v is not None}
    return widths or None


def _oracle_table(result: OracleResult) -> Table:
    table = Table(title=f"oracle: {result.entry}")
    for name in result.inputs:
        table.add_column(name, justify="right")
    table.add_column("terminates")
    table.add_column("states", justify="right")
    for values, outcome in result.outcomes.items():
        table.add_row(*map(str, values), "yes" if outcome.terminates else "no", str(outcome.states))
    return table


def _cross_check(path: str, config: RunConfig, verdict: Verdict, console: Console) -> None:
    """Decide the program with the oracle and fail when it refutes the verdict."""
    program = _load(path, config.oracle_widths, config.entry)
    result = oracle(program)
    console.print(f"oracle (int width {config.oracle_width}): {len(result.terminating)} of "
                  f"{len(result.outcomes)} inputs terminate")
    if result.contradicts(verdict.status):
        raise click.ClickException(f"oracle refutes {verdict.status.value}")
    if verdict.precondition_text is None or config.oracle_widths != config.type_widths:
        return
    ts = encode(program.procedures[program.entry], program, halting_procedures(program))
    pre = read_precondition(verdict.precondition_text, ts, program.types)
    params = len(program.procedures[program.entry].params)
    try:
        bad = result.violations(pre, ts.inputs[:params])
    except UnboundVariable as e:
        logger.info(f"precondition mentions {str(e)}, not checked against the oracle")
        return
    if bad:
        raise click.ClickException(f"precondition admits diverging inputs {bad[:5]}")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--conf-source", default="conf", show_default=True, help="Kedro configuration directory.")
@click.option("--env", default=None, help="Configuration environment layered over base.")
@click.option("-v", "--verbose", is_flag=True, help="Log synthesis progress at DEBUG level.")
@click.pass_context
def cli(ctx: click.Context, conf_source: str, env: Optional[str], verbose: bool) -> None:
    """Bit-precise termination analysis of small C-like programs."""
    _configure_logging(conf_source, verbose)
    ctx.obj = {"conf_source": conf_source, "env": env}


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(MODES), help="Per-procedure (ipta) or fully inlined (mta).")
@click.option("--check", type=click.Choice(CHECKS), help="Universal termination or a sufficient precondition.")
@click.option("--entry", help="Entry procedure.")
@click.option("--width-int", type=click.IntRange(min=2), help="Bit width of int.")
@click.option("--width-char", type=click.IntRange(min=2), help="Bit width of char.")
@click.option("--template", help="interval, box, or a YAML file of template rows.")
@click.option("--max-template-vars", type=click.IntRange(min=1))
@click.option("--max-lex", type=click.IntRange(min=1), help="Most lexicographic components per loop.")
@click.option("--max-iter", type=click.IntRange(min=1), help="Iteration limit of the synthesis loops.")
@click.option("--coeff-schedule", help='Ranking coefficient ranges, e.g. "1,10,full".')
@click.option("--extend-width/--no-extend-width", default=None, help="Evaluate rankings one bit wider.")
@click.option("--solver", "backend", type=click.Choice(["pysat", "cdcl", "dimacs"]), help="SAT back end.")
@click.option("--timeout-proc", type=click.FloatRange(min=0, min_open=True), help="Seconds per procedure visit.")
@click.option("--timeout", type=click.FloatRange(min=0, min_open=True), help="Seconds for the whole program.")
@click.option("--json", "as_json", is_flag=True, help="Print the JSON report.")
@click.option("--emit-ssa", is_flag=True, help="Print the encoded procedures first.")
@click.option("--emit-dimacs", type=click.Path(dir_okay=False), help="Write the last solver query as DIMACS.")
@click.option("--oracle", "with_oracle", is_flag=True, help="Cross-check the verdict with the exhaustive oracle.")
@click.option("--oracle-width", type=click.IntRange(2, MAX_ORACLE_WIDTH), help="Width of int for the oracle.")
@click.pass_context
def run(ctx: click.Context, file: str, width_int: Optional[int], width_char: Optional[int], backend: Optional[str],
        as_json: bool, emit_ssa: bool, with_oracle: bool, **options: Any) -> None:
    """Analyse FILE; the exit code reports the entry procedure's status."""
    overrides = dict(options, type_widths=_widths(width_int, width_char), json=as_json or None,
                     emit_ssa=emit_ssa or None, oracle=with_oracle or None)
    try:
        config = load_run_config(ctx.obj["conf_source"], ctx.obj["env"], overrides)
        if backend is not None:
            config = config.override(solver=dataclasses.replace(config.solver, backend=backend))
        program = _load(file, config.type_widths, config.entry)
        analyzer = config.analyzer(program)
    except BittermError as e:
        raise click.ClickException(str(e)) from e
    console = Console()
    if config.emit_ssa:
        click.echo(format_program(list(analyzer.procedures.values())))
    verdict = analyzer.run(config.check)
    if config.json:
        click.echo(json.dumps(build_report(verdict, file), indent=2))
    else:
        render_summary(verdict, console)
    if config.emit_dimacs and analyzer.sessions.last is not None:
        analyzer.sessions.last.dump_dimacs(config.emit_dimacs)
    if config.oracle:
        _cross_check(file, config, verdict, console)
    ctx.exit(verdict.exit_code)


@cli.command("oracle")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--width", type=click.IntRange(2, MAX_ORACLE_WIDTH), default=4, show_default=True,
              help="Bit width of int.")
@click.option("--width-char", type=click.IntRange(min=2), help="Bit width of char.")
@click.option("--entry", help="Entry procedure.")
def oracle_command(file: str, width: int, width_char: Optional[int], entry: Optional[str]) -> None:
    """Decide termination of FILE for every input by exploring all states."""
    program = _load(file, _widths(width, width_char), entry)
    try:
        result = oracle(program)
    except BittermError as e:
        raise click.ClickException(str(e)) from e
    Console().print(_oracle_table(result))
    click.echo(f"{result.status.value}: {len(result.terminating)} of {len(result.outcomes)} inputs terminate")


@cli.command()
@click.argument("directory", type=click.Path(file_okay=False), required=False)
@click.option("--mode", "modes", type=click.Choice(MODES), multiple=True, help="Repeat to run both modes.")
@click.option("--check", type=click.Choice(CHECKS), default="universal", show_default=True)
@click.option("--width-int", type=click.IntRange(min=2))
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--generate", type=click.IntRange(min=0), default=0, help="Add this many synthetic programs.")
@click.option("--procedures", type=click.IntRange(min=1), default=6, show_default=True)
@click.option("--shared-callees", type=click.IntRange(min=0), default=2, show_default=True)
@click.option("--calls-per-callee", type=click.IntRange(min=0), default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), help="Write the result table as CSV.")
@click.pass_context
def corpus(ctx: click.Context, directory: Optional[str], modes: List[str], check: str, width_int: Optional[int],
           workers: int, generate: int, procedures: int, shared_callees: int, calls_per_callee: int, seed: int,
           output: Optional[str]) -> None:
    """Analyse every .mc file of DIRECTORY, plus generated programs, in each mode."""
    try:
        config = load_run_config(ctx.obj["conf_source"], ctx.obj["env"],
                                 {"check": check, "type_widths": _widths(width_int, None)})
    except BittermError as e:
        raise click.ClickException(str(e)) from e
    sources = load_sources(directory) if directory else {}
    sources.update(generate_corpus(generate, procedures, shared_callees, calls_per_callee, seed))
    results = run_corpus(sources, config, modes or ("ipta",), workers)
    if output:
        results.to_csv(output, index=False)
    console = Console()
    table = Table(title=f"{len(sources)} programs")
    for column in ("file", "mode", "status", "solver_calls", "wall_ms"):
        table.add_column(column)
    for row in results.itertuples():
        table.add_row(row.file, row.mode, row.status, str(row.solver_calls), str(row.wall_ms))
    console.print(table)
    if {"ipta", "mta"} <= set(modes):
        console.print(summarize_comparison(compare_modes(results)))


def main(args: Optional[List[str]] = None) -> None:
    """Entry point; usage errors exit with 1 like every other input error."""
    try:
        code = cli.main(args=args, prog_name="bitterm", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        sys.exit(1)
    except click.Abort:
        sys.exit(1)
    sys.exit(code or 0)
