import logging
from typing import Any, Dict

from bitterm.config import RunConfig
from bitterm.driver import Verdict
from bitterm.frontend import Program, parse
from bitterm.report import build_report

logger = logging.getLogger(__name__)


def load_program(program_source: str, source_name: str, analysis: Dict[str, Any]) -> Program:
    """
    Parses and type-checks the program text read from the catalog.

    Parameters:
    - program_source (str): the program text.
    - source_name (str): name of the source, used in messages and the report.
    - analysis (Dict[str, Any]): the ``analysis`` parameters; widths and entry are read from it.

    Returns:
    Program: the checked program.
    """
    config = RunConfig.from_params(analysis)
    try:
        return parse(program_source, filename=source_name, widths=config.type_widths, entry=config.entry)
    except Exception as e:
        logger.error(f'Parsing {source_name} failed. Error: {str(e)}')
        raise


def analyze_program(program: Program, analysis: Dict[str, Any]) -> Verdict:
    """
    Runs the configured termination check on the program.

    Parameters:
    - program (Program): the checked program.
    - analysis (Dict[str, Any]): the ``analysis`` parameters.

    Returns:
    Verdict: statuses, rankings and preconditions per analysed procedure.
    """
    config = RunConfig.from_params(analysis)
    verdict = config.analyzer(program).run(config.check)
    logger.info(f'{program.entry}: {verdict.status.value} ({config.mode}, {config.check})')
    return verdict


def report_verdict(verdict: Verdict, source_name: str) -> Dict[str, Any]:
    return build_report(verdict, source_name)
