import logging
from typing import Any, Callable, Dict, Union

import pandas as pd

from bitterm.config import RunConfig
from bitterm.corpus import compare_modes, generate_corpus, run_corpus, summarize_comparison

logger = logging.getLogger(__name__)


def analyze_corpus(corpus_sources: Dict[str, Union[str, Callable[[], str]]], corpus: Dict[str, Any],
                   analysis: Dict[str, Any]) -> pd.DataFrame:
    """
    Analyses every partition of the source directory, plus generated programs, in each mode.

    Parameters:
    - corpus_sources (Dict[str, Callable]): partition loaders by file stem.
    - corpus (Dict[str, Any]): the ``corpus`` parameters: modes, check, workers and generator sizes.
    - analysis (Dict[str, Any]): the ``analysis`` parameters shared by every run.

    Returns:
    pd.DataFrame: one result row per program and mode.
    """
    config = RunConfig.from_params(analysis).override(check=corpus.get("check"))
    generated = dict(corpus.get("generated") or {})
    sources = dict(corpus_sources)
    if generated.get("programs"):
        sources.update(generate_corpus(**generated))
    logger.info(f'Analysing {len(sources)} programs in modes {", ".join(corpus["modes"])}')
    return run_corpus(sources, config, corpus["modes"], int(corpus.get("workers", 1)))


def compare_corpus_modes(corpus_results: pd.DataFrame) -> pd.DataFrame:
    return compare_modes(corpus_results)


def summarize_corpus(mode_comparison: pd.DataFrame) -> Dict[str, Any]:
    """Proof rates, conflicts and the geometric-mean speed-up of the mode comparison."""
    return summarize_comparison(mode_comparison)
