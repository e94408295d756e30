"""
Corpus runs: analyse many programs in both modes and compare the modes.

``generate_program`` builds synthetic multi-procedure programs in which
several procedures call a few shared utility procedures, each a bounded
stepping loop. They exercise summary reuse: the per-procedure analysis
handles a shared callee once per distinct calling context, while the
monolithic analysis sees one copy per call site.
"""
import logging
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Sequence, Union

import numpy as np
import pandas as pd

from bitterm.config import RunConfig
from bitterm.driver import TermStatus
from bitterm.errors import BittermError
from bitterm.frontend import parse

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [
    "file", "mode", "check", "status", "exit_code", "solver_calls", "wall_ms", "procedures", "call_sites",
    "max_shared_calls", "error",
]
PROVEN = {TermStatus.TERMINATING.value, TermStatus.NON_TERMINATING.value}
ERROR = "ERROR"

Source = Union[str, Callable[[], str]]


def load_sources(directory: Union[str, Path], suffix: str = ".mc") -> Dict[str, str]:
    """Program texts of a directory by file stem, sorted."""
    return {p.stem: p.read_text() for p in sorted(Path(directory).glob(f"*{suffix}"))}


def analyze_source(name: str, source: str, config: RunConfig) -> Dict[str, Any]:
    """
    Analyse one program under ``config`` and summarise the run as a result row.

    Parameters:
    - name (str): label of the program in the results.
    - source (str): program text.
    - config (RunConfig): mode, check, widths and bounds of the run.

    Returns:
    Dict[str, Any]: one row of the corpus table; parse and analysis errors
    give a row with status ``ERROR`` instead of raising.
    """
    row: Dict[str, Any] = {"file": name, "mode": config.mode, "check": config.check}
    try:
        program = parse(source, filename=name, widths=config.type_widths, entry=config.entry)
        callees = Counter(c.name for proc in program.procedures.values() for c in proc.calls())
        verdict = config.analyzer(program).run(config.check)
    except BittermError as e:
        logger.error(f"Analysis of {name} failed. Error: {str(e)}")
        row.update(status=ERROR, exit_code=1, solver_calls=0, wall_ms=0, procedures=0, call_sites=0,
                   max_shared_calls=0, error=str(e))
        return row
    row.update(
        status=verdict.status.value,
        exit_code=verdict.exit_code,
        solver_calls=int(verdict.stats.get("solver_calls", 0)),
        wall_ms=int(verdict.stats.get("wall_ms", 0)),
        procedures=len(program.procedures),
        call_sites=sum(callees.values()),
        max_shared_calls=max(callees.values(), default=0),
        error="",
    )
    return row


def run_corpus(sources: Mapping[str, Source], config: RunConfig, modes: Sequence[str] = ("ipta",),
               workers: int = 1) -> pd.DataFrame:
    """
    Analyse every program once per mode.

    Parameters:
    - sources (Mapping[str, str | Callable]): program text, or a loader for it, per name.
    - config (RunConfig): settings shared by all runs; ``mode`` is replaced per run.
    - modes (Sequence[str]): ``ipta`` and/or ``mta``.
    - workers (int): processes to use; each run builds its own analyzer.

    Returns:
    pd.DataFrame: one row per program and mode, sorted by file then mode.
    """
    jobs = []
    for name in sorted(sources):
        source = sources[name]
        text = source() if callable(source) else source
        jobs.extend((name, text, config.override(mode=mode)) for mode in modes)
    logger.info(f"corpus: {len(sources)} programs, {len(jobs)} runs, {workers} workers")
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(analyze_source, *zip(*jobs)))
    else:
        rows = [analyze_source(*job) for job in jobs]
    results = pd.DataFrame(rows, columns=RESULT_COLUMNS)
    return results.sort_values(["file", "mode"], kind="stable").reset_index(drop=True)


def generate_program(procedures: int, shared_callees: int, calls_per_callee: int, seed: int = 0) -> str:
    """
    A synthetic program whose procedures share utility callees.

    Parameters:
    - procedures (int): calling procedures, each with its own counting loop.
    - shared_callees (int): utility procedures, each a stepping loop like ``h``.
    - calls_per_callee (int): call sites per utility procedure, spread over the callers.
    - seed (int): seed of the generator; equal seeds give equal programs.

    Returns:
    str: program text whose entry is ``main(unsigned n)``.
    """
    if procedures < 1 or shared_callees < 0 or calls_per_callee < 0:
        raise ValueError("need at least one procedure and non-negative callee counts")
    rng = random.Random(seed)
    lines = []
    for k in range(shared_callees):
        bound = rng.randint(3, 9)
        lines.append(f"unsigned util{k}(unsigned y) {{ unsigned x; for (x = 0; x < {bound}; x += y); return x; }}")
    sites: Dict[int, List[int]] = {i: [] for i in range(procedures)}
    for k in range(shared_callees):
        for _ in range(calls_per_callee):
            sites[rng.randrange(procedures)].append(k)
    for i in range(procedures):
        body = ["unsigned s = 0;", "unsigned i;", f"for (i = 0; i < a; i++) s += {rng.randint(1, 3)};"]
        for k in sites[i]:
            offset = rng.randint(0, 2)
            body.append(f"if (a > {offset}) s += util{k}(a - {offset});")
        body.append("return s;")
        lines.append(f"unsigned proc{i}(unsigned a) {{ {' '.join(body)} }}")
    calls = " ".join(f"unsigned r{i} = proc{i}(n);" for i in range(procedures))
    lines.append(f"void main(unsigned n) {{ {calls} }}")
    return "\n".join(lines) + "\n"


def generate_corpus(programs: int, procedures: int, shared_callees: int, calls_per_callee: int,
                    seed: int = 0) -> Dict[str, str]:
    return {
        f"generated_{j:03d}": generate_program(procedures, shared_callees, calls_per_callee, seed + j)
        for j in range(programs)
    }


def compare_modes(results: pd.DataFrame) -> pd.DataFrame:
    """
    Put the per-procedure and monolithic runs of each file side by side.

    Parameters:
    - results (pd.DataFrame): corpus rows with both modes.

    Returns:
    pd.DataFrame: per file the two statuses, solver calls and times, the
    solver-call ratio ``mta / ipta``, the speed-up ``mta wall / ipta wall``
    and whether the verdicts conflict.
    """
    columns = ["file", "ipta_status", "mta_status", "ipta_calls", "mta_calls", "call_ratio", "speedup", "conflict",
               "max_shared_calls"]
    if results.empty:
        return pd.DataFrame(columns=columns)
    frame = results.set_index(["file", "mode"])[["status", "solver_calls", "wall_ms"]].unstack("mode")
    shared = results.groupby("file")["max_shared_calls"].max()
    rows = []
    for file, row in frame.iterrows():
        if any(("status", mode) not in row.index or pd.isna(row[("status", mode)]) for mode in ("ipta", "mta")):
            continue
        statuses = {row[("status", "ipta")], row[("status", "mta")]}
        ipta_calls, mta_calls = row[("solver_calls", "ipta")], row[("solver_calls", "mta")]
        ipta_ms, mta_ms = row[("wall_ms", "ipta")], row[("wall_ms", "mta")]
        rows.append({
            "file": file,
            "ipta_status": row[("status", "ipta")],
            "mta_status": row[("status", "mta")],
            "ipta_calls": int(ipta_calls),
            "mta_calls": int(mta_calls),
            "call_ratio": mta_calls / ipta_calls if ipta_calls else np.nan,
            "speedup": mta_ms / ipta_ms if ipta_ms else np.nan,
            "conflict": PROVEN <= statuses,
            "max_shared_calls": int(shared[file]),
        })
    return pd.DataFrame(rows, columns=columns)


def summarize_comparison(comparison: pd.DataFrame) -> Dict[str, Any]:
    """Proof rate per mode, conflicts, and the geometric-mean speed-up over files both modes proved."""
    files = len(comparison)
    if not files:
        return {"files": 0, "ipta_proof_rate": 0.0, "mta_proof_rate": 0.0, "conflicts": 0, "geomean_speedup": None}
    ipta_proved = comparison["ipta_status"].isin(PROVEN)
    mta_proved = comparison["mta_status"].isin(PROVEN)
    speedups = comparison.loc[ipta_proved & mta_proved, "speedup"].dropna()
    speedups = speedups[speedups > 0]
    summary = {
        "files": files,
        "ipta_proof_rate": float(ipta_proved.mean()),
        "mta_proof_rate": float(mta_proved.mean()),
        "conflicts": int(comparison["conflict"].sum()),
        "geomean_speedup": float(np.exp(np.log(speedups).mean())) if len(speedups) else None,
    }
    logger.info(f"mode comparison: {summary}")
    return summary
