"""
Incremental solver sessions over bit-vector formulas.

A session owns one bit-blaster and one SAT back end. Formulas added with
``add`` stay for the session's lifetime; formulas passed to ``check`` are
blasted to activation literals and only assumed for that call, so the
clause database never depends on earlier assumption sets.

Back ends are registered by name: ``pysat`` (any python-sat solver, MiniSat
2.2 by default), ``cdcl`` (the in-repo solver) and ``dimacs`` (an external
solver binary fed DIMACS files).
"""
import logging
import os
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Type

from pysat.formula import CNF
from pysat.solvers import Solver

from bitterm.errors import SolverError, SolverTimeout
from bitterm.logic import terms as T
from bitterm.logic.bitblast import BitBlaster
from bitterm.logic.cdcl import CdclSolver
from bitterm.logic.evaluate import evaluate
from bitterm.logic.terms import Term

logger = logging.getLogger(__name__)


class SatBackend:
    name = "abstract"

    def add_clauses(self, clauses: Iterable[List[int]]) -> None:
        raise NotImplementedError

    def solve(self, assumptions: Sequence[int], timeout: Optional[float]) -> Optional[bool]:
        raise NotImplementedError

    def model(self) -> List[int]:
        raise NotImplementedError

    def close(self) -> None:
        pass


class PySatBackend(SatBackend):
    name = "pysat"

    def __init__(self, solver_name: str = "minisat22", **_):
        self.solver = Solver(name=solver_name)

    def add_clauses(self, clauses: Iterable[List[int]]) -> None:
        for clause in clauses:
            self.solver.add_clause(clause)

    def solve(self, assumptions: Sequence[int], timeout: Optional[float]) -> Optional[bool]:
        if timeout is None:
            return self.solver.solve(assumptions=list(assumptions))
        timer = threading.Timer(timeout, self.solver.interrupt)
        timer.start()
        try:
            return self.solver.solve_limited(assumptions=list(assumptions), expect_interrupt=True)
        finally:
            timer.cancel()
            self.solver.clear_interrupt()

    def model(self) -> List[int]:
        return self.solver.get_model() or []

    def close(self) -> None:
        self.solver.delete()


class CdclBackend(SatBackend):
    name = "cdcl"

    def __init__(self, **_):
        self.solver = CdclSolver()

    def add_clauses(self, clauses: Iterable[List[int]]) -> None:
        for clause in clauses:
            self.solver.add_clause(clause)

    def solve(self, assumptions: Sequence[int], timeout: Optional[float]) -> Optional[bool]:
        self.solver.deadline = None if timeout is None else time.monotonic() + timeout
        return self.solver.solve(assumptions)

    def model(self) -> List[int]:
        return self.solver.get_model() or []


class DimacsBackend(SatBackend):
    """Runs an external solver on a DIMACS file per query (no incrementality)."""

    name = "dimacs"

    def __init__(self, command: Optional[Sequence[str]] = None, **_):
        if not command:
            raise SolverError("the dimacs back end needs an external solver command")
        self.command = list(command)
        self.cnf = CNF()
        self._model: List[int] = []

    def add_clauses(self, clauses: Iterable[List[int]]) -> None:
        for clause in clauses:
            self.cnf.append(list(clause))

    def solve(self, assumptions: Sequence[int], timeout: Optional[float]) -> Optional[bool]:
        query = self.cnf.copy()
        for lit in assumptions:
            query.append([lit])
        fd, path = tempfile.mkstemp(suffix=".cnf")
        os.close(fd)
        try:
            query.to_file(path)
            try:
                proc = subprocess.run(self.command + [path], capture_output=True, text=True, timeout=timeout)
            except subprocess.TimeoutExpired:
                return None
        finally:
            os.unlink(path)
        status, lits = None, []
        for line in proc.stdout.splitlines():
            if line.startswith("s "):
                status = line[2:].strip()
            elif line.startswith("v "):
                lits.extend(int(tok) for tok in line[2:].split() if tok != "0")
        if status == "SATISFIABLE":
            self._model = lits
            return True
        if status == "UNSATISFIABLE":
            return False
        raise SolverError(f"external solver gave no verdict (exit code {proc.returncode})")

    def model(self) -> List[int]:
        return self._model


_BACKENDS: Dict[str, Type[SatBackend]] = {
    "pysat": PySatBackend,
    "cdcl": CdclBackend,
    "dimacs": DimacsBackend,
}


def available_backends() -> List[str]:
    return sorted(_BACKENDS)


@dataclass
class SolverStats:
    calls: int = 0
    sat: int = 0
    unsat: int = 0
    timeouts: int = 0
    seconds: float = 0.0

    def record(self, outcome: Optional[bool], seconds: float) -> None:
        self.calls += 1
        self.seconds += seconds
        if outcome is None:
            self.timeouts += 1
        elif outcome:
            self.sat += 1
        else:
            self.unsat += 1

    def as_dict(self) -> Dict[str, float]:
        return {"calls": self.calls, "sat": self.sat, "unsat": self.unsat,
                "timeouts": self.timeouts, "seconds": round(self.seconds, 3)}


class Model(Mapping[str, int]):
    """Total assignment to the variables a session has seen."""

    def __init__(self, assignment: Dict[str, int]):
        self.assignment = assignment

    def __getitem__(self, name: str) -> int:
        return self.assignment.get(name, 0)

    def __iter__(self):
        return iter(self.assignment)

    def __len__(self) -> int:
        return len(self.assignment)

    def eval(self, term: Term):
        """Evaluate ``term``; variables the solver never saw read as 0."""
        return evaluate(term, {v.name: self[v.name] for v in T.free_vars(term)})

    def __repr__(self) -> str:
        return f"Model({self.assignment})"


@dataclass
class SolverSettings:
    backend: str = "pysat"
    name: str = "minisat22"
    command: Optional[List[str]] = None


class SolverSession:
    def __init__(
        self,
        settings: Optional[SolverSettings] = None,
        stats: Optional[SolverStats] = None,
        deadline: Optional[float] = None,
        label: str = "",
    ):
        self.settings = settings or SolverSettings()
        if self.settings.backend not in _BACKENDS:
            raise SolverError(f"unknown solver back end {self.settings.backend!r}")
        backend_cls = _BACKENDS[self.settings.backend]
        self.backend = backend_cls(solver_name=self.settings.name, command=self.settings.command)
        self.blaster = BitBlaster()
        self.stats = stats if stats is not None else SolverStats()
        self.deadline = deadline
        self.label = label
        self.last_assumptions: List[int] = []

    def __enter__(self) -> "SolverSession":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def close(self) -> None:
        self.backend.close()

    def _flush(self) -> None:
        fresh = self.blaster.take_new_clauses()
        if fresh:
            self.backend.add_clauses(fresh)

    def add(self, formula: Term) -> None:
        """Permanently assert a Boolean formula."""
        self.blaster.add_formula(formula)
        self._flush()

    def literal(self, formula: Term) -> int:
        lit = self.blaster.literal(formula)
        if abs(lit) == self.blaster.true_lit:
            self.blaster.ensure_true()
        self._flush()
        return lit

    def check(self, assumptions: Sequence[Term] = ()) -> Optional[Model]:
        """
        Check the asserted formulas together with ``assumptions``.

        Returns a Model when satisfiable and None when unsatisfiable. Raises
        SolverTimeout when the session deadline passes first.
        """
        lits = [self.literal(a) for a in assumptions]
        self.last_assumptions = lits
        timeout = None
        if self.deadline is not None:
            timeout = self.deadline - time.monotonic()
            if timeout <= 0:
                self.stats.record(None, 0.0)
                raise SolverTimeout(f"deadline passed before query in {self.label or 'session'}")
        started = time.monotonic()
        outcome = self.backend.solve(lits, timeout)
        self.stats.record(outcome, time.monotonic() - started)
        if outcome is None:
            raise SolverTimeout(f"solver interrupted in {self.label or 'session'}")
        if not outcome:
            return None
        truth = {abs(lit): lit > 0 for lit in self.backend.model()}
        assignment = {}
        for name in self.blaster.variables:
            assignment[name] = self.blaster.value_of(name, truth)
        return Model(assignment)

    def is_valid(self, formula: Term, assumptions: Sequence[Term] = ()) -> bool:
        return self.check(list(assumptions) + [T.not_(formula)]) is None

    def dump_dimacs(self, path: str) -> None:
        """Write the clause database plus the last query's assumptions as DIMACS."""
        cnf = CNF(from_clauses=self.blaster.clauses)
        for lit in self.last_assumptions:
            cnf.append([lit])
        cnf.to_file(path, comments=[f"c bitterm query {self.label}".strip()])
        logger.info(f"wrote {len(cnf.clauses)} clauses to {path}")


def check(session: SolverSession, assumptions: Sequence[Term] = ()) -> Optional[Model]:
    return session.check(assumptions)


class SessionFactory:
    """Creates sessions sharing one statistics record and a deadline source."""

    def __init__(
        self,
        settings: Optional[SolverSettings] = None,
        stats: Optional[SolverStats] = None,
        deadline: Optional[Callable[[], Optional[float]]] = None,
    ):
        self.settings = settings or SolverSettings()
        self.stats = stats if stats is not None else SolverStats()
        self._deadline = deadline or (lambda: None)
        self.last: Optional[SolverSession] = None

    def __call__(self, label: str = "") -> SolverSession:
        session = SolverSession(self.settings, self.stats, self._deadline(), label)
        self.last = session
        return session
