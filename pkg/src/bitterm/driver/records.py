"""
Per-procedure analysis store and the verdict assembled from it.
"""
import enum
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Set

from bitterm.absdom import AbstractValue
from bitterm.errors import ConfigError
from bitterm.logic import terms as T
from bitterm.logic.terms import Term
from bitterm.synth import LexRanking

logger = logging.getLogger(__name__)


class TermStatus(str, enum.Enum):
    TERMINATING = "TERMINATING"
    NON_TERMINATING = "NON_TERMINATING"
    POTENTIALLY_NON_TERMINATING = "POTENTIALLY_NON_TERMINATING"
    UNKNOWN_TIMEOUT = "UNKNOWN_TIMEOUT"

    @property
    def exit_code(self) -> int:
        return _EXIT_CODES[self]

    def join(self, other: "TermStatus") -> "TermStatus":
        """
        Least upper bound: proven verdicts below ``POTENTIALLY_NON_TERMINATING``, the timeout verdict on top.
        """
        if self is other:
            return self
        if TermStatus.UNKNOWN_TIMEOUT in (self, other):
            return TermStatus.UNKNOWN_TIMEOUT
        return TermStatus.POTENTIALLY_NON_TERMINATING


_EXIT_CODES = {
    TermStatus.TERMINATING: 0,
    TermStatus.NON_TERMINATING: 10,
    TermStatus.POTENTIALLY_NON_TERMINATING: 20,
    TermStatus.UNKNOWN_TIMEOUT: 30,
}


@dataclass
class ForwardEntry:
    """
    One forward visit: the calling context and what was inferred under it.

    ``context_value`` is the context as a template value when it came from a call site.
    """

    context: Term
    invariants: List[AbstractValue]
    summary: AbstractValue
    context_value: Optional[AbstractValue] = None


@dataclass
class BackwardEntry:
    """One backward visit: the required exit condition and the precondition found for it."""

    context: Term
    disjuncts: List[AbstractValue]
    precondition: Term


@dataclass
class AnalysisRecord:
    name: str
    forward: List[ForwardEntry] = field(default_factory=list)
    backward: List[BackwardEntry] = field(default_factory=list)
    reachable_sites: Set[int] = field(default_factory=set)
    status: Optional[TermStatus] = None
    ranking: Optional[LexRanking] = None
    stats: Dict[str, float] = field(default_factory=dict)

    @property
    def context(self) -> Term:
        """Disjunction of the forward calling contexts seen so far."""
        return T.disj(e.context for e in self.forward)

    @property
    def precondition(self) -> Term:
        return T.disj(e.precondition for e in self.backward)

    @property
    def disjuncts(self) -> List[AbstractValue]:
        return [d for e in self.backward for d in e.disjuncts]

    def settle(self, status: TermStatus) -> TermStatus:
        """Record ``status``; a status already set is only weakened."""
        self.status = status if self.status is None else self.status.join(status)
        return self.status


@dataclass
class ProcedureVerdict:
    name: str
    status: TermStatus
    ranking: Optional[LexRanking] = None
    precondition: Optional[str] = None
    summary: List[str] = field(default_factory=list)


@dataclass
class Verdict:
    """
    Outcome of one analysis run.

    ``status`` is the entry procedure's status. Conditional runs also carry
    the entry precondition over the entry's inputs and its source-language
    rendering, which reads ``"true"`` exactly when the entry was proven
    terminating; universal runs leave both unset.
    """

    entry: str
    mode: str
    check: str
    status: TermStatus
    procedures: List[ProcedureVerdict]
    precondition: Optional[Term] = None
    precondition_text: Optional[str] = None
    stats: Dict[str, float] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return self.status.exit_code

    def procedure(self, name: str) -> ProcedureVerdict:
        return next(p for p in self.procedures if p.name == name)


class Budget:
    """
    Wall-clock budgets: one for the whole run and one per procedure visit.

    ``deadline`` is what solver sessions poll; it is the earlier of the run
    deadline and the innermost procedure deadline. ``None`` disables a budget.
    """

    def __init__(self, timeout_proc: Optional[float] = 60.0, timeout: Optional[float] = 1800.0):
        for name, value in (("timeout_proc", timeout_proc), ("timeout", timeout)):
            if value is not None and value <= 0:
                raise ConfigError(f"{name} must be positive, got {value}")
        self.timeout_proc = timeout_proc
        self.timeout = timeout
        self.started: Optional[float] = None
        self._stack: List[float] = []

    def start(self) -> None:
        if self.started is None:
            self.started = time.monotonic()

    @property
    def elapsed(self) -> float:
        return 0.0 if self.started is None else time.monotonic() - self.started

    @property
    def expired(self) -> bool:
        return self.timeout is not None and self.started is not None and self.elapsed >= self.timeout

    def deadline(self) -> Optional[float]:
        candidates = self._stack[-1:]
        if self.timeout is not None and self.started is not None:
            candidates.append(self.started + self.timeout)
        return min(candidates) if candidates else None

    @contextmanager
    def procedure(self, name: str) -> Iterator[None]:
        if self.timeout_proc is None:
            yield
            return
        entered = time.monotonic()
        self._stack.append(entered + self.timeout_proc)
        try:
            yield
        finally:
            self._stack.pop()
            if self._stack:
                # time spent in a callee does not count against the caller
                self._stack[-1] += time.monotonic() - entered
            logger.debug(f"{name}: {time.monotonic() - entered:.2f}s in budget scope")
