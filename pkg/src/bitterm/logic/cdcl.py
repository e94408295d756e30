"""
A small conflict-driven clause-learning solver.

Two watched literals, first-UIP learning, activity-based branching with phase
saving, geometric restarts, and MiniSat-style assumptions (each assumption
occupies its own decision level). It follows the subset of the pysat solver
interface the session layer relies on: ``add_clause``, ``solve``,
``get_model`` and ``interrupt``.
"""
import heapq
import logging
import time
from typing import Dict, Iterable, List, Optional, Sequence

logger = logging.getLogger(__name__)


class CdclSolver:
    def __init__(self, bootstrap_with: Optional[Iterable[Sequence[int]]] = None, deadline: Optional[float] = None):
        self.deadline = deadline
        self.ok = True
        self.nvars = 0
        self.clauses: List[List[int]] = []
        self.watches: Dict[int, List[int]] = {}
        self.assign: List[int] = [0]
        self.level: List[int] = [0]
        self.reason: List[int] = [-1]
        self.activity: List[float] = [0.0]
        self.phase: List[int] = [-1]
        self.trail: List[int] = []
        self.trail_lim: List[int] = []
        self.qhead = 0
        self.var_inc = 1.0
        self.heap: List = []
        self.conflicts = 0
        self._interrupted = False
        self._model: Optional[List[int]] = None
        for clause in bootstrap_with or ():
            self.add_clause(clause)

    # bookkeeping

    def _grow(self, var: int) -> None:
        while self.nvars < var:
            self.nvars += 1
            self.assign.append(0)
            self.level.append(0)
            self.reason.append(-1)
            self.activity.append(0.0)
            self.phase.append(-1)
            self.watches[self.nvars] = []
            self.watches[-self.nvars] = []
            heapq.heappush(self.heap, (0.0, self.nvars))

    def _value(self, lit: int) -> int:
        v = self.assign[abs(lit)]
        return v if lit > 0 else -v

    def _decision_level(self) -> int:
        return len(self.trail_lim)

    def _enqueue(self, lit: int, reason: int) -> None:
        var = abs(lit)
        self.assign[var] = 1 if lit > 0 else -1
        self.level[var] = self._decision_level()
        self.reason[var] = reason
        self.trail.append(lit)

    def _backtrack(self, level: int) -> None:
        if self._decision_level() <= level:
            return
        start = self.trail_lim[level]
        for lit in self.trail[start:]:
            var = abs(lit)
            self.phase[var] = self.assign[var]
            self.assign[var] = 0
            self.reason[var] = -1
            heapq.heappush(self.heap, (-self.activity[var], var))
        del self.trail[start:]
        del self.trail_lim[level:]
        self.qhead = min(self.qhead, len(self.trail))

    def _bump(self, var: int) -> None:
        self.activity[var] += self.var_inc
        if self.activity[var] > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.var_inc *= 1e-100
        heapq.heappush(self.heap, (-self.activity[var], var))

    # clauses

    def add_clause(self, clause: Sequence[int]) -> None:
        if not self.ok:
            return
        self._backtrack(0)
        lits: List[int] = []
        for lit in clause:
            self._grow(abs(lit))
            if -lit in lits:
                return
            if lit not in lits:
                lits.append(lit)
        if any(self._value(lit) == 1 for lit in lits):
            return
        lits = [lit for lit in lits if self._value(lit) != -1]
        if not lits:
            self.ok = False
        elif len(lits) == 1:
            self._enqueue(lits[0], -1)
            if self._propagate() is not None:
                self.ok = False
        else:
            self._attach(lits)

    def _attach(self, lits: List[int]) -> int:
        index = len(self.clauses)
        self.clauses.append(lits)
        self.watches[lits[0]].append(index)
        self.watches[lits[1]].append(index)
        return index

    def _propagate(self) -> Optional[int]:
        while self.qhead < len(self.trail):
            false_lit = -self.trail[self.qhead]
            self.qhead += 1
            watching = self.watches[false_lit]
            kept: List[int] = []
            conflict = None
            for pos, index in enumerate(watching):
                clause = self.clauses[index]
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], clause[0]
                if self._value(clause[0]) == 1:
                    kept.append(index)
                    continue
                for k in range(2, len(clause)):
                    if self._value(clause[k]) != -1:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches[clause[1]].append(index)
                        break
                else:
                    kept.append(index)
                    if self._value(clause[0]) == -1:
                        kept.extend(watching[pos + 1:])
                        conflict = index
                        break
                    self._enqueue(clause[0], index)
            self.watches[false_lit] = kept
            if conflict is not None:
                self.qhead = len(self.trail)
                return conflict
        return None

    def _analyze(self, conflict: int):
        learnt: List[int] = [0]
        seen = set()
        counter = 0
        lit = 0
        index = len(self.trail) - 1
        clause = self.clauses[conflict]
        current = self._decision_level()
        while True:
            for q in clause:
                if q == lit:
                    continue
                var = abs(q)
                if var in seen or self.level[var] == 0:
                    continue
                seen.add(var)
                self._bump(var)
                if self.level[var] == current:
                    counter += 1
                else:
                    learnt.append(q)
            while abs(self.trail[index]) not in seen:
                index -= 1
            lit = self.trail[index]
            index -= 1
            counter -= 1
            if counter == 0:
                break
            clause = self.clauses[self.reason[abs(lit)]]
        learnt[0] = -lit
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda i: self.level[abs(learnt[i])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    def _pick_branch(self) -> int:
        while self.heap:
            _, var = heapq.heappop(self.heap)
            if self.assign[var] == 0:
                return var if self.phase[var] > 0 else -var
        return 0

    # public interface

    def interrupt(self) -> None:
        self._interrupted = True

    def solve(self, assumptions: Sequence[int] = ()) -> Optional[bool]:
        """
        Decide satisfiability under ``assumptions``.

        Returns True or False, or None when interrupted or past the deadline.
        """
        self._model = None
        self._interrupted = False
        if not self.ok:
            return False
        for lit in assumptions:
            self._grow(abs(lit))
        self._backtrack(0)
        if self._propagate() is not None:
            self.ok = False
            return False
        restart_limit = 100
        since_restart = 0
        while True:
            conflict = self._propagate()
            if conflict is not None:
                self.conflicts += 1
                since_restart += 1
                if self._decision_level() == 0:
                    self.ok = False
                    return False
                learnt, back_level = self._analyze(conflict)
                self._backtrack(back_level)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], -1)
                else:
                    self._enqueue(learnt[0], self._attach(learnt))
                self.var_inc *= 1.05
                if self.conflicts % 256 == 0 and self._expired():
                    self._backtrack(0)
                    return None
                continue
            if since_restart >= restart_limit:
                since_restart = 0
                restart_limit = int(restart_limit * 1.5)
                self._backtrack(0)
                continue
            level = self._decision_level()
            if level < len(assumptions):
                lit = assumptions[level]
                value = self._value(lit)
                if value == -1:
                    self._backtrack(0)
                    return False
                self.trail_lim.append(len(self.trail))
                if value == 0:
                    self._enqueue(lit, -1)
                continue
            lit = self._pick_branch()
            if lit == 0:
                self._model = [v if self.assign[v] > 0 else -v for v in range(1, self.nvars + 1)]
                self._backtrack(0)
                return True
            if self._interrupted:
                self._backtrack(0)
                return None
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, -1)

    def _expired(self) -> bool:
        return self._interrupted or (self.deadline is not None and time.monotonic() > self.deadline)

    def get_model(self) -> Optional[List[int]]:
        return self._model

    def nof_vars(self) -> int:
        return self.nvars

    def nof_clauses(self) -> int:
        return len(self.clauses)

    def delete(self) -> None:
        self.clauses.clear()
        self.watches.clear()
