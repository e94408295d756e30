"""
Model-guided template solver.

A system is a list of clauses ``body & premises ==> head`` whose unknowns
are template parameter vectors. Starting from bottom, every violated clause
yields a model; each violated head row is raised to the largest value the
row takes over models of the clause body (probing the row's static maximum
first, then bisecting). After ``max_iter`` passes rows that are still
violated jump to top, so the loop ends, and it ends only when a complete
pass finds every clause valid.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

from bitterm.absdom import AbstractValue, Bound, Template, concretize
from bitterm.absdom.value import clip
from bitterm.logic import terms as T
from bitterm.logic.solver import Model, SessionFactory, SolverSession
from bitterm.logic.terms import Term
from bitterm.synth.bounds import SynthesisBounds

logger = logging.getLogger(__name__)


@dataclass
class Instance:
    """An unknown applied to actual terms through a mapping of its template formals."""

    unknown: str
    mapping: Mapping[Term, Term] = field(default_factory=dict)


@dataclass
class Clause:
    body: Term
    head: Instance
    premises: Sequence[Instance] = ()
    label: str = ""


class TemplateSolver:
    def __init__(self, sessions: SessionFactory, bounds: Optional[SynthesisBounds] = None, label: str = ""):
        self.sessions = sessions
        self.bounds = bounds or SynthesisBounds()
        self.label = label
        self.passes = 0

    def solve(
        self,
        templates: Mapping[str, Template],
        clauses: Sequence[Clause],
        initial: Optional[Mapping[str, AbstractValue]] = None,
    ) -> Dict[str, AbstractValue]:
        """
        Least-ish solution of ``clauses`` over the given templates.

        Parameters:
        - templates (Mapping[str, Template]): template per unknown name.
        - clauses (Sequence[Clause]): the system; premises may mention any unknown.
        - initial (Mapping[str, AbstractValue]): starting values, bottom by default.

        Returns:
        Dict[str, AbstractValue]: values for which every clause is valid.
        Raises SolverTimeout when the session deadline passes.
        """
        values = {name: AbstractValue.bottom(len(t)) for name, t in templates.items()}
        values.update(initial or {})
        with self.sessions(self.label) as session:
            for pass_no in itertools.count():
                widen = pass_no >= self.bounds.max_iter
                changed = False
                for clause in clauses:
                    base = self._base(clause, templates, values)
                    head = templates[clause.head.unknown]
                    violated = T.not_(concretize(head, values[clause.head.unknown], clause.head.mapping))
                    model = session.check(base + [violated])
                    if model is None:
                        continue
                    changed = True
                    values[clause.head.unknown] = self._raise(session, head, clause.head, values, base, model, widen)
                self.passes = pass_no + 1
                if not changed:
                    break
        logger.debug(f"{self.label or 'system'}: fixed point after {self.passes} passes")
        return {name: clip(templates[name], v) for name, v in values.items()}

    def _base(self, clause: Clause, templates: Mapping[str, Template], values) -> List[Term]:
        base = [clause.body]
        for premise in clause.premises:
            base.append(concretize(templates[premise.unknown], values[premise.unknown], premise.mapping))
        return base

    def _raise(self, session: SolverSession, template: Template, head: Instance, values, base: List[Term],
               model: Model, widen: bool) -> AbstractValue:
        value = values[head.unknown]
        for i, bound in enumerate(value.bounds):
            if bound is Bound.TOP:
                continue
            guard = template.row_guard(i, head.mapping)
            if not model.eval(guard):
                continue
            row = template.row_term(i, head.mapping)
            current = model.eval(row)
            if bound is not Bound.BOTTOM and current <= bound:
                continue
            if widen:
                new = Bound.TOP
            else:
                new = self._maximize(session, base + [guard], row, current, template.row_range(i)[1])
            value = value.replace(i, new)
        return value

    def _maximize(self, session: SolverSession, assumptions: List[Term], row: Term, start: int, hi: int):
        def reaches(v: int) -> Optional[Model]:
            return session.check(assumptions + [T.ge(row, T.const(v, row.width, True))])

        if start >= hi or reaches(hi) is not None:
            return Bound.TOP
        lo, bad = start, hi
        while bad - lo > 1:
            mid = (lo + bad) // 2
            model = reaches(mid)
            if model is None:
                bad = mid
            else:
                lo = max(mid, model.eval(row))
        return lo
