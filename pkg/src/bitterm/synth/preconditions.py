"""
Backward analysis: preconditions for termination and backward calling contexts.

The backward system over-approximates the *bad* states, those from which an
execution may violate a termination condition. Every loop ``k`` has an
unknown ``Bad_k`` over its head state and the procedure has ``Pre`` over its
inputs. With ``B`` the forward body strengthened by the forward invariants:

- seeds: ``B & g_end & ~LR_i ==> Bad_i(head)`` when an iteration is not
  ranked, ``B & g_j & ~Precond_h(actuals) ==> Bad(o)`` when a callee may not
  terminate, and ``B & g_ret & ~CallCtx(in, out) ==> Bad(o)`` when the exit
  breaks the caller's requirement;
- closure: a bad state at a loop head makes the state it came from bad,
  through the back edge (``o`` in the loop's back origins) or through the
  entry edge (``o`` in its entry origins).

Here ``o`` ranges over the origins of a program point: the procedure entry
or the last loop head passed. The precondition is the negation of ``Pre``.
"""
import logging
from typing import Dict, List, Mapping, Optional, Sequence

from bitterm.absdom import AbstractValue, Template, concretize
from bitterm.errors import SolverTimeout
from bitterm.logic import terms as T
from bitterm.logic.solver import SessionFactory
from bitterm.logic.terms import Term
from bitterm.ssa import CallSite, ProcedureTS, Signature
from bitterm.ssa.encoder import ENTRY, Target
from bitterm.synth.bounds import SynthesisBounds
from bitterm.synth.engine import Clause, Instance, TemplateSolver
from bitterm.synth.invariants import forward_body, infer_invariant, invariant_formula
from bitterm.synth.ranking import LexRanking, comp_term_arg
from bitterm.synth.templates import Templates

logger = logging.getLogger(__name__)

PRE = "pre"


def bad_name(origin: int) -> str:
    return PRE if origin == ENTRY else f"bad{origin}"


class BackwardAnalysis:
    """
    Backward operations on one procedure analyzed forward under ``context``.

    Parameters:
    - ts (ProcedureTS): the encoded procedure.
    - templates (Templates): template factory shared with the forward pass.
    - solver (TemplateSolver): the synthesis engine.
    - bounds (SynthesisBounds): ranking and iteration limits.
    - context (Term): the forward calling context.
    - sums (Term): instantiated callee summaries.
    - invariants (Term): forward invariants in premise form.
    """

    def __init__(
        self,
        ts: ProcedureTS,
        templates: Templates,
        solver: TemplateSolver,
        bounds: SynthesisBounds,
        context: Term = T.TRUE,
        sums: Term = T.TRUE,
        invariants: Term = T.TRUE,
    ):
        self.ts = ts
        self.templates = templates
        self.solver = solver
        self.bounds = bounds
        self.context = context
        self.sums = sums
        self.invariants = invariants
        self.disjuncts: List[AbstractValue] = []

    @property
    def sessions(self) -> SessionFactory:
        return self.solver.sessions

    def body(self, neg_sums_u: Term = T.TRUE) -> Term:
        return T.and_(forward_body(self.ts, self.context, self.sums, self.invariants), neg_sums_u)

    # system

    def _unknowns(self) -> Dict[str, Template]:
        named = {bad_name(loop.index): self.templates.loop(self.ts, loop) for loop in self.ts.loops}
        named[PRE] = self.templates.precondition(self.ts)
        return named

    def _closure(self, body: Term) -> List[Clause]:
        clauses = []
        for loop in self.ts.loops:
            back = Instance(bad_name(loop.index), loop.conclusion_mapping())
            for origin in sorted(loop.back_from):
                clauses.append(Clause(T.and_(body, loop.end_guard), Instance(bad_name(origin)), [back],
                                      f"back{loop.index}->{origin}"))
            entry = Instance(bad_name(loop.index), loop.entry_mapping())
            for origin in sorted(loop.entered_from):
                clauses.append(Clause(T.and_(body, loop.head_guard), Instance(bad_name(origin)), [entry],
                                      f"entry{loop.index}->{origin}"))
        return clauses

    def _exit_seeds(self, body: Term, backward_ctx: Term) -> List[Clause]:
        violated = T.and_(body, self.ts.exit_guard, T.not_(backward_ctx))
        return [Clause(violated, Instance(bad_name(o)), (), f"exit->{o}") for o in sorted(self.ts.exit_from)]

    def _ranking_seeds(self, body: Term, ranking: LexRanking) -> List[Clause]:
        clauses = []
        for loop in self.ts.loops:
            unranked = T.and_(body, loop.end_guard, T.not_(ranking.decreases(loop)))
            clauses.append(Clause(unranked, Instance(bad_name(loop.index)), (), f"rank{loop.index}"))
        return clauses

    def _callee_seeds(self, body: Term, callee_preconds: Mapping[int, Term]) -> List[Clause]:
        clauses = []
        for site in self.ts.calls:
            precond = callee_preconds.get(site.index, T.TRUE)
            if precond is T.TRUE:
                continue
            violated = T.and_(body, site.guard, T.not_(precond))
            for o in sorted(site.from_set):
                clauses.append(Clause(violated, Instance(bad_name(o)), (), f"{site.label}->{o}"))
        return clauses

    # operations

    def comp_nec_precond(
        self,
        ranking: LexRanking,
        backward_ctx: Term = T.TRUE,
        callee_preconds: Optional[Mapping[int, Term]] = None,
        neg_sums_u: Term = T.TRUE,
    ) -> AbstractValue:
        """
        Over-approximation of the inputs that may break a termination condition.

        Parameters:
        - ranking (LexRanking): the termination argument to check.
        - backward_ctx (Term): the caller's requirement on inputs and outputs at exit.
        - callee_preconds (Mapping[int, Term]): precondition per call-site index, over the actuals.
        - neg_sums_u (Term): extra constraint on the body.

        Returns:
        AbstractValue: the value of ``Pre``; top after a timeout, so its negation is false.
        """
        body = self.body(neg_sums_u)
        clauses = (
            self._ranking_seeds(body, ranking)
            + self._callee_seeds(body, callee_preconds or {})
            + self._exit_seeds(body, backward_ctx)
            + self._closure(body)
        )
        named = self._unknowns()
        try:
            values = self.solver.solve(named, clauses)
        except SolverTimeout as e:
            logger.warning(f"necessary precondition of {self.ts.name} timed out: {str(e)}")
            return AbstractValue.top(len(named[PRE]))
        return values[PRE]

    def comp_callctx_u(
        self,
        backward_ctx: Term,
        site: CallSite,
        callee_template: Template,
        signature: Signature,
        neg_sums_u: Term = T.TRUE,
    ) -> Term:
        """
        Backward calling context of ``site``, over the callee's formals.

        The callee must return values from which the caller can still meet
        ``backward_ctx``. The result is false when the site is unreachable
        and after a timeout.
        """
        body = self.body(neg_sums_u)
        try:
            with self.sessions(f"{self.ts.name}.{site.label}.reach") as session:
                if session.check([body, site.guard]) is None:
                    return T.FALSE
            named = self._unknowns()
            named["ccu"] = callee_template
            head = Instance("ccu", signature.mapping(site))
            clauses = self._exit_seeds(body, backward_ctx) + self._closure(body)
            at_site = T.and_(body, site.guard)
            for target in sorted(site.to_set, key=lambda t: (t.kind, t.loop)):
                clauses.append(self._continuation(at_site, target, head, backward_ctx))
            values = self.solver.solve(named, clauses)
        except SolverTimeout as e:
            logger.warning(f"backward context of {site.label} in {self.ts.name} timed out: {str(e)}")
            return T.FALSE
        return T.not_(concretize(callee_template, values["ccu"]))

    def _continuation(self, at_site: Term, target: Target, head: Instance, backward_ctx: Term) -> Clause:
        if target.kind == "exit":
            bad = T.and_(at_site, self.ts.exit_guard, T.not_(backward_ctx))
            return Clause(bad, head, (), "site->exit")
        loop = self.ts.loops[target.loop]
        if target.kind == "entry":
            premise = Instance(bad_name(loop.index), loop.entry_mapping())
            return Clause(T.and_(at_site, loop.head_guard), head, [premise], f"site->entry{loop.index}")
        premise = Instance(bad_name(loop.index), loop.conclusion_mapping())
        return Clause(T.and_(at_site, loop.end_guard), head, [premise], f"site->back{loop.index}")

    def precondition_disjuncts(
        self,
        backward_ctx: Term = T.TRUE,
        callee_preconds: Optional[Mapping[int, Term]] = None,
    ) -> List[AbstractValue]:
        """
        Values of ``Pre`` whose negations together make up the precondition for termination.

        Repeatedly picks an input not yet covered, looks for a ranking under
        that input alone and, when one exists, adds the inputs from which the
        ranking and the callee preconditions provably hold. Inputs without a
        ranking, or not covered by what their ranking yields, are excluded
        from later picks. Stops when no input is left or after ``max_iter``
        rounds; what was collected so far is returned either way.
        """
        ts = self.ts
        pre_template = self.templates.precondition(ts)
        loop_templates = self.templates.loops(ts)
        body = self.body()
        found: List[AbstractValue] = []
        covered: List[Term] = []
        blocked: List[Term] = []
        try:
            with self.sessions(f"{ts.name}.candidates") as session:
                for round_no in range(self.bounds.max_iter):
                    model = session.check([body, T.not_(T.disj(covered))] + blocked)
                    if model is None:
                        logger.debug(f"{ts.name}: no uncovered input after {round_no} rounds")
                        break
                    candidate = T.conj(T.eq(x, T.const(model.eval(x), x.width, x.signed)) for x in ts.inputs)
                    point = T.and_(self.context, candidate)
                    values = infer_invariant(ts, loop_templates, point, self.sums, self.solver)
                    inv = invariant_formula(ts, loop_templates, values)
                    ranking = comp_term_arg(ts, inv, self.sums, self.bounds, self.sessions, point)
                    if ranking.top:
                        blocked.append(T.not_(candidate))
                        continue
                    pre_u = self.comp_nec_precond(ranking, backward_ctx, callee_preconds)
                    found.append(pre_u)
                    covered.append(T.not_(concretize(pre_template, pre_u)))
                    if session.check([candidate, covered[-1]]) is None:
                        blocked.append(T.not_(candidate))
                else:
                    logger.info(f"{ts.name}: precondition search stopped after {self.bounds.max_iter} rounds")
        except SolverTimeout as e:
            logger.warning(f"precondition search for {ts.name} timed out: {str(e)}")
        return found

    def comp_precond_term(
        self,
        backward_ctx: Term = T.TRUE,
        callee_preconds: Optional[Mapping[int, Term]] = None,
    ) -> Term:
        """
        Sufficient precondition for termination, over the procedure's inputs; false when nothing was found.

        The abstract values it is made of are kept in ``disjuncts``.
        """
        self.disjuncts = self.precondition_disjuncts(backward_ctx, callee_preconds)
        return precondition_formula(self.templates.precondition(self.ts), self.disjuncts)


def precondition_formula(template: Template, disjuncts: Sequence[AbstractValue]) -> Term:
    return T.disj(T.not_(concretize(template, d)) for d in disjuncts)
