"""
Interprocedural termination analysis over the call graph.

The forward pass walks from the entry procedure down the call graph,
computing a calling context for each reachable call site, analysing the
callee under it (unless a stored context already covers it) and finally the
invariants and summary of the caller. Summaries are stored as implications
``context ==> summary`` so that every stored result stays valid for later
callers.

Universal termination then settles a status per procedure, callees first.
Conditional termination runs a backward pass from the entry that pushes
backward calling contexts down and callee preconditions up, ending with a
sufficient precondition for the entry.
"""
import functools
import itertools
import logging
import time
from contextlib import contextmanager
from typing import Dict, Iterator, List, Optional

from bitterm.absdom import AbstractValue, TemplateSpec, concretize, describe, describe_negation, is_subsumed, join
from bitterm.absdom.value import clip
from bitterm.driver.records import (
    AnalysisRecord,
    BackwardEntry,
    Budget,
    ForwardEntry,
    ProcedureVerdict,
    TermStatus,
    Verdict,
)
from bitterm.errors import ConfigError, SolverTimeout
from bitterm.frontend import ast as A
from bitterm.frontend.callgraph import reachable
from bitterm.logic import terms as T
from bitterm.logic.solver import SessionFactory, SolverSettings, SolverStats
from bitterm.logic.terms import Term
from bitterm.ssa import (
    ProcedureTS,
    Signature,
    encode,
    halting_procedures,
    inline_all,
    instantiate,
    instantiate_summaries,
)
from bitterm.ssa.encoder import ExpressionCompiler
from bitterm.synth import (
    BackwardAnalysis,
    SynthesisBounds,
    TemplateSolver,
    Templates,
    comp_callctx_o,
    comp_inv_sum_o,
    comp_term_arg,
    invariant_formula,
)

logger = logging.getLogger(__name__)

CHECKS = ("universal", "conditional")


class Analyzer:
    """
    Termination analysis of one program, keeping its store across runs.

    Parameters:
    - program (A.Program): the checked program; its ``entry`` is analysed.
    - bounds (SynthesisBounds): ranking and iteration limits.
    - template (TemplateSpec): template selection.
    - solver (SolverSettings): SAT back end.
    - budget (Budget): wall-clock budgets.
    - monolithic (bool): analyse the entry with every call inlined instead of per procedure.
    """

    def __init__(
        self,
        program: A.Program,
        bounds: Optional[SynthesisBounds] = None,
        template: Optional[TemplateSpec] = None,
        solver: Optional[SolverSettings] = None,
        budget: Optional[Budget] = None,
        monolithic: bool = False,
    ):
        self.program = program
        self.entry = program.entry
        self.bounds = bounds or SynthesisBounds()
        self.template = template or TemplateSpec()
        self.settings = solver or SolverSettings()
        self.budget = budget or Budget()
        self.monolithic = monolithic
        self.stats = SolverStats()
        self.sessions = SessionFactory(self.settings, self.stats, self.budget.deadline)
        self.solver = TemplateSolver(self.sessions, self.bounds)
        self.templates = Templates(self.template)
        if monolithic:
            self.order = [self.entry]
            self.procedures: Dict[str, ProcedureTS] = {self.entry: inline_all(program)}
        else:
            halting = halting_procedures(program)
            self.order = reachable(program, self.entry)
            self.procedures = {name: encode(program.procedures[name], program, halting) for name in self.order}
        self.signatures = {name: Signature.of(ts) for name, ts in self.procedures.items()}
        self.records: Dict[str, AnalysisRecord] = {}
        self._visits: List[list] = []

    @property
    def mode(self) -> str:
        return "mta" if self.monolithic else "ipta"

    def record(self, name: str) -> AnalysisRecord:
        if name not in self.records:
            self.records[name] = AnalysisRecord(name)
        return self.records[name]

    @contextmanager
    def _visit(self, name: str) -> Iterator[None]:
        """Budget scope of one procedure visit; solver calls are charged to the procedure itself."""
        frame = [self.stats.calls, 0]
        self._visits.append(frame)
        try:
            with self.budget.procedure(name):
                yield
        finally:
            self._visits.pop()
            total = self.stats.calls - frame[0]
            record = self.record(name)
            record.stats["solver_calls"] = record.stats.get("solver_calls", 0) + total - frame[1]
            if self._visits:
                self._visits[-1][1] += total

    # facts from the store

    def entry_context(self) -> Term:
        """Globals hold their initializers at entry, zero when they have none."""
        ts = self.procedures[self.entry]
        inputs = dict(zip(ts.input_names, ts.inputs))
        values: Dict[str, Term] = {}
        fresh = itertools.count()
        compiler = ExpressionCompiler(
            ts.types,
            values.__getitem__,
            lambda ctype: T.var(f"init@{next(fresh)}", ts.types.width(ctype), ctype.signed),
        )
        conjuncts = []
        for g in self.program.globals:
            x = inputs[g.name]
            value = compiler.value(g.init) if g.init is not None else T.const(0, x.width, x.signed)
            values[g.name] = T.cast(value, x.width, x.signed)
            conjuncts.append(T.eq(x, values[g.name]))
        return T.conj(conjuncts)

    def summary(self, name: str, returning: bool = False) -> Term:
        """
        Stored summaries of ``name`` over its formals, each under the context it was computed for.

        Only rows over outputs are used, so a summary never rules out the
        inputs a call is made with. A bottom summary means the call never
        returns; it is kept only when ``returning`` asks for executions in
        which every call returns, and only for callees that cannot halt.
        """
        ts = self.procedures[name]
        template = self.templates.summary(ts)
        outputs = set(ts.outputs)
        rows = [i for i, row in enumerate(template.rows)
                if all(template.variables[j] in outputs for j in row.support())]
        restricted = template.restrict(rows)
        parts = []
        for e in self.record(name).forward:
            if e.summary.is_bottom:
                if returning and not ts.halts:
                    parts.append(T.implies(e.context, T.not_(ts.exit_guard)))
                continue
            value = AbstractValue(tuple(e.summary.bounds[i] for i in rows))
            parts.append(T.implies(e.context, concretize(restricted, value)))
        return T.conj(parts)

    def callee_summaries(self, ts: ProcedureTS, returning: bool = False) -> Term:
        callees = {site.callee for site in ts.calls}
        sums = {h: self.summary(h, returning) for h in sorted(callees) if self.record(h).forward}
        return instantiate_summaries(ts, sums, self.signatures)

    def invariants(self, name: str) -> Term:
        """Stored invariants in premise form, each under its calling context."""
        ts = self.procedures[name]
        loops = self.templates.loops(ts)
        return T.disj(T.and_(e.context, invariant_formula(ts, loops, e.invariants)) for e in self.record(name).forward)

    def _subsumed(self, label: str, formula: Term) -> bool:
        with self.sessions(label) as session:
            return session.is_valid(formula)

    def _covered(self, name: str, callctx: Term, value: Optional[AbstractValue]) -> bool:
        """
        Whether the stored forward entries of ``name`` already cover ``callctx``.

        A single stored context is compared in the domain order when both
        contexts are template values; otherwise against the disjunction of
        all stored contexts.
        """
        record = self.record(name)
        if not record.forward:
            return False
        (first, *rest) = record.forward
        if value is not None and first.context_value is not None and not rest:
            template = self.templates.context(self.procedures[name])
            with self.sessions(f"{name}.reuse") as session:
                return is_subsumed(template, value, first.context_value, session)
        return self._subsumed(f"{name}.reuse", T.implies(callctx, record.context))

    def summary_lines(self, name: str) -> List[str]:
        """The join of every stored summary of ``name``, which holds whichever stored context it was called in."""
        ts = self.procedures[name]
        forward = self.record(name).forward
        if not forward:
            return []
        joined = functools.reduce(join, (e.summary for e in forward))
        if joined.is_bottom:
            return ["false"]
        template = self.templates.summary(ts)
        names = {x.name: n for x, n in zip(ts.inputs + ts.outputs, ts.input_names + ts.output_names)}
        return describe(template, clip(template, joined), names)

    def _unreachable(self, ts: ProcedureTS, context: Term, inv: Term, points: Term) -> bool:
        """No execution under ``context`` and ``inv`` in which every call returns reaches ``points``."""
        sums = self.callee_summaries(ts, returning=True)
        with self.sessions(f"{ts.name}.out") as session:
            return session.check([ts.formula, context, sums, inv, points]) is None

    # forward

    def analyze_forward(self, name: str, callctx: Term = T.TRUE, context_value: Optional[AbstractValue] = None) -> None:
        """
        Forward-analyse ``name`` under ``callctx`` and every callee under the context of its call sites.

        Parameters:
        - name (str): the procedure.
        - callctx (Term): calling context over the procedure's formals.
        - context_value (AbstractValue): ``callctx`` as a value of the context template, when it is one.
        """
        record = self.record(name)
        if self._covered(name, callctx, context_value):
            logger.debug(f"{name}: calling context covered by {len(record.forward)} stored entries")
            return
        ts = self.procedures[name]
        loops = self.templates.loops(ts)
        with self._visit(name):
            for site in ts.calls:
                callee = self.procedures[site.callee]
                template = self.templates.context(callee)
                value = comp_callctx_o(ts, loops, {site.callee: template}, self.signatures, callctx,
                                       self.callee_summaries(ts), self.solver, [site])[site.index]
                if value.is_bottom:
                    logger.debug(f"{name}: {site.label} is unreachable")
                    continue
                record.reachable_sites.add(site.index)
                self.analyze_forward(site.callee, concretize(template, value), value)
            invs, summary = comp_inv_sum_o(ts, loops, self.templates.summary(ts), callctx,
                                           self.callee_summaries(ts), self.solver)
            if ts.calls and not summary.is_bottom:
                if self._unreachable(ts, callctx, invariant_formula(ts, loops, invs), ts.exit_guard):
                    summary = AbstractValue.bottom(len(summary))
        record.forward.append(ForwardEntry(callctx, invs, summary, context_value))
        logger.info(f"{name}: forward entry {len(record.forward)}, summary {'; '.join(self.summary_lines(name))}")

    # universal termination

    def termination_status(self, name: str) -> TermStatus:
        """Settle ``name`` as terminating, non-terminating or potentially non-terminating, callees first."""
        record = self.record(name)
        if record.status is not None:
            return record.status
        ts = self.procedures[name]
        timeouts = self.stats.timeouts
        callees = TermStatus.TERMINATING
        for site in ts.calls:
            if site.index in record.reachable_sites:
                callees = callees.join(self.termination_status(site.callee))
        with self._visit(name):
            context, sums, inv = record.context, self.callee_summaries(ts), self.invariants(name)
            if self._unreachable(ts, context, inv, ts.termination_points):
                status = TermStatus.NON_TERMINATING
            elif callees is not TermStatus.TERMINATING:
                logger.info(f"{name}: a callee is {callees.value}, no ranking attempted")
                status = TermStatus.POTENTIALLY_NON_TERMINATING.join(callees)
            else:
                record.ranking = comp_term_arg(ts, inv, sums, self.bounds, self.sessions, context)
                status = TermStatus.POTENTIALLY_NON_TERMINATING if record.ranking.top else TermStatus.TERMINATING
        if status is TermStatus.POTENTIALLY_NON_TERMINATING and self.stats.timeouts > timeouts:
            status = TermStatus.UNKNOWN_TIMEOUT
        logger.info(f"{name}: {status.value}")
        return record.settle(status)

    # conditional termination

    def analyze_backward(self, name: str, backward_ctx: Term = T.TRUE) -> Term:
        """
        Backward-analyse ``name`` so that it terminates and exits in ``backward_ctx``.

        Parameters:
        - name (str): the procedure, already forward-analysed.
        - backward_ctx (Term): condition over the procedure's formals that exits must meet.

        Returns:
        Term: a sufficient precondition over the procedure's inputs, joined
        from every stored entry whose requirement is at least as strong.
        """
        record = self.record(name)
        stored = [e.precondition for e in record.backward
                  if self._subsumed(f"{name}.reuse-u", T.implies(e.context, backward_ctx))]
        if stored:
            logger.debug(f"{name}: backward context covered by {len(stored)} stored entries")
            return T.disj(stored)
        ts = self.procedures[name]
        with self._visit(name):
            analysis = BackwardAnalysis(ts, self.templates, self.solver, self.bounds, record.context,
                                        self.callee_summaries(ts), self.invariants(name))
            callee_preconds = {}
            for site in ts.calls:
                if site.index not in record.reachable_sites:
                    continue
                signature = self.signatures[site.callee]
                callee_template = self.templates.context(self.procedures[site.callee])
                ctx_u = analysis.comp_callctx_u(backward_ctx, site, callee_template, signature)
                callee_preconds[site.index] = instantiate(site, self.analyze_backward(site.callee, ctx_u), signature)
            precondition = analysis.comp_precond_term(backward_ctx, callee_preconds)
        disjuncts = analysis.disjuncts
        record.backward.append(BackwardEntry(backward_ctx, disjuncts, precondition))
        logger.info(f"{name}: backward entry {len(record.backward)}, {len(disjuncts)} precondition disjuncts")
        return precondition

    def conditional_status(self, name: str) -> TermStatus:
        record = self.record(name)
        if record.status is not None:
            return record.status
        ts = self.procedures[name]
        timeouts = self.stats.timeouts
        with self._visit(name):
            context, sums, inv = record.context, self.callee_summaries(ts), self.invariants(name)
            if self._unreachable(ts, context, inv, ts.termination_points):
                status = TermStatus.NON_TERMINATING
            elif record.backward and self._subsumed(f"{name}.pre", T.implies(context, record.precondition)):
                status = TermStatus.TERMINATING
            else:
                status = TermStatus.POTENTIALLY_NON_TERMINATING
        if status is TermStatus.POTENTIALLY_NON_TERMINATING and self.stats.timeouts > timeouts:
            status = TermStatus.UNKNOWN_TIMEOUT
        logger.info(f"{name}: {status.value}")
        return record.settle(status)

    def precondition_text(self, name: str) -> str:
        record = self.record(name)
        if record.status is TermStatus.TERMINATING:
            return "true"
        if record.status is TermStatus.NON_TERMINATING:
            return "false"
        ts = self.procedures[name]
        names = {x.name: n for x, n in zip(ts.inputs, ts.input_names)}
        return describe_negation(self.templates.precondition(ts), record.disjuncts, names)

    # runs

    def analyzed(self) -> List[str]:
        """Procedures the forward pass reached, callees first."""
        return [name for name in self.order if name in self.records and self.records[name].forward]

    def analyze_universal(self) -> Verdict:
        """Prove universal termination or non-termination of the entry procedure."""
        return self._run("universal")

    def analyze_conditional(self) -> Verdict:
        """Infer a sufficient precondition for termination of the entry procedure."""
        return self._run("conditional")

    def analyze_monolithic(self, check: str = "universal") -> Verdict:
        """Run ``check`` on the entry procedure with every call inlined."""
        analyzer = self if self.monolithic else Analyzer(self.program, self.bounds, self.template, self.settings,
                                                          self.budget, monolithic=True)
        return analyzer.run(check)

    def run(self, check: str = "conditional") -> Verdict:
        if check not in CHECKS:
            raise ConfigError(f"unknown check {check!r}, expected one of {', '.join(CHECKS)}")
        return self._run(check)

    def _run(self, check: str) -> Verdict:
        started = time.monotonic()
        self.budget.start()
        try:
            self.analyze_forward(self.entry, self.entry_context())
            if check == "conditional":
                self.analyze_backward(self.entry, T.TRUE)
            settle = self.conditional_status if check == "conditional" else self.termination_status
            for name in self.analyzed():
                settle(name)
        except SolverTimeout as e:
            logger.warning(f"analysis of {self.program.filename} stopped: {str(e)}")
        return self._verdict(check, time.monotonic() - started)

    def _verdict(self, check: str, seconds: float) -> Verdict:
        procedures = []
        for name in self.analyzed():
            record = self.records[name]
            if record.status is None:
                record.settle(TermStatus.UNKNOWN_TIMEOUT)
            text = self.precondition_text(name) if check == "conditional" else None
            procedures.append(ProcedureVerdict(name, record.status, record.ranking, text, self.summary_lines(name)))
        entry = self.record(self.entry)
        status = entry.status or TermStatus.UNKNOWN_TIMEOUT
        if self.budget.expired and status is TermStatus.POTENTIALLY_NON_TERMINATING:
            status = TermStatus.UNKNOWN_TIMEOUT
        verdict = Verdict(self.entry, self.mode, check, status, procedures, stats={
            **{f"solver_{k}": v for k, v in self.stats.as_dict().items()},
            "wall_ms": round(seconds * 1000),
        })
        if check == "conditional":
            if status is TermStatus.TERMINATING:
                verdict.precondition = T.TRUE
            elif status is TermStatus.NON_TERMINATING:
                verdict.precondition = T.FALSE
            else:
                verdict.precondition = entry.precondition
            verdict.precondition_text = self.precondition_text(self.entry) if entry.forward else "false"
        logger.info(f"{self.program.filename} ({self.mode}, {check}): {status.value}")
        return verdict
