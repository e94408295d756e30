"""
Lexicographic linear ranking functions by counterexample-guided synthesis.

Each loop ``i`` gets components ``R_1 .. R_n`` (``R_1`` dominates) over the
variables the loop modifies. A step from head state ``x`` to end-of-body
state ``x'`` is ranked when some ``R_j`` strictly decreases and every
dominating component does not increase. Differences are taken at a signed
width wide enough that neither the variables nor the products wrap, so a
wrapping counter cannot masquerade as a decreasing one.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from bitterm.errors import SolverTimeout
from bitterm.logic import terms as T
from bitterm.logic.evaluate import inner_product_width
from bitterm.logic.solver import Model, SessionFactory, SolverSession
from bitterm.logic.terms import Term
from bitterm.ssa import LoopInfo, ProcedureTS
from bitterm.synth.bounds import FULL, SynthesisBounds
from bitterm.synth.invariants import forward_body

logger = logging.getLogger(__name__)

Components = Tuple[Tuple[int, ...], ...]


def ranked(loop: LoopInfo) -> Tuple[List[Term], List[Term]]:
    """Head and end-of-body values of the variables the loop modifies."""
    return loop.state[: loop.modified], loop.end[: loop.modified]


def _width(xs: Sequence[Term], magnitude: int, extend: bool) -> int:
    w = max((x.width for x in xs), default=1)
    if not extend:
        return w
    return inner_product_width([w + 1] * len(xs), [magnitude] * len(xs))


def _delta(coefficients: Sequence[Term], xs: Sequence[Term], ys: Sequence[Term], width: int) -> Term:
    acc = T.const(0, width, True)
    for c, x, y in zip(coefficients, xs, ys):
        if c.is_const and c.value == 0:
            continue
        diff = T.sub(T.cast(x, width, True), T.cast(y, width, True))
        # multiply by magnitudes; a negative constant has a long run of set bits
        if c.is_const and c.signed_value < 0:
            acc = T.sub(acc, T.mul(T.const(-c.signed_value, width, True), diff))
        elif diff.is_const and diff.signed_value < 0:
            acc = T.sub(acc, T.mul(c, T.const(-diff.signed_value, width, True)))
        else:
            acc = T.add(acc, T.mul(c, diff))
    return acc


def lex_decrease(components: Sequence[Sequence[Term]], xs: Sequence[Term], ys: Sequence[Term], width: int) -> Term:
    """Some component strictly decreases while all dominating ones do not increase."""
    zero = T.const(0, width, True)
    deltas = [_delta(c, xs, ys, width) for c in components]
    cases = []
    for j, d in enumerate(deltas):
        cases.append(T.conj([T.gt(d, zero)] + [T.ge(e, zero) for e in deltas[:j]]))
    return T.disj(cases)


@dataclass(frozen=True)
class LexRanking:
    """
    Per-loop lexicographic ranking; ``None`` marks a loop with no ranking yet.

    ``top`` stands for "don't know": no ranking within the bounds, which
    callers treat as a failed termination argument.
    """

    components: Tuple[Optional[Components], ...] = ()
    names: Tuple[Tuple[str, ...], ...] = ()
    extended: bool = True
    top: bool = False

    @classmethod
    def unknown(cls) -> "LexRanking":
        return cls(top=True)

    def decreases(self, loop: LoopInfo) -> Term:
        """The ranking condition of one loop: true for top, false while the loop has none."""
        if self.top:
            return T.TRUE
        comps = self.components[loop.index]
        if comps is None:
            return T.FALSE
        xs, ys = ranked(loop)
        magnitude = max((abs(c) for comp in comps for c in comp), default=1)
        width = _width(xs, magnitude, self.extended)
        terms = [[T.const(c, width, True) for c in comp] for comp in comps]
        return lex_decrease(terms, xs, ys, width)

    def condition(self, ts: ProcedureTS) -> Term:
        """``RR``: every iteration that reaches the end of a loop body is ranked."""
        return T.conj(T.implies(loop.end_guard, self.decreases(loop)) for loop in ts.loops)

    def describe(self) -> List[str]:
        if self.top:
            return ["unknown"]
        lines = []
        for i, comps in enumerate(self.components):
            if comps is None:
                lines.append(f"loop {i}: none")
                continue
            parts = []
            for comp in comps:
                terms = []
                for c, name in zip(comp, self.names[i]):
                    if c:
                        terms.append(name if c == 1 else f"-{name}" if c == -1 else f"{c}*{name}")
                parts.append(" + ".join(terms).replace("+ -", "- ") or "0")
            lines.append(f"loop {i}: ({', '.join(parts)})")
        return lines


@dataclass
class _LoopState:
    loop: LoopInfo
    size: int = 1
    samples: List[Tuple[Tuple[int, ...], Tuple[int, ...]]] = field(default_factory=list)
    components: Optional[Components] = None


class _RankingSynthesis:
    def __init__(self, ts: ProcedureTS, sessions: SessionFactory, bounds: SynthesisBounds):
        self.ts = ts
        self.sessions = sessions
        self.bounds = bounds

    def ranking(self, states: Dict[int, _LoopState]) -> LexRanking:
        return LexRanking(
            tuple(states[loop.index].components for loop in self.ts.loops),
            tuple(tuple(loop.names[: loop.modified]) for loop in self.ts.loops),
            self.bounds.extend_width,
        )

    def counterexample(self, model: Model, ranking: LexRanking) -> Optional[LoopInfo]:
        for loop in self.ts.loops:
            if model.eval(loop.end_guard) and not model.eval(ranking.decreases(loop)):
                return loop
        return None

    def fit(self, state: _LoopState, stage: Optional[int]) -> Optional[Components]:
        """Coefficients within the range of ``stage`` ranking every sampled step."""
        xs, _ = ranked(state.loop)
        if not xs:
            return None
        magnitude = stage if stage is not FULL else 1 << (max(x.width for x in xs) - 1)
        width = _width(xs, magnitude, self.bounds.extend_width)
        if not self.bounds.extend_width and stage is FULL:
            magnitude = (1 << (width - 1)) - 1
        coefficients = [
            [T.var(f"rank@{state.loop.index}.{j}.{k}", width, True) for k in range(len(xs))]
            for j in range(state.size)
        ]
        bound = T.const(magnitude, width, True)
        constraints = [T.and_(T.le(c, bound), T.ge(c, T.neg(bound))) for comp in coefficients for c in comp]
        for before, after in state.samples:
            xv = [T.const(v, x.width, x.signed) for v, x in zip(before, xs)]
            yv = [T.const(v, x.width, x.signed) for v, x in zip(after, xs)]
            constraints.append(lex_decrease(coefficients, xv, yv, width))
        with self.sessions(f"{self.ts.name}.rank{state.loop.index}") as session:
            model = session.check(constraints)
        if model is None:
            logger.debug(f"{self.ts.name} loop {state.loop.index}: no {state.size}-component ranking "
                         f"with coefficients up to {magnitude}")
            return None
        return tuple(tuple(model.eval(c) for c in comp) for comp in coefficients)

    def search(self, session: SolverSession, body: Term, stage: Optional[int]) -> Optional[LexRanking]:
        """
        Counterexample-guided search with coefficients limited to ``stage``.

        Components are added to a loop, up to ``max_lex``, whenever its
        samples admit no ranking with the current count.
        """
        states = {loop.index: _LoopState(loop) for loop in self.ts.loops}
        while True:
            ranking = self.ranking(states)
            model = session.check([body, T.not_(ranking.condition(self.ts))])
            if model is None:
                return ranking
            loop = self.counterexample(model, ranking)
            state = states[loop.index]
            xs, ys = ranked(loop)
            state.samples.append((tuple(model.eval(x) for x in xs), tuple(model.eval(y) for y in ys)))
            components = self.fit(state, stage) if len(state.samples) <= self.bounds.max_iter else None
            if components is not None:
                state.components = components
                continue
            if state.size >= self.bounds.max_lex:
                logger.debug(f"{self.ts.name} loop {loop.index}: no ranking within {self.bounds.max_lex} "
                             f"components at range {stage or 'full'}")
                return None
            state.size += 1
            state.samples = []
            state.components = None
            logger.debug(f"{self.ts.name} loop {loop.index}: trying {state.size} components")


def comp_term_arg(
    ts: ProcedureTS,
    inv: Term,
    sums: Term,
    bounds: SynthesisBounds,
    sessions: SessionFactory,
    context: Term = T.TRUE,
) -> LexRanking:
    """
    Synthesize a lexicographic ranking for every loop of ``ts``.

    Each coefficient range of the schedule gets a full search over up to
    ``max_lex`` components before the next, wider range is tried.

    Parameters:
    - ts (ProcedureTS): the encoded procedure.
    - inv (Term): forward invariants in premise form.
    - sums (Term): instantiated callee summaries.
    - bounds (SynthesisBounds): component, sample and coefficient limits.
    - sessions (SessionFactory): source of solver sessions.
    - context (Term): extra constraint over the inputs, such as a candidate input.

    Returns:
    LexRanking: a ranking whose condition is re-checked valid in a fresh
    session, or the unknown ranking when the bounds run out or the solver
    times out.
    """
    body = forward_body(ts, context, sums, inv)
    synthesis = _RankingSynthesis(ts, sessions, bounds)
    try:
        ranking = None
        with sessions(f"{ts.name}.cegis") as session:
            for stage in bounds.coeff_schedule:
                ranking = synthesis.search(session, body, stage)
                if ranking is not None:
                    break
        if ranking is None:
            logger.info(f"{ts.name}: no ranking within {bounds.max_lex} components")
            return LexRanking.unknown()
        with sessions(f"{ts.name}.recheck") as fresh:
            if fresh.check([body, T.not_(ranking.condition(ts))]) is not None:
                logger.error(f"ranking for {ts.name} failed its re-check")
                return LexRanking.unknown()
    except SolverTimeout as e:
        logger.warning(f"ranking synthesis for {ts.name} timed out: {str(e)}")
        return LexRanking.unknown()
    logger.info(f"{ts.name}: ranking {'; '.join(ranking.describe()) or 'not needed'}")
    return ranking
