"""
Synthesized values checked on randomly drawn systems at width 4: every
invariant passes the re-check of its defining implications and contains all
reachable states, and every ranking found agrees with the exhaustive oracle.
"""
import random

import pytest

from bitterm.absdom import concretize, interval_template
from bitterm.driver import TermStatus
from bitterm.frontend import parse
from bitterm.logic import terms as T
from bitterm.logic.evaluate import evaluate
from bitterm.oracle import oracle
from bitterm.ssa import encode
from bitterm.synth import Clause, Instance, SynthesisBounds, comp_term_arg, forward_body

A, B = T.var("a", 4), T.var("b", 4)
A0, B0 = T.var("a0", 4), T.var("b0", 4)
A1, B1 = T.var("a1", 4), T.var("b1", 4)

UPDATES = {
    "add": (lambda x, k: T.add(x, T.const(k, 4)), lambda v, k: (v + k) % 16),
    "sub": (lambda x, k: T.sub(x, T.const(k, 4)), lambda v, k: (v - k) % 16),
    "xor": (lambda x, k: T.bvxor(x, T.const(k, 4)), lambda v, k: v ^ k),
    "or": (lambda x, k: T.bvor(x, T.const(k, 4)), lambda v, k: v | k),
    "shl": (lambda x, k: T.shl(x, T.const(1, 4)), lambda v, k: (v << 1) % 16),
}
GUARDS = {
    "lt": (T.lt, lambda v, k: v < k),
    "ne": (T.ne, lambda v, k: v != k),
    "gt": (T.gt, lambda v, k: v > k),
    "true": (None, lambda v, k: True),
}


class RandomSystem:
    """A one-loop system over ``a`` and ``b``, as clauses and as a successor function."""

    def __init__(self, seed: int):
        rng = random.Random(seed)
        self.a0, self.b0 = rng.randrange(16), rng.randrange(16)
        self.exact_b = rng.random() < 0.5
        self.guard, self.bound = rng.choice(list(GUARDS)), rng.randrange(16)
        self.update, self.step = rng.choice(list(UPDATES)), rng.randrange(1, 16)
        self.b_update = rng.choice(["keep", "inc", "havoc"])

    def initial(self):
        bs = [self.b0] if self.exact_b else range(self.b0 + 1)
        return {(self.a0, b) for b in bs}

    def successors(self, a, b):
        if not GUARDS[self.guard][1](a, self.bound):
            return set()
        a1 = UPDATES[self.update][1](a, self.step)
        if self.b_update == "keep":
            return {(a1, b)}
        if self.b_update == "inc":
            return {(a1, (b + 1) % 16)}
        return {(a1, v) for v in range(16)}

    def reachable(self):
        seen, frontier = set(), list(self.initial())
        while frontier:
            state = frontier.pop()
            if state in seen:
                continue
            seen.add(state)
            frontier.extend(self.successors(*state))
        return seen

    def clauses(self):
        b_init = T.eq(B0, T.const(self.b0, 4)) if self.exact_b else T.le(B0, T.const(self.b0, 4))
        init = Clause(T.and_(T.eq(A0, T.const(self.a0, 4)), b_init), Instance("inv", {A: A0, B: B0}), (), "init")
        guard = GUARDS[self.guard][0]
        body = [T.eq(A1, UPDATES[self.update][0](A, self.step))]
        if guard is not None:
            body.append(guard(A, T.const(self.bound, 4)))
        if self.b_update == "keep":
            body.append(T.eq(B1, B))
        elif self.b_update == "inc":
            body.append(T.eq(B1, T.add(B, T.const(1, 4))))
        step = Clause(T.conj(body), Instance("inv", {A: A1, B: B1}), [Instance("inv")], "step")
        return [init, step]


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(1000))
def test_invariant_is_inductive_and_covers_reachable_states(seed, solver, sessions):
    system = RandomSystem(seed)
    template = interval_template([A, B])
    clauses = system.clauses()
    value = solver.solve({"inv": template}, clauses)["inv"]
    with sessions() as session:
        for clause in clauses:
            premises = [concretize(template, value, p.mapping) for p in clause.premises]
            head = concretize(template, value, clause.head.mapping)
            assert session.check([clause.body, T.not_(head)] + premises) is None, clause.label
    formula = concretize(template, value)
    assert all(evaluate(formula, {"a": a, "b": b}) for a, b in system.reachable())


def random_loop(seed: int) -> str:
    rng = random.Random(seed)
    op = rng.choice(["<", "<=", "!=", ">", ">="])
    update = rng.choice(["+=", "-=", "^=", "|="])
    step = rng.choice(["1", "2", "3", "5", "a", "a + 1"])
    extra = f" if (x > {rng.randrange(16)}) y = y + 1;" if rng.random() < 0.5 else ""
    return (f"void p(unsigned a) {{ unsigned x = {rng.randrange(16)}; unsigned y = 0; "
            f"while (x {op} {rng.randrange(16)}) {{ x {update} {step};{extra} }} }}")


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(200))
def test_found_rankings_are_valid_and_never_refuted(seed, sessions):
    program = parse(random_loop(seed), widths={"int": 4})
    ts = encode(program.procedures[program.entry], program)
    ranking = comp_term_arg(ts, T.TRUE, T.TRUE, SynthesisBounds(), sessions)
    if ranking.top:
        return
    with sessions() as session:
        assert session.check([forward_body(ts), T.not_(ranking.condition(ts))]) is None
    assert not oracle(program).contradicts(TermStatus.TERMINATING)
