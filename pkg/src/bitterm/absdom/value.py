import enum
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from bitterm.absdom.template import Template
from bitterm.errors import TemplateError
from bitterm.logic import terms as T
from bitterm.logic.solver import SolverSession
from bitterm.logic.terms import Term


class Bound(enum.Enum):
    BOTTOM = "bottom"
    TOP = "top"

    def __repr__(self) -> str:
        return "⊥" if self is Bound.BOTTOM else "⊤"


RowBound = Union[int, Bound]


def _rank(b: RowBound) -> Tuple[int, int]:
    if b is Bound.BOTTOM:
        return (0, 0)
    if b is Bound.TOP:
        return (2, 0)
    return (1, b)


@dataclass(frozen=True)
class AbstractValue:
    """One bound per template row; ``Bound.BOTTOM`` and ``Bound.TOP`` mark empty and unconstrained rows."""

    bounds: Tuple[RowBound, ...]

    @classmethod
    def bottom(cls, size: int) -> "AbstractValue":
        return cls((Bound.BOTTOM,) * size)

    @classmethod
    def top(cls, size: int) -> "AbstractValue":
        return cls((Bound.TOP,) * size)

    def __len__(self) -> int:
        return len(self.bounds)

    @property
    def is_bottom(self) -> bool:
        return all(b is Bound.BOTTOM for b in self.bounds)

    @property
    def is_top(self) -> bool:
        return all(b is Bound.TOP for b in self.bounds)

    def replace(self, index: int, bound: RowBound) -> "AbstractValue":
        bounds = list(self.bounds)
        bounds[index] = bound
        return AbstractValue(tuple(bounds))

    def leq(self, other: "AbstractValue") -> bool:
        _check_dims(self, other)
        return all(_rank(a) <= _rank(b) for a, b in zip(self.bounds, other.bounds))

    def __repr__(self) -> str:
        return "(" + ", ".join(repr(b) if isinstance(b, Bound) else str(b) for b in self.bounds) + ")"


def _check_dims(d1: AbstractValue, d2: AbstractValue) -> None:
    if len(d1) != len(d2):
        raise TemplateError(f"abstract values of different dimension: {len(d1)} vs {len(d2)}")


def concretize(template: Template, value: AbstractValue, mapping: Optional[Mapping[Term, Term]] = None) -> Term:
    """
    Formula denoted by ``value`` for the template, instantiated through ``mapping``.

    A bottom row contributes the negation of its guard, a top row nothing,
    and any other row ``G ==> a.x <= d`` at its extended width.
    """
    if len(value) != len(template):
        raise TemplateError(f"abstract value has {len(value)} bounds for {len(template)} rows")
    conjuncts: List[Term] = []
    for i, bound in enumerate(value.bounds):
        if bound is Bound.TOP:
            continue
        guard = template.row_guard(i, mapping)
        if bound is Bound.BOTTOM:
            conjuncts.append(T.not_(guard))
            continue
        lo, hi = template.row_range(i)
        if bound >= hi:
            continue
        if bound < lo:
            conjuncts.append(T.not_(guard))
            continue
        width = template.row_width(i)
        row = T.le(template.row_term(i, mapping), T.const(bound, width, True))
        conjuncts.append(T.implies(guard, row))
    return T.conj(conjuncts)


def is_subsumed(template: Template, d1: AbstractValue, d2: AbstractValue, session: SolverSession) -> bool:
    """Whether ``concretize(d1)`` implies ``concretize(d2)``."""
    _check_dims(d1, d2)
    if d1.leq(d2):
        return True
    return session.check([concretize(template, d1), T.not_(concretize(template, d2))]) is None


def join(d1: AbstractValue, d2: AbstractValue) -> AbstractValue:
    """Pointwise least upper bound."""
    _check_dims(d1, d2)
    return AbstractValue(tuple(a if _rank(a) >= _rank(b) else b for a, b in zip(d1.bounds, d2.bounds)))


def clip(template: Template, value: AbstractValue) -> AbstractValue:
    """Replace bounds at or beyond a row's static maximum by ``Bound.TOP``."""
    bounds = []
    for i, b in enumerate(value.bounds):
        if isinstance(b, int) and b >= template.row_range(i)[1]:
            b = Bound.TOP
        bounds.append(b)
    return AbstractValue(tuple(bounds))


def describe(template: Template, value: AbstractValue, names: Optional[Dict[str, str]] = None) -> List[str]:
    """Readable constraints, one per non-trivial row."""
    names = names or {}
    lines = []
    for i, bound in enumerate(value.bounds):
        if bound is Bound.TOP:
            continue
        row = template.rows[i]
        terms = []
        for c, x in zip(row.coefficients, template.variables):
            if not c:
                continue
            name = names.get(x.name, x.name)
            terms.append(name if c == 1 else f"-{name}" if c == -1 else f"{c}*{name}")
        lhs = " + ".join(terms).replace("+ -", "- ") or "0"
        guard = "" if row.guard is T.TRUE else f"{row.guard!r} ==> "
        lines.append(f"{guard}{lhs} <= {'⊥' if bound is Bound.BOTTOM else bound}")
    return lines


def _violation(template: Template, index: int, bound: int, names: Mapping[str, str]) -> str:
    terms = [(c, names.get(x.name, x.name)) for c, x in zip(template.rows[index].coefficients, template.variables) if c]
    if len(terms) == 1 and terms[0][0] in (1, -1):
        c, name = terms[0]
        return f"{name} > {bound}" if c == 1 else f"{name} < {-bound}"
    # widened so the sum reads as in the row's own arithmetic
    parts = [f"(long){name}" if c == 1 else f"-(long){name}" if c == -1 else f"{c} * (long){name}" for c, name in terms]
    return f"{' + '.join(parts)} > {bound}"


def describe_negation(template: Template, values: Sequence[AbstractValue],
                      names: Optional[Mapping[str, str]] = None) -> str:
    """
    Source-language text of the disjunction of the negated values.

    Only unguarded rows can be rendered. Returns ``"true"`` or ``"false"``
    for the trivial cases, otherwise a ``||`` chain of strict row violations.
    """
    names = names or {}
    parts: List[str] = []
    for value in values:
        if len(value) != len(template):
            raise TemplateError(f"abstract value has {len(value)} bounds for {len(template)} rows")
        for i, bound in enumerate(value.bounds):
            if bound is Bound.TOP:
                continue
            if template.rows[i].guard is not T.TRUE:
                raise TemplateError(f"cannot render guarded row {template.rows[i].label!r} of {template.name}")
            lo, hi = template.row_range(i)
            if bound is Bound.BOTTOM or bound < lo:
                return "true"
            if bound < hi:
                parts.append(_violation(template, i, bound, names))
    return " || ".join(dict.fromkeys(parts)) or "false"
