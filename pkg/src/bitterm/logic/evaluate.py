import math
from typing import Dict, Mapping, Sequence, Tuple, Union

from bitterm.errors import UnboundVariable
from bitterm.logic import terms as T
from bitterm.logic.terms import Term

Valuation = Mapping[str, int]


def evaluate_bits(t: Term, valuation: Valuation) -> int:
    """Evaluate ``t`` and return its raw bit pattern."""
    done: Dict[int, int] = {}
    for node in T.postorder([t]):
        if node.is_const:
            value = node.value
        elif node.is_var:
            if node.name not in valuation:
                raise UnboundVariable(node.name)
            value = valuation[node.name] & T.mask(node.width)
        else:
            value = T.compute(node.op, node.width, node.args, [done[id(a)] for a in node.args])
        done[id(node)] = value
    return done[id(t)]


def evaluate(t: Term, valuation: Valuation) -> Union[int, bool]:
    """
    Evaluate a term under a valuation of its variables.

    Parameters:
    - t (Term): the term to evaluate.
    - valuation (Mapping[str, int]): value per variable name; values are
      reduced modulo the variable's width, so signed and unsigned spellings
      of the same pattern are both accepted.

    Returns:
    bool for Boolean terms, otherwise the integer value read with the term's
    signedness (two's complement for signed terms).
    """
    bits = evaluate_bits(t, valuation)
    if t.width == 1:
        return bool(bits)
    return T.to_signed(bits, t.width) if t.signed else bits


def _value_preserving(node: Term) -> bool:
    src = node.args[0]
    if node.width < src.width:
        return False
    if node.width == src.width:
        return node.signed == src.signed
    return not (src.signed and not node.signed)


def extension_width(t: Term, extra: int) -> int:
    widths = [n.width for n in T.postorder([t]) if n.is_var and n.width > 1]
    return max(widths or [t.width]) + extra


def extend_width(t: Term, extra: int = 1) -> Term:
    """
    Re-type a linear template expression at a wider signed width.

    Every program variable is cast to a signed bit-vector ``extra`` bits wider
    than the widest variable of ``t``. Constants keep their value as read with
    their own signedness, value-preserving casts disappear, and comparisons are
    evaluated at the new width, so template arithmetic is exact as long as the
    bound on the magnitude fits.
    """
    width = extension_width(t, extra)
    done: Dict[int, Term] = {}
    for node in T.postorder([t]):
        args = [done[id(a)] for a in node.args]
        if node.is_var:
            new = node if node.width == 1 else T.cast(node, width, True)
        elif node.is_const:
            new = node if node.width == 1 else T.const(node.signed_value, width, True)
        elif node.op == "cast":
            if node.width == 1:
                new = node
            elif node.args[0].width == 1:
                new = T.cast(node.args[0], width, True)
            elif _value_preserving(node):
                new = args[0]
            else:
                new = T.cast(node, width, True)
        elif node.width == 1 or node.op in ("add", "sub", "mul", "neg", "ite"):
            new = T.rebuild(node, args)
        else:
            # bitwise and shift results are computed at their own width
            new = T.cast(node, width, True)
        done[id(node)] = new
    return done[id(t)]


def inner_product_width(var_widths: Sequence[int], coefficients: Sequence[int]) -> int:
    """Signed width at which ``sum(c * x)`` over the given variables cannot overflow."""
    total = sum(abs(c) for c in coefficients) or 1
    return max(var_widths or [1]) + max(1, math.ceil(math.log2(total + 1))) + 1


def linear_term(pairs: Sequence[Tuple[int, Term]], width: int) -> Term:
    """``sum(c * x)`` as a signed ``width``-bit term; operands are widened first."""
    acc = T.const(0, width, True)
    for coefficient, x in pairs:
        if coefficient == 0:
            continue
        wide = T.cast(x, width, True)
        if coefficient == 1:
            acc = T.add(acc, wide)
        elif coefficient == -1:
            acc = T.sub(acc, wide)
        else:
            acc = T.add(acc, T.mul(T.const(coefficient, width, True), wide))
    return acc
