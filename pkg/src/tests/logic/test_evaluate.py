import pytest

from bitterm.errors import UnboundVariable
from bitterm.logic import terms as T
from bitterm.logic.evaluate import evaluate, extend_width, inner_product_width, linear_term


def test_unsigned_addition_wraps():
    x = T.var("x", 8)
    assert evaluate(T.add(x, T.const(1, 8)), {"x": 255}) == 0


def test_signed_addition_wraps_twos_complement():
    x = T.var("x", 8, signed=True)
    assert evaluate(T.add(x, T.const(1, 8, True)), {"x": 127}) == -128


def test_contradiction_is_false_everywhere():
    b = T.bool_var("b")
    f = T.bvand(b, T.bvnot(b))
    assert all(evaluate(f, {"b": v}) is False for v in (0, 1))


def test_negative_values_are_accepted_in_valuations():
    x = T.var("x", 8, signed=True)
    assert evaluate(x, {"x": -3}) == -3
    assert evaluate(T.cast(x, 8, False), {"x": -3}) == 253


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        evaluate(T.var("x", 8), {})


@pytest.mark.parametrize(
    "build, expected",
    [
        (lambda x: T.shr(x, T.const(1, 8, True)), -64),
        (lambda x: T.shr(T.cast(x, 8, False), T.const(1, 8)), 64),
        (lambda x: T.shl(x, T.const(9, 8, True)), 0),
        (lambda x: T.cast(x, 16, True), -128),
        (lambda x: T.cast(T.cast(x, 8, False), 16, False), 128),
        (lambda x: T.lt(x, T.const(0, 8, True)), True),
        (lambda x: T.lt(T.cast(x, 8, False), T.const(0, 8)), False),
    ],
)
def test_signedness_sensitive_operators(build, expected):
    x = T.var("x", 8, signed=True)
    assert evaluate(build(x), {"x": -128}) == expected


def test_width_extension_exposes_template_overflow():
    x, x1 = T.var("x", 8, True), T.var("x'", 8, True)
    sigma = {"x": 127, "x'": -128}
    difference = T.sub(x, x1)
    assert evaluate(difference, sigma) == -1
    assert evaluate(extend_width(difference, 1), sigma) == 255

    decrease = T.gt(T.sub(T.neg(x), T.neg(x1)), T.const(0, 8, True))
    assert evaluate(decrease, sigma) is True
    assert evaluate(extend_width(decrease, 1), sigma) is False


def test_width_extension_leaves_constants_alone():
    c = T.add(T.const(3, 8), T.const(4, 8))
    assert evaluate(extend_width(c, 1), {}) == 7


def test_width_extension_of_unsigned_is_exact_for_unit_coefficients():
    x = T.var("x", 4)
    for coefficient in (-1, 0, 1):
        t = T.mul(T.const(coefficient, 4, True), x)
        extended = extend_width(t, 1)
        assert extended.width == 5
        for value in range(16):
            assert evaluate(extended, {"x": value}) == coefficient * value


def test_linear_term_is_exact_at_inner_product_width():
    x, y = T.var("x", 4), T.var("y", 4, True)
    coefficients = [7, -5]
    width = inner_product_width([4, 4], coefficients)
    t = linear_term(list(zip(coefficients, [x, y])), width)
    for vx in range(16):
        for vy in range(-8, 8):
            assert evaluate(t, {"x": vx, "y": vy}) == 7 * vx - 5 * vy
