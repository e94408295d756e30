import copy
import pickle

from bitterm.logic import terms as T


class TestConstruction:
    def test_terms_are_hash_consed(self):
        x, y = T.var("x", 8), T.var("y", 8)
        assert T.var("x", 8) is x
        assert T.add(x, y) is T.add(x, y)
        assert T.add(x, y) is not T.add(y, x)

    def test_copies_and_pickles_stay_canonical(self):
        f = T.and_(T.lt(T.var("x", 8), T.const(3, 8)), T.bool_var("b"))
        assert copy.deepcopy(f) is f
        assert pickle.loads(pickle.dumps(f)) is f
        assert pickle.loads(pickle.dumps(T.TRUE)) is T.TRUE

    def test_same_name_different_width_is_a_different_term(self):
        assert T.var("x", 8) is not T.var("x", 16)

    def test_constant_folding_wraps(self):
        assert T.add(T.const(255, 8), T.const(1, 8)).value == 0
        assert T.mul(T.const(16, 8), T.const(16, 8)).value == 0
        assert T.neg(T.const(1, 4)).value == 15

    def test_boolean_simplifications(self):
        b = T.bool_var("b")
        assert T.and_(b, T.not_(b)) is T.FALSE
        assert T.or_(b, T.not_(b)) is T.TRUE
        assert T.not_(T.not_(b)) is b
        assert T.implies(T.FALSE, b) is T.TRUE
        assert T.ite(b, T.TRUE, T.FALSE) is b

    def test_neutral_elements(self):
        x = T.var("x", 8)
        zero, one = T.const(0, 8), T.const(1, 8)
        assert T.add(x, zero) is x
        assert T.mul(x, one) is x
        assert T.mul(x, zero).value == 0
        assert T.sub(x, x).value == 0
        assert T.eq(x, x) is T.TRUE
        assert T.lt(x, x) is T.FALSE

    def test_truncating_a_widening_cast(self):
        x = T.var("x", 8)
        wide = T.cast(x, 32, False)
        assert T.cast(wide, 8, False) is x
        assert T.cast(wide, 4, True) is T.cast(x, 4, True)

    def test_signed_value(self):
        assert T.const(255, 8, signed=True).signed_value == -1
        assert T.const(255, 8).signed_value == 255


class TestTraversal:
    def test_free_vars(self):
        x, y = T.var("x", 8), T.var("y", 8)
        f = T.lt(T.add(x, T.const(3, 8)), y)
        assert T.free_vars(f) == {x, y}
        assert T.free_var_names(T.TRUE) == frozenset()

    def test_substitute_renames_and_simplifies(self):
        x, y = T.var("x", 8), T.var("y", 8)
        f = T.add(x, y)
        assert T.substitute(f, {x: y}) is T.add(y, y)
        assert T.substitute(f, {x: T.const(0, 8)}) is y

    def test_postorder_visits_shared_nodes_once(self):
        x = T.var("x", 8)
        shared = T.add(x, x)
        f = T.mul(shared, shared)
        nodes = list(T.postorder([f]))
        assert nodes.count(shared) == 1
        assert nodes[-1] is f
        assert nodes.index(x) < nodes.index(shared)

    def test_deep_terms_do_not_hit_the_recursion_limit(self):
        x = T.var("x", 16)
        t = x
        for i in range(5000):
            t = T.add(t, T.var(f"v{i}", 16))
        assert len(T.free_vars(t)) == 5001
