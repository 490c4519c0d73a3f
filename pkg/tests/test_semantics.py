import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mufusion.formula import (
    TOP,
    And,
    Bottom,
    Box,
    Dia,
    Mu,
    Nu,
    Or,
    Prop,
    Top,
    Var,
    dual,
    parse,
    substitute_var,
)
from mufusion.kripke import KripkeModel, PointedModel, augment
from mufusion.semantics import EvaluationError, evaluate, holds
from strategies import formulas, models


def naive(m: KripkeModel, f, env=None):
    """Set-based clause-by-clause evaluation with plain Kleene iteration."""
    env = dict(env or {})
    W = frozenset(m.worlds)

    def go(g, env):
        if isinstance(g, Prop):
            s = m.val(g.name)
            return s if g.positive else W - s
        if isinstance(g, Top):
            return W
        if isinstance(g, Bottom):
            return frozenset()
        if isinstance(g, Var):
            return env[g.name] if g.name in env else m.val(g.name)
        if isinstance(g, And):
            return go(g.left, env) & go(g.right, env)
        if isinstance(g, Or):
            return go(g.left, env) | go(g.right, env)
        if isinstance(g, (Dia, Box)):
            body = go(g.body, env)
            rel = m.relations[g.index]
            if isinstance(g, Dia):
                return frozenset(w for w in W if any((w, u) in rel for u in body))
            return frozenset(w for w in W if all(u in body for (x, u) in rel if x == w))
        cur = frozenset() if isinstance(g, Mu) else W
        while True:
            nxt = go(g.body, {**env, g.var: cur})
            if nxt == cur:
                return cur
            cur = nxt

    return go(f, env)


def chain():
    return KripkeModel.build([0], ["w", "u"], {0: [("w", "u")]}, {"p": ["u"]})


def test_examples():
    m = chain()
    assert evaluate(m, parse("<0> p")) == {"w"}
    assert evaluate(m, parse("mu X. p | <0> X")) == {"w", "u"}
    assert evaluate(m, parse("nu X. <0> X")) == frozenset()


def test_holds_examples():
    m = chain()
    assert holds(PointedModel(m, "u"), parse("p"))
    assert holds(PointedModel(m, "w"), TOP)
    assert not holds(PointedModel(m, "w"), parse("mu X. X"))
    assert not holds(PointedModel(m, "u"), parse("mu X. X"))


def test_errors():
    m = chain()
    with pytest.raises(EvaluationError):
        evaluate(m, Var("X"))
    with pytest.raises(EvaluationError):
        evaluate(m, Dia(3, TOP))
    with pytest.raises(EvaluationError):
        evaluate(m, Var("X"), {"X": {"ghost"}})


def test_augmented_model_reads_variables():
    m = augment(chain(), "X", ["u"])
    assert evaluate(m, parse("<0> X")) == {"w"}
    assert evaluate(chain(), parse("<0> X"), {"X": {"u"}}) == {"w"}


@given(models(max_worlds=4), formulas(depth=5))
@settings(max_examples=300)
def test_matches_naive_evaluator(m, f):
    assert evaluate(m, f) == naive(m, f)


@given(models(max_worlds=4), formulas(depth=4, allow_free=("Z",)), st.data())
@settings(max_examples=200)
def test_monotone_in_free_variable(m, f, data):
    ws = sorted(m.worlds)
    b = frozenset(data.draw(st.lists(st.sampled_from(ws), unique=True)))
    a = frozenset(w for w in b if data.draw(st.booleans()))
    assert evaluate(m, f, {"Z": a}) <= evaluate(m, f, {"Z": b})


@given(models(max_worlds=4), formulas(depth=4, allow_free=("Z",)), st.booleans())
@settings(max_examples=200)
def test_fixpoint_property(m, body, least):
    fix = (Mu if least else Nu)("Z", body)
    val = evaluate(m, fix)
    assert evaluate(m, body, {"Z": val}) == val
    # unfolding the binder once does not change the denotation
    assert evaluate(m, substitute_var(body, "Z", fix)) == val


@given(models(max_worlds=4), formulas(depth=4, allow_free=("Z",)))
@settings(max_examples=200)
def test_duality(m, body):
    lhs = evaluate(m, Mu("Z", body))
    # the dual body uses Z positively as the complement variable
    rhs = evaluate(m, Nu("Z", dual(body)))
    assert lhs == m.worlds - rhs


@given(models(max_worlds=4), formulas(depth=5))
@settings(max_examples=200)
def test_closed_dual_is_negation(m, f):
    assert evaluate(m, dual(f)) == m.worlds - evaluate(m, f)
