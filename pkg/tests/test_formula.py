import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mufusion.encoder import wn
from mufusion.formula import (
    BOTTOM,
    TOP,
    And,
    Box,
    Dia,
    FormulaSyntaxError,
    Mu,
    Nu,
    Or,
    Prop,
    Var,
    binder_of,
    bound_vars,
    classify,
    fixpoint_priorities,
    free_vars,
    is_rename_apart,
    parse,
    priority_of,
    rename_apart,
    subformulas,
    to_text,
)
from strategies import formulas

p, q = Prop("p"), Prop("q")


# ------------------------------------------------------------------ parser


def test_parse_mu_reachability():
    assert parse("mu X. (p | <0> X)") == Mu("X", Or(p, Dia(0, Var("X"))))


def test_parse_implication_desugars_by_de_morgan():
    got = parse("(pre0 & bd) -> [0] q")
    assert got == Or(Or(Prop("pre0", False), Prop("bd", False)), Box(0, q))


def test_parse_rejects_negated_variable():
    with pytest.raises(FormulaSyntaxError):
        parse("mu X. ~X")


def test_parse_rejects_modal_antecedent():
    with pytest.raises(FormulaSyntaxError):
        parse("<0> p -> q")


def test_parse_error_carries_position():
    with pytest.raises(FormulaSyntaxError) as exc:
        parse("p & & q")
    assert exc.value.pos == 4


@pytest.mark.parametrize("text", ["", "p |", "mu . p", "<x> p", "(p", "mu X p"])
def test_parse_malformed(text):
    with pytest.raises(FormulaSyntaxError):
        parse(text)


def test_precedence_and_binder_scope():
    assert parse("p | q & <1> p") == Or(p, And(q, Dia(1, p)))
    assert parse("nu X. p & X | q") == Nu("X", Or(And(p, Var("X")), q))
    assert parse("(nu X. X) & q") == And(Nu("X", Var("X")), q)
    assert parse("true | false") == Or(TOP, BOTTOM)


def test_marker_props_parse_as_propositions():
    assert parse("@pre0 & ~@bd") == And(Prop("@pre0"), Prop("@bd", False))


@given(formulas(depth=5, allow_free=("Z",)))
@settings(max_examples=300)
def test_text_round_trip(f):
    assert parse(to_text(f)) == f


# --------------------------------------------------------------- renaming


def test_rename_apart_forces_distinct_binders():
    f = Mu("X", Or(Var("X"), Mu("X", Var("X"))))
    assert rename_apart(f) == Mu("X1", Or(Var("X1"), Mu("X2", Var("X2"))))


def test_rename_apart_keeps_fixpoint_free_formula():
    f = And(p, Dia(0, q))
    assert rename_apart(f) is f


def test_rename_apart_keeps_wn():
    f = wn(1, 1)
    assert rename_apart(f) == f


def test_rename_apart_leaves_free_variables():
    f = And(Var("X"), Nu("X", Box(0, Var("X"))))
    g = rename_apart(f)
    assert free_vars(g) == {"X"} and is_rename_apart(g)


@given(formulas(depth=5))
def test_rename_apart_is_idempotent(f):
    g = rename_apart(And(f, f))
    assert is_rename_apart(g)
    assert rename_apart(g) == g


def test_binder_of():
    f = Mu("X", Dia(0, Var("X")))
    assert binder_of(f, "X") is f
    g = Nu("Y", Mu("X", Or(Var("X"), Var("Y"))))
    assert binder_of(g, "Y") is g
    with pytest.raises(KeyError):
        binder_of(g, "Z")


# --------------------------------------------------------------- hierarchy

# Hand-computed against the closure definition (Sigma_0 = Pi_0 = fixpoint
# free; Sigma_{n+1} closes Sigma_n and Pi_n under the boolean and modal
# operators, mu, and substitution; dually for Pi_{n+1}).
CURATED = [
    ("p", (0, 0)),
    ("<0> p & [1] ~q", (0, 0)),
    ("true", (0, 0)),
    ("mu X. p | <0> X", (1, 2)),
    ("nu X. p & [0] X", (2, 1)),
    ("mu X. X", (1, 2)),
    ("mu X. mu Y. X | Y | <0> p", (1, 2)),
    ("nu X. nu Y. [0] X & [1] Y", (2, 1)),
    ("mu X. nu Y. X & Y", (2, 3)),
    ("nu Y. mu X. Y | X", (3, 2)),
    # closed inner fixpoints can be substituted in, so they do not alternate
    ("mu X. (nu Y. p & [0] Y) | <0> X", (2, 2)),
    ("mu X. <0> X & (nu Y. [1] Y)", (2, 2)),
    ("nu X. (mu Y. <0> Y | p) & [0] X", (2, 2)),
    ("nu X. mu Y. (p & <0> X) | <0> Y", (3, 2)),
    ("mu X. nu Y. (p & <0> X) | (~p & <0> Y)", (2, 3)),
    ("nu X. mu Y. nu Z. X & Y & Z", (4, 3)),
    ("mu X. nu Y. mu Z. X | Y | Z", (3, 4)),
    ("(mu X. nu Y. X & Y) & (nu Z. mu W. Z | W)", (3, 3)),
    # mu Y does not mention X but encloses a nu that does
    ("nu X. mu Y. nu Z. X & Z", (3, 2)),
    # B is bound inside mu A, so nu C cannot be lifted out of it
    ("nu X. mu A. X | mu B. A | nu C. B & C", (4, 3)),
]


@pytest.mark.parametrize("text,levels", CURATED)
def test_curated_classification(text, levels):
    assert tuple(classify(parse(text))) == levels


def test_curated_suite_is_large_enough():
    assert len(CURATED) >= 15


@pytest.mark.parametrize("n,expected", [(0, (None, 1)), (1, (2, None)), (2, (None, 3)), (3, (4, None))])
def test_wn_levels(n, expected):
    lvl = classify(wn(n, 1))
    sigma, pi = expected
    if sigma is not None:
        assert lvl.sigma_level == sigma
    if pi is not None:
        assert lvl.pi_level == pi


def test_priority_examples():
    f = parse("mu X. p | <0> X")
    assert priority_of(f, f) == 1
    g = parse("nu X. p & [0] X")
    assert priority_of(g, g) == 0
    w2 = wn(2, 1)
    assert isinstance(w2, Nu) and w2.var == "X_2"
    assert priority_of(w2, w2) == 2


def test_priority_of_needs_fixpoint():
    with pytest.raises(ValueError):
        priority_of(p, p)


def test_priority_uses_own_chain_not_enclosed_closed_parts():
    # mu X heads a chain of length 2 (mu X, nu Y); the closed nu/mu formula
    # T inside does not push X above priority 1
    f = parse("mu X. nu Y. X & <0> Y & (nu A. mu B. nu C. A | B | C)")
    assert priority_of(f, f) == 1


@given(formulas(depth=5))
@settings(max_examples=300)
def test_priority_parity_matches_binder(f):
    f = rename_apart(f)
    for g in subformulas(f):
        if isinstance(g, (Mu, Nu)):
            assert (priority_of(f, g) % 2 == 1) == isinstance(g, Mu)


@given(formulas(depth=5))
@settings(max_examples=300)
def test_levels_differ_by_at_most_one(f):
    lvl = classify(f)
    assert abs(lvl.sigma_level - lvl.pi_level) <= 1
    has_fix = any(isinstance(g, (Mu, Nu)) for g in subformulas(f))
    assert (lvl == (0, 0)) == (not has_fix)


def _swap_and_rename(f):
    if isinstance(f, (And, Or)):
        return type(f)(_swap_and_rename(f.right), _swap_and_rename(f.left))
    if isinstance(f, (Box, Dia)):
        return type(f)(f.index, _swap_and_rename(f.body))
    if isinstance(f, (Mu, Nu)):
        return type(f)("R" + f.var, _swap_and_rename(f.body))
    if isinstance(f, Var):
        return Var("R" + f.name)
    return f


@given(formulas(depth=5))
@settings(max_examples=300)
def test_classify_invariant_under_renaming_and_reordering(f):
    assert classify(_swap_and_rename(f)) == classify(f)


@given(formulas(depth=4, allow_free=("Z",)))
@settings(max_examples=300)
def test_outer_mu_raises_sigma_by_at_most_one(f):
    before = classify(f).sigma_level
    after = classify(Mu("Z", f)).sigma_level
    assert before <= after <= before + 1


def test_fixpoint_priorities_cover_every_binder():
    f = wn(3, 1)
    prios = fixpoint_priorities(f)
    assert len(prios) == len(bound_vars(f))
