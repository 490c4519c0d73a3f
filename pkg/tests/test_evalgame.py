import pytest
from hypothesis import given, settings

from mufusion.evalgame import EvalGameError, build_eval_game, check_via_game
from mufusion.formula import TOP, Mu, Nu, Var, parse, rename_apart, subformulas
from mufusion.kripke import KripkeModel, PointedModel
from mufusion.paritygame import EXISTS, FORALL, read_pg, solve, write_pg
from mufusion.semantics import holds
from strategies import formulas, pointed_models


def one_world(p=True, loop=False):
    m = KripkeModel.build([0], ["w"], {0: [("w", "w")] if loop else []}, {"p": ["w"] if p else []})
    return PointedModel(m, "w")


def test_true_literal_is_a_stuck_refuter_vertex():
    eg = build_eval_game(one_world(), parse("p"))
    g = eg.game
    assert len(g) == 1 and g.owner(0) == FORALL and not g.edges
    assert solve(g).win_exists == {0}


def test_least_fixpoint_loop_is_lost():
    eg = build_eval_game(one_world(loop=True), parse("mu X. <0> X"))
    g = eg.game
    assert g.priority[g.initial] == 1
    assert g.initial in solve(g).win_forall


def test_greatest_fixpoint_loop_is_won():
    eg = build_eval_game(one_world(loop=True), parse("nu X. <0> X"))
    assert eg.game.initial in solve(eg.game).win_exists


def test_check_via_game_examples():
    assert check_via_game(one_world(), TOP)
    assert not check_via_game(one_world(), parse("<0> p"))
    assert check_via_game(one_world(), parse("[0] false"))


def test_errors():
    with pytest.raises(EvalGameError):
        build_eval_game(one_world(), Var("X"))
    with pytest.raises(EvalGameError):
        build_eval_game(one_world(), parse("<4> p"))


def test_positions_and_labels():
    pm = one_world(loop=True)
    eg = build_eval_game(pm, parse("nu X. p & <0> X"))
    for v, pos in eg.positions.items():
        assert eg.game.labels[v] == f"{pos.subformula}@{pos.world}"
        assert eg.vertex_of(eg.subformulas[pos.subformula], pos.world) == v
    assert eg.positions[eg.game.initial].subformula == 0


def test_pgsolver_round_trip():
    eg = build_eval_game(one_world(loop=True), parse("mu X. p | <0> X"))
    text = write_pg(eg.game)
    assert write_pg(read_pg(text)) == text


@given(pointed_models(max_worlds=4), formulas(depth=5))
@settings(max_examples=400, deadline=None)
def test_game_route_matches_denotation(pm, f):
    assert check_via_game(pm, f) == holds(pm, f)


@given(pointed_models(max_worlds=4), formulas(depth=5))
@settings(max_examples=200, deadline=None)
def test_priority_discipline_and_size(pm, f):
    eg = build_eval_game(pm, f)
    g = eg.game
    for v, pos in eg.positions.items():
        sub = eg.subformulas[pos.subformula]
        pr = g.priority[v]
        if pr % 2 == 1:
            assert isinstance(sub, Mu)
        elif pr > 0:
            assert isinstance(sub, Nu)
        if not isinstance(sub, (Mu, Nu)):
            assert pr == 0
    n_sub = len(set(subformulas(rename_apart(f))))
    assert len(g) <= n_sub * len(pm.model.worlds)


@given(pointed_models(max_worlds=4), formulas(depth=5))
@settings(max_examples=200, deadline=None)
def test_ownership_follows_connectives(pm, f):
    eg = build_eval_game(pm, f)
    g = eg.game
    for v, pos in eg.positions.items():
        sub = type(eg.subformulas[pos.subformula]).__name__
        if sub in ("Or", "Dia", "Mu", "Bottom"):
            assert g.owner(v) == EXISTS
        elif sub in ("And", "Box", "Nu", "Top"):
            assert g.owner(v) == FORALL
