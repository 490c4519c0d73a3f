import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mufusion.generators import random_game
from mufusion.paritygame import (
    EXISTS,
    SAMPLE_PG,
    FORALL,
    GameError,
    ParityGame,
    sample_game,
    is_acyclic,
    is_tree_like,
    read_pg,
    solve,
    unfold,
    winning_positions,
    write_pg,
)
from strategies import games, tree_games


def play(g: ParityGame, start: int, choice: dict) -> int:
    """Winner of the play from `start` when every vertex follows `choice`
    (a dict vertex -> successor; absent for dead ends)."""
    seen: dict[int, int] = {}
    path = []
    v = start
    while v not in seen:
        if v not in choice:
            return 1 - g.owner(v)
        seen[v] = len(path)
        path.append(v)
        v = choice[v]
    cycle = path[seen[v]:]
    return int(max(g.priority[u] for u in cycle) % 2)


def strategies_of(g: ParityGame, player: int):
    mine = [v for v in g.vertices if g.owner(v) == player and g.successors(v)]
    for picks in itertools.product(*(g.successors(v) for v in mine)):
        yield dict(zip(mine, picks))


def brute_force(g: ParityGame) -> frozenset[int]:
    """Vertices from which some memoryless existential strategy beats every
    memoryless universal one."""
    taus = list(strategies_of(g, FORALL))
    won = set()
    for sigma in strategies_of(g, EXISTS):
        for v in g.vertices:
            if v in won:
                continue
            if all(play(g, v, {**sigma, **tau}) == EXISTS for tau in taus):
                won.add(v)
    return frozenset(won)


def loop(owner, prio):
    return ParityGame.build({0: owner}, {0: prio}, [(0, 0)])


# ----------------------------------------------------------------- examples


def test_solve_examples():
    assert solve(loop(EXISTS, 0)).win_exists == {0}
    assert solve(loop(EXISTS, 1)).win_forall == {0}
    stuck = ParityGame.build({0: EXISTS}, {0: 0}, [])
    assert solve(stuck).win_forall == {0}


def test_sample_game_winning_positions():
    # e0 can move to the universal vertex a0, where the universal player is
    # stuck; e1 and e8 are stuck existential vertices
    g = sample_game()
    assert winning_positions(g) == {0, 2}
    assert brute_force(g) == {0, 2}


def test_all_forall_no_edges():
    g = ParityGame.build({v: FORALL for v in range(3)}, {v: v for v in range(3)}, [])
    assert winning_positions(g) == {0, 1, 2}


def test_even_loop_basin():
    # 0 (exists) -> 1 (forall) -> 2 (exists, even self-loop); 0 may also go to
    # an odd loop at 3
    g = ParityGame.build(
        {0: EXISTS, 1: FORALL, 2: EXISTS, 3: EXISTS},
        {0: 1, 1: 1, 2: 2, 3: 3},
        [(0, 1), (0, 3), (1, 2), (2, 2), (3, 3)],
    )
    s = solve(g)
    assert s.win_exists == {0, 1, 2}
    assert s.strategy_exists[0] == 1


def test_winning_positions_pointwise():
    rng = random.Random(11)
    for _ in range(30):
        g = random_game(rng, 6, 3)
        w = winning_positions(g)
        for v in g.vertices:
            assert (v in winning_positions(g.with_initial(v))) == (v in w)


@given(games(max_vertices=5, max_priority=3))
@settings(max_examples=300, deadline=None)
def test_solver_matches_brute_force(g):
    s = solve(g)
    assert s.win_exists | s.win_forall == set(g.vertices)
    assert not s.win_exists & s.win_forall
    assert s.win_exists == brute_force(g)


def _check_strategy(g, s, player, rng, rounds=200):
    win = s.win_exists if player == EXISTS else s.win_forall
    strat = s.strategy_exists if player == EXISTS else s.strategy_forall
    for v in win:
        if g.owner(v) == player:
            assert v in strat and strat[v] in g.successors(v) and strat[v] in win
    other = [v for v in g.vertices if g.owner(v) != player and g.successors(v)]
    for _ in range(rounds):
        counter = {v: rng.choice(g.successors(v)) for v in other}
        for v in win:
            assert play(g, v, {**counter, **strat}) == player


@given(games(max_vertices=6, max_priority=4), st.randoms(use_true_random=False))
@settings(max_examples=100, deadline=None)
def test_strategies_are_winning(g, rnd):
    s = solve(g)
    _check_strategy(g, s, EXISTS, rnd, 50)
    _check_strategy(g, s, FORALL, rnd, 50)


# ------------------------------------------------------------------ unfold


def test_unfold_examples():
    g = sample_game()
    u = unfold(g, 4)
    assert len(u) == 4 and is_tree_like(u) and "truncated" not in u.name
    assert sorted(u.priority.values()) == sorted(g.priority.values())
    path = unfold(loop(EXISTS, 0), 3)
    assert len(path) == 4 and len(path.edges) == 3 and "truncated" in path.name
    zero = unfold(g, 0)
    assert len(zero) == 1 and not zero.edges


@given(games(max_vertices=5, max_priority=3))
@settings(max_examples=100, deadline=None)
def test_unfold_preserves_winner_on_acyclic_games(g):
    if not is_acyclic(g):
        return
    u = unfold(g, len(g))
    assert is_tree_like(u)
    assert (0 in winning_positions(u)) == (g.initial in winning_positions(g))


def test_shape_predicates():
    assert is_tree_like(sample_game())
    assert not is_acyclic(loop(EXISTS, 0))
    diamond = ParityGame.build({v: EXISTS for v in range(4)}, {v: 0 for v in range(4)},
                               [(0, 1), (0, 2), (1, 3), (2, 3)])
    assert is_acyclic(diamond) and not is_tree_like(diamond)


# ---------------------------------------------------------------- PGSolver


def test_read_sample_game():
    g = read_pg(SAMPLE_PG)
    assert g == sample_game()
    assert g.vertices_exists == {0, 1, 3} and g.vertices_forall == {2}
    assert g.priority == {0: 0, 1: 1, 2: 0, 3: 8}
    assert g.successors(0) == [1, 2, 3] and g.initial == 0
    assert write_pg(g) == SAMPLE_PG


def test_read_pg_start_line():
    g = read_pg('parity 1;\nstart 1;\n0 0 0 1 "a";\n1 1 1 0 "b";\n')
    assert g.initial == 1
    assert read_pg(write_pg(g)) == g


@pytest.mark.parametrize("text", [
    'parity 1;\n0 0 0 99 "x";\n',
    'parity 0;\n0 0 0 "x";\n0 0 0 "x";\n',
    'parity 0;\n0 0 2 "x";\n',
    'parit 0;\n0 0 0 "x";\n',
    'parity 0;\n0 0 0 "x"\n',
    'parity 0;\n1 0 0 "x";\n',
    '',
])
def test_read_pg_errors(text):
    with pytest.raises(GameError):
        read_pg(text)


def test_game_validation():
    with pytest.raises(GameError):
        ParityGame(frozenset({0}), frozenset({0}), 0, frozenset(), {0: 0})
    with pytest.raises(GameError):
        ParityGame.build({0: 0}, {0: 0}, [(0, 1)])
    with pytest.raises(GameError):
        ParityGame.build({0: 0}, {0: -1}, [])


@given(st.one_of(games(max_vertices=7, max_priority=5), tree_games()))
def test_pg_round_trip(g):
    text = write_pg(g)
    h = read_pg(text)
    assert h == g.__class__.build(
        {v: g.owner(v) for v in g.vertices}, g.priority, g.edges, g.initial, h.labels
    )
    assert write_pg(h) == text
