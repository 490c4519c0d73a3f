"""Evaluation games for the mu-calculus and their parity-game form."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping

from .formula import (
    And,
    Bottom,
    Box,
    Dia,
    Formula,
    Mu,
    Nu,
    Or,
    Prop,
    Top,
    Var,
    fixpoint_priorities,
    free_vars,
    rename_apart,
    subformulas,
)
from .kripke import PointedModel, World
from .paritygame import EXISTS, FORALL, ParityGame, solve


class EvalGameError(ValueError):
    pass


@dataclass(frozen=True)
class EvalPosition:
    subformula: int  # index into EvalGame.subformulas
    world: World


@dataclass(frozen=True)
class EvalGame:
    game: ParityGame
    formula: Formula
    subformulas: tuple[Formula, ...]
    positions: Mapping[int, EvalPosition]  # vertex id -> position

    def vertex_of(self, sub: Formula, world: World) -> int:
        k = self.subformulas.index(sub)
        for v, pos in self.positions.items():
            if pos == EvalPosition(k, world):
                return v
        raise KeyError((sub, world))


def _index_subformulas(f: Formula) -> tuple[list[Formula], dict[int, int]]:
    """Distinct subformulas in pre-order of first occurrence, plus a map from
    node identity to index."""
    subs: list[Formula] = []
    seen: dict[Formula, int] = {}
    by_id: dict[int, int] = {}
    for g in subformulas(f):
        k = seen.get(g)
        if k is None:
            k = seen[g] = len(subs)
            subs.append(g)
        by_id[id(g)] = k
    return subs, by_id


def build_eval_game(pm: PointedModel, f: Formula) -> EvalGame:
    """Positions reachable from (f, point), with Verifier as the existential
    player. Fixpoint positions carry their binder's priority, all others 0.
    Literal and constant positions are owned by the player who loses there,
    so that player is stuck."""
    if free_vars(f):
        raise EvalGameError(f"free variables {sorted(free_vars(f))}")
    f = rename_apart(f)
    m = pm.model
    bad = {g.index for g in subformulas(f) if isinstance(g, (Box, Dia))} - set(m.signature)
    if bad:
        raise EvalGameError(f"unknown modality index {sorted(bad)}")
    subs, by_id = _index_subformulas(f)
    prio_by_id = fixpoint_priorities(f)
    prio = {by_id[k]: p for k, p in prio_by_id.items()}
    binder = {g.var: by_id[id(g)] for g in subformulas(f) if isinstance(g, (Mu, Nu))}
    kid = {}
    for g in subformulas(f):
        if isinstance(g, (And, Or)):
            kid[by_id[id(g)]] = (by_id[id(g.left)], by_id[id(g.right)])
        elif isinstance(g, (Box, Dia, Mu, Nu)):
            kid[by_id[id(g)]] = (by_id[id(g.body)],)
    succ = {
        i: {w: m.successors(i, w) for w in m.worlds} for i in m.signature
    }

    ids: dict[EvalPosition, int] = {}
    owners, priority, edges, positions = {}, {}, [], {}

    def vertex(pos: EvalPosition) -> int:
        v = ids.get(pos)
        if v is None:
            v = ids[pos] = len(ids)
            positions[v] = pos
            queue.append(pos)
        return v

    queue: deque[EvalPosition] = deque()
    vertex(EvalPosition(0, pm.point))
    while queue:
        pos = queue.popleft()
        v = ids[pos]
        g, w = subs[pos.subformula], pos.world
        k = pos.subformula
        moves: list[EvalPosition] = []
        if isinstance(g, Or):
            owner = EXISTS
            moves = [EvalPosition(c, w) for c in kid[k]]
        elif isinstance(g, And):
            owner = FORALL
            moves = [EvalPosition(c, w) for c in kid[k]]
        elif isinstance(g, (Dia, Box)):
            owner = EXISTS if isinstance(g, Dia) else FORALL
            moves = [EvalPosition(kid[k][0], u) for u in succ[g.index][w]]
        elif isinstance(g, Prop):
            true_here = (w in m.val(g.name)) == g.positive
            owner = FORALL if true_here else EXISTS
        elif isinstance(g, Top):
            owner = FORALL
        elif isinstance(g, Bottom):
            owner = EXISTS
        elif isinstance(g, (Mu, Nu)):
            owner = EXISTS if isinstance(g, Mu) else FORALL
            moves = [EvalPosition(kid[k][0], w)]
        elif isinstance(g, Var):
            b = binder[g.name]
            owner = EXISTS if isinstance(subs[b], Mu) else FORALL
            moves = [EvalPosition(b, w)]
        else:
            raise TypeError(g)
        owners[v] = owner
        priority[v] = prio.get(k, 0)
        for mv in dict.fromkeys(moves):
            edges.append((v, vertex(mv)))

    labels = {v: f"{p.subformula}@{p.world}" for v, p in positions.items()}
    game = ParityGame.build(owners, priority, edges, 0, labels, name="evalgame")
    return EvalGame(game, f, tuple(subs), positions)


def check_via_game(pm: PointedModel, f: Formula) -> bool:
    eg = build_eval_game(pm, f)
    return eg.game.initial in solve(eg.game).win_exists
