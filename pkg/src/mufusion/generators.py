"""Seeded random models, formulas and games for the verification pipelines.

All generators take a ``random.Random`` so a pipeline run is reproducible
from its seed alone.
"""

from __future__ import annotations

import random
from typing import Sequence

from .formula import (
    BOTTOM,
    TOP,
    And,
    Box,
    Dia,
    Formula,
    Mu,
    Nu,
    Or,
    Prop,
    Var,
    subformulas,
)
from .kripke import KripkeModel, PointedModel
from .paritygame import EXISTS, FORALL, ParityGame


def random_model(
    rng: random.Random,
    max_worlds: int = 6,
    signature: Sequence[int] = (0, 1),
    props: Sequence[str] = ("p", "q"),
    edge_prob: float = 0.35,
) -> PointedModel:
    n = rng.randint(1, max_worlds)
    worlds = [f"w{k}" for k in range(n)]
    rel = {
        i: [(a, b) for a in worlds for b in worlds if rng.random() < edge_prob]
        for i in signature
    }
    val = {p: [w for w in worlds if rng.random() < 0.5] for p in props}
    m = KripkeModel.build(signature, worlds, rel, val)
    return PointedModel(m, rng.choice(worlds))


def random_formula(
    rng: random.Random,
    signature: Sequence[int] = (0, 1),
    props: Sequence[str] = ("p", "q"),
    max_fixpoints: int = 3,
    max_depth: int = 6,
    require_modal: bool = True,
    require_fixpoint: bool = True,
) -> Formula:
    """A closed formula whose binders all have distinct names.

    Unless told otherwise the result contains at least one modality and at
    least one fixpoint, so the checks it feeds are not vacuous.
    """
    while True:
        counter = [0]

        def leaf(scope: list[str]) -> Formula:
            r = rng.random()
            if scope and r < 0.45:
                return Var(rng.choice(scope))
            if r < 0.05:
                return rng.choice((TOP, BOTTOM))
            return Prop(rng.choice(props), rng.random() < 0.7)

        def build(depth: int, scope: list[str]) -> Formula:
            if depth <= 0 or rng.random() < 0.2:
                return leaf(scope)
            kinds = ["and", "or", "dia", "box"]
            if counter[0] < max_fixpoints:
                kinds += ["mu", "nu"]
            k = rng.choice(kinds)
            if k in ("and", "or"):
                cls = And if k == "and" else Or
                return cls(build(depth - 1, scope), build(depth - 1, scope))
            if k in ("dia", "box"):
                cls = Dia if k == "dia" else Box
                return cls(rng.choice(signature), build(depth - 1, scope))
            name = f"X{counter[0]}"
            counter[0] += 1
            return (Mu if k == "mu" else Nu)(name, build(depth - 1, scope + [name]))

        f = build(max_depth, [])
        subs = list(subformulas(f))
        if require_modal and not any(isinstance(g, (Dia, Box)) for g in subs):
            continue
        if require_fixpoint and not any(isinstance(g, (Mu, Nu)) for g in subs):
            continue
        return f


def random_game(
    rng: random.Random,
    max_vertices: int = 8,
    max_priority: int = 2,
    edge_prob: float = 0.3,
) -> ParityGame:
    """Arbitrary finite game; cycles, self-loops and dead ends allowed."""
    n = rng.randint(1, max_vertices)
    owners = {v: rng.choice((EXISTS, FORALL)) for v in range(n)}
    prio = {v: rng.randint(0, max_priority) for v in range(n)}
    edges = [(a, b) for a in range(n) for b in range(n) if rng.random() < edge_prob]
    return ParityGame.build(owners, prio, edges, 0)


def random_tree_game(
    rng: random.Random,
    max_vertices: int = 12,
    max_priority: int = 3,
) -> ParityGame:
    """Acyclic game with in-degree at most one: each vertex after the root
    hangs below a uniformly chosen earlier vertex, so fan-outs vary."""
    n = rng.randint(1, max_vertices)
    owners = {v: rng.choice((EXISTS, FORALL)) for v in range(n)}
    prio = {v: rng.randint(0, max_priority) for v in range(n)}
    edges = [(rng.randrange(v), v) for v in range(1, n)]
    return ParityGame.build(owners, prio, edges, 0)
