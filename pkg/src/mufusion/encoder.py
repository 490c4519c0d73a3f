"""Parity games as multimodal Kripke models, and the winning-region formulas.

Each game vertex v becomes a position world ``v<id>``. A move out of v is
simulated by a chain of gadgets: fresh copies of witness frames (a split
frame ``o<-o->o``, a chain ``o->o->o`` or single steps ``o->o``) whose worlds
carry marker propositions telling the formulas where they are. Markers are
emitted with an ``@`` prefix so they never clash with user propositions.

Wiring of a vertex with ascending successor list S (variant 1; variants 2
and 3 consume successors the same way):

* one split copy rooted at the current root; its left branch confirms S[0]
  through a step copy of relation 1;
* if one successor is left the right branch confirms it as well (graph
  mode) or is left without a confirmation (strict mode, so no world is
  shared between two copies of one relation);
* with two left, the right branch confirms the second;
* with more, the right branch steps to a fresh bridge root (not a position)
  which roots the next split copy.

Every world not covered by a copy of some relation gets that relation's
one-world filler (a loop for reflexive classes, nothing otherwise).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .evalgame import EvalGame, build_eval_game
from .formula import (
    And,
    Box,
    Dia,
    Formula,
    Mu,
    Nu,
    Or,
    Prop,
    Var,
    conj,
    disj,
    free_vars,
    bound_vars,
    implies,
    neg,
    subformulas,
)
from .kripke import KripkeModel, PointedModel, World
from .paritygame import EXISTS, ParityGame, is_tree_like

BD, POS = "@bd", "@pos"
PRE0, MID0, NXT0 = "@pre0", "@mid0", "@nxt0"
PRE1, NXT1 = "@pre1", "@nxt1"
PRE2, NXT2 = "@pre2", "@nxt2"
P_EXISTS, P_FORALL = "@P_exists", "@P_forall"


def parity_prop(j: int) -> str:
    return f"@P_{j}"


VARIANT_MARKERS = {
    1: (BD, POS, PRE0, NXT0, PRE1, NXT1),
    2: (BD, POS, PRE0, MID0, NXT0, PRE1, NXT1),
    3: (BD, POS, PRE0, NXT0, PRE1, NXT1, PRE2, NXT2),
}
VARIANT_SIGNATURE = {1: (0, 1), 2: (0, 1), 3: (0, 1, 2)}


class EncodeError(ValueError):
    pass


# ----------------------------------------------------------------- witnesses


@dataclass(frozen=True)
class Frame:
    """A unimodal frame with designated worlds, e.g. (r, a, b) for a split."""

    worlds: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    designated: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.designated)) != len(self.designated):
            raise EncodeError("designated worlds must be pairwise distinct")
        ws = set(self.worlds)
        if not set(self.designated) <= ws:
            raise EncodeError("designated worlds must belong to the frame")
        if any(a not in ws or b not in ws for a, b in self.edges):
            raise EncodeError("frame edge references unknown world")

    def require(self, *pairs: tuple[int, int]) -> None:
        for i, j in pairs:
            e = (self.designated[i], self.designated[j])
            if e not in self.edges:
                raise EncodeError(f"witness frame lacks designated edge {e}")

    def is_bare(self, required: Iterable[tuple[int, int]]) -> bool:
        need = {(self.designated[i], self.designated[j]) for i, j in required}
        return set(self.worlds) == set(self.designated) and set(self.edges) == need


SPLIT_EDGES = ((0, 1), (0, 2))
CHAIN_EDGES = ((0, 1), (1, 2))
STEP_EDGES = ((0, 1),)


@dataclass(frozen=True)
class WitnessFrames:
    variant: int
    choice: Optional[Frame]  # split (variant 1) or chain (variant 2) for relation 0
    steps: Mapping[int, Frame]  # step frames, by relation index
    filler_loops: Mapping[int, bool] = field(default_factory=dict)
    name: str = "custom"

    def __post_init__(self):
        if self.variant not in (1, 2, 3):
            raise EncodeError(f"unknown variant {self.variant}")
        need_steps = {1: {1}, 2: {1}, 3: {0, 1, 2}}[self.variant]
        if not need_steps <= set(self.steps):
            raise EncodeError(f"variant {self.variant} needs step frames for relations {sorted(need_steps)}")
        for fr in self.steps.values():
            if len(fr.designated) != 2:
                raise EncodeError("step frames designate (source, target)")
            fr.require(*STEP_EDGES)
        if self.variant in (1, 2):
            if self.choice is None or len(self.choice.designated) != 3:
                raise EncodeError("variants 1 and 2 need a three-world relation-0 frame")
            self.choice.require(*(SPLIT_EDGES if self.variant == 1 else CHAIN_EDGES))

    @property
    def signature(self) -> tuple[int, ...]:
        return VARIANT_SIGNATURE[self.variant]

    def is_minimal(self) -> bool:
        """True when every copy adds exactly its designated worlds and edges,
        so copies may share worlds without leaving class K."""
        if any(self.filler_loops.get(i, False) for i in self.signature):
            return False
        if any(not fr.is_bare(STEP_EDGES) for fr in self.steps.values()):
            return False
        if self.choice is not None:
            return self.choice.is_bare(SPLIT_EDGES if self.variant == 1 else CHAIN_EDGES)
        return True


def _bare(names: tuple[str, ...], pairs, closure: bool) -> Frame:
    if closure:
        edges = frozenset((a, b) for a in names for b in names)
    else:
        edges = frozenset((names[i], names[j]) for i, j in pairs)
    return Frame(names, edges, names)


def _witnesses(variant: int, s5: bool) -> WitnessFrames:
    step = _bare(("s", "t"), STEP_EDGES, s5)
    if variant == 1:
        choice = _bare(("r", "a", "b"), SPLIT_EDGES, s5)
        steps = {1: step}
    elif variant == 2:
        choice = _bare(("r", "m", "e"), CHAIN_EDGES, s5)
        steps = {1: step}
    else:
        choice = None
        steps = {0: step, 1: step, 2: step}
    fill = {i: s5 for i in VARIANT_SIGNATURE[variant]}
    return WitnessFrames(variant, choice, steps, fill, "s5" if s5 else "minimal")


def minimal_witnesses(variant: int) -> WitnessFrames:
    """Bare frames (class K): exactly the designated worlds and edges."""
    return _witnesses(variant, False)


def s5_witnesses(variant: int) -> WitnessFrames:
    """S5 closures of the bare frames: each copy is one full cluster, and
    uncovered worlds get a reflexive loop."""
    return _witnesses(variant, True)


def witnesses_from_json(text: str, variant: Optional[int] = None) -> WitnessFrames:
    """Witness file: ``{"variant": 1, "choice": F, "steps": {"1": F},
    "filler_loops": {"0": true, "1": true}}`` with
    ``F = {"worlds": [...], "edges": [[a, b], ...], "designated": [...]}``."""
    try:
        doc = json.loads(text)

        def frame(d):
            return Frame(
                tuple(str(w) for w in d["worlds"]),
                frozenset((str(a), str(b)) for a, b in d["edges"]),
                tuple(str(w) for w in d["designated"]),
            )

        v = int(doc.get("variant", variant or 1))
        choice = frame(doc["choice"]) if doc.get("choice") else None
        steps = {int(k): frame(f) for k, f in doc["steps"].items()}
        fill = {int(k): bool(b) for k, b in doc.get("filler_loops", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise EncodeError(f"malformed witness file: {exc}") from exc
    if variant is not None and v != variant:
        raise EncodeError(f"witness file is for variant {v}, not {variant}")
    return WitnessFrames(v, choice, steps, fill, "file")


def resolve_witnesses(mode: str, variant: int) -> WitnessFrames:
    """``minimal``, ``s5`` or ``file:<path>``."""
    if mode == "minimal":
        return minimal_witnesses(variant)
    if mode == "s5":
        return s5_witnesses(variant)
    if mode.startswith("file:"):
        with open(mode[5:], encoding="utf-8") as fh:
            return witnesses_from_json(fh.read(), variant)
    raise EncodeError(f"unknown witness mode {mode!r}")


# ------------------------------------------------------------------ encoding


@dataclass(frozen=True)
class Encoding:
    model: KripkeModel
    vertex_map: Mapping[int, World]
    variant: int
    witnesses: WitnessFrames
    strict: bool
    max_parity: int

    def pointed(self, vertex: int) -> PointedModel:
        return PointedModel(self.model, self.vertex_map[vertex])


class _Builder:
    def __init__(self, wf: WitnessFrames, strict: bool):
        self.wf = wf
        self.strict = strict
        self.worlds: list[World] = []
        self.known: set[World] = set()
        self.rel: dict[int, set[tuple[World, World]]] = {i: set() for i in wf.signature}
        self.covered: dict[int, set[World]] = {i: set() for i in wf.signature}
        self.marks: dict[str, set[World]] = {}
        self.copies = 0
        self.gadgets = 0

    def world(self, w: World) -> World:
        if w not in self.known:
            self.known.add(w)
            self.worlds.append(w)
        return w

    def mark(self, w: World, *props: str) -> None:
        for p in props:
            self.marks.setdefault(p, set()).add(w)

    def copy(self, index: int, frame: Frame, assign: Mapping[str, World]) -> None:
        """Attach a fresh copy of `frame` under relation `index`, with the
        designated frame worlds identified with existing model worlds."""
        tag = f"c{self.copies}"
        self.copies += 1
        image = {}
        for fw in frame.worlds:
            if fw in assign:
                image[fw] = assign[fw]
            else:
                image[fw] = self.world(f"{tag}.{fw}")
        for w in image.values():
            if self.strict and w in self.covered[index]:
                raise EncodeError(f"world {w} would lie in two copies of relation {index}")
            self.covered[index].add(w)
        self.rel[index].update((image[a], image[b]) for a, b in frame.edges)

    def step(self, index: int, src: World, dst: World) -> None:
        fr = self.wf.steps[index]
        self.copy(index, fr, {fr.designated[0]: src, fr.designated[1]: dst})

    def fresh(self, role: str) -> World:
        return self.world(f"g{self.gadgets}.{role}")

    def complete(self) -> None:
        for i in self.wf.signature:
            if self.wf.filler_loops.get(i, False):
                for w in self.worlds:
                    if w not in self.covered[i]:
                        self.rel[i].add((w, w))
                        self.covered[i].add(w)


def encode(
    g: ParityGame,
    wf: WitnessFrames,
    max_parity: Optional[int] = None,
    strict: Optional[bool] = None,
) -> Encoding:
    """The Kripke model of `g` built from copies of the witness frames.

    `strict` defaults to True unless the witnesses are minimal; strict mode
    needs a tree-like game and never lets two copies of one relation share a
    world, so each relation is a disjoint union of witness copies.
    """
    if max_parity is None:
        max_parity = g.max_priority()
    if g.max_priority() > max_parity:
        raise EncodeError(f"priority {g.max_priority()} exceeds max_parity {max_parity}")
    if strict is None:
        strict = not wf.is_minimal()
    if strict and not is_tree_like(g):
        raise EncodeError("strict encoding needs a tree-like game (acyclic, in-degree <= 1)")
    b = _Builder(wf, strict)
    v = wf.variant
    confirm_mark = NXT2 if v == 3 else NXT1
    vmap = {u: b.world(f"v{u}") for u in g.vertices}

    for u in g.vertices:
        w = vmap[u]
        b.mark(w, POS, BD, P_EXISTS if g.owner(u) == EXISTS else P_FORALL, parity_prop(g.priority[u]))

    def confirm(index: int, src: World, target: int) -> None:
        b.step(index, src, vmap[target])
        b.mark(vmap[target], confirm_mark)

    def bridge(index: int, src: World) -> World:
        root = b.fresh("bridge")
        b.step(index, src, root)
        b.mark(root, confirm_mark, PRE0, BD)
        return root

    for u in g.vertices:
        rest = g.successors(u)
        root = vmap[u]
        if rest:
            b.mark(root, PRE0, BD)
        while rest:
            if v == 1:
                first, second = b.fresh("a"), b.fresh("b")
                fr = wf.choice
                b.copy(0, fr, dict(zip(fr.designated, (root, first, second))))
                b.mark(first, NXT0, PRE1, BD)
                b.mark(second, NXT0, PRE1, BD)
                idx = 1
            elif v == 2:
                first, second = b.fresh("m"), b.fresh("e")
                fr = wf.choice
                b.copy(0, fr, dict(zip(fr.designated, (root, first, second))))
                b.mark(first, MID0, PRE1, BD)
                b.mark(second, NXT0, PRE1, BD)
                idx = 1
            else:
                first, second = b.fresh("a"), b.fresh("b")
                b.step(0, root, first)
                b.step(1, first, second)
                b.mark(first, NXT0, PRE1, PRE2, BD)
                b.mark(second, NXT1, PRE2, BD)
                idx = 2
            b.gadgets += 1
            confirm(idx, first, rest[0])
            if len(rest) == 1:
                if not strict:
                    confirm(idx, second, rest[0])
                rest = []
            elif len(rest) == 2:
                confirm(idx, second, rest[1])
                rest = []
            else:
                root = bridge(idx, second)
                rest = rest[1:]

    b.complete()
    valuation = {p: set() for p in VARIANT_MARKERS[v] + (P_EXISTS, P_FORALL)}
    for j in range(max_parity + 1):
        valuation[parity_prop(j)] = set()
    for p, ws in b.marks.items():
        valuation[p] = ws
    model = KripkeModel.build(wf.signature, b.worlds, b.rel, valuation)
    return Encoding(model, vmap, v, wf, strict, max_parity)


# -------------------------------------------------------------------- macros


def _default_fixpoint(variant: int) -> type:
    return Nu if variant == 1 else Mu


def _macro_var(f: Formula, var: Optional[str]) -> str:
    used = set(free_vars(f)) | set(bound_vars(f))
    if var is not None:
        if var in used:
            raise EncodeError(f"macro variable {var} would capture or clash in the argument")
        return var
    name, k = "Y", 0
    while name in used:
        k += 1
        name = f"Y{k}"
    return name


def _macro(f: Formula, variant: int, diamond: bool, var: Optional[str], fixpoint) -> Formula:
    y = _macro_var(f, var)
    op = fixpoint or _default_fixpoint(variant)
    P = Prop
    land = Or(And(Var(y), neg(POS)), And(f, P(POS)))

    def ex(*guards_then):
        *guards, then = guards_then
        return conj(*[P(x) for x in guards], then)

    def un(*guards_then):
        *guards, then = guards_then
        return implies(conj(*[P(x) for x in guards]), then)

    if variant == 1:
        if diamond:
            body = ex(PRE0, BD, Dia(0, ex(NXT0, PRE1, BD, Dia(1, ex(NXT1, BD, land)))))
        else:
            body = un(PRE0, BD, Box(0, un(NXT0, PRE1, BD, Box(1, un(NXT1, BD, land)))))
    elif variant == 2:
        if diamond:
            confirm = Dia(1, ex(NXT1, BD, land))
            body = ex(PRE0, BD, Dia(0, ex(MID0, BD, Or(
                And(P(PRE1), confirm),
                Dia(0, ex(NXT0, PRE1, BD, confirm)),
            ))))
        else:
            confirm = Box(1, un(NXT1, BD, land))
            body = un(PRE0, BD, Box(0, un(MID0, BD, And(
                confirm,
                Box(0, un(NXT0, PRE1, BD, confirm)),
            ))))
    elif variant == 3:
        if diamond:
            confirm = Dia(2, ex(NXT2, BD, land))
            body = ex(PRE0, BD, Dia(0, ex(NXT0, PRE1, PRE2, BD, Or(
                confirm,
                Dia(1, ex(NXT1, PRE2, BD, confirm)),
            ))))
        else:
            confirm = Box(2, un(NXT2, BD, land))
            body = un(PRE0, BD, Box(0, un(NXT0, PRE1, PRE2, BD, And(
                confirm,
                Box(1, un(NXT1, PRE2, BD, confirm)),
            ))))
    else:
        raise EncodeError(f"unknown variant {variant}")
    return op(y, body)


def blacklozenge(f: Formula, variant: int = 1, var: Optional[str] = None, fixpoint=None) -> Formula:
    """Existential move macro: some simulated move lands on a position
    satisfying `f`. `fixpoint` (Mu or Nu) overrides the per-variant binder."""
    return _macro(f, variant, True, var, fixpoint)


def blacksquare(f: Formula, variant: int = 1, var: Optional[str] = None, fixpoint=None) -> Formula:
    """Universal move macro: every simulated move lands on a position
    satisfying `f`."""
    return _macro(f, variant, False, var, fixpoint)


def wn(n: int, variant: int = 1, fixpoint=None) -> Formula:
    """Winning-region formula for games with priorities <= n.

    Binders X_n ... X_0 from the outside in, X_j greatest when j is even and
    least when odd, around the disjunction over j of
    (P_j & P_exists & lozenge X_j) | (P_j & P_forall & square X_j).
    """
    if n < 0:
        raise ValueError("n must be a natural number")
    counter = iter(range(2 * n + 2))
    parts = []
    for j in range(n + 1):
        x = Var(f"X_{j}")
        pj = Prop(parity_prop(j))
        dia = blacklozenge(x, variant, f"Y_{next(counter)}", fixpoint)
        sq = blacksquare(x, variant, f"Y_{next(counter)}", fixpoint)
        parts.append(Or(conj(pj, Prop(P_EXISTS), dia), conj(pj, Prop(P_FORALL), sq)))
    out = disj(*parts)
    for j in range(n + 1):
        out = (Nu if j % 2 == 0 else Mu)(f"X_{j}", out)
    return out


def swap_macro_fixpoints(f: Formula) -> Formula:
    """Flip mu/nu on the macro binders (variables named Y...) only."""
    def go(g: Formula) -> Formula:
        if isinstance(g, (Mu, Nu)):
            body = go(g.body)
            if g.var.startswith("Y"):
                return (Nu if isinstance(g, Mu) else Mu)(g.var, body)
            return type(g)(g.var, body)
        if isinstance(g, (And, Or)):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, (Box, Dia)):
            return type(g)(g.index, go(g.body))
        return g

    return go(f)


# ------------------------------------------------------- evaluation games


@dataclass(frozen=True)
class EvalEncoding:
    encoding: Encoding
    eval_game: EvalGame

    @property
    def initial_world(self) -> World:
        return self.encoding.vertex_map[self.eval_game.game.initial]

    def pointed(self) -> PointedModel:
        return PointedModel(self.encoding.model, self.initial_world)


def encode_eval(
    pm: PointedModel,
    f: Formula,
    wf: WitnessFrames,
    strict: Optional[bool] = None,
    max_parity: Optional[int] = None,
) -> EvalEncoding:
    """Kripke encoding of the parity form of the evaluation game of f at pm.
    Parity markers run up to `max_parity`, by default the game's largest
    priority."""
    eg = build_eval_game(pm, f)
    if max_parity is None:
        max_parity = eg.game.max_priority()
    enc = encode(eg.game, wf, max_parity, strict)
    return EvalEncoding(enc, eg)


def macro_binders(f: Formula) -> list[Formula]:
    return [g for g in subformulas(f) if isinstance(g, (Mu, Nu)) and g.var.startswith("Y")]
