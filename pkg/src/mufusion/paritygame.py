"""Parity games: arena, recursive (Zielonka) solver, tree unfolding and
PGSolver text format.

Owner 0 is the existential player (even wins), owner 1 the universal one.
A player with no move loses.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

import numpy as np

from . import kernels

EXISTS, FORALL = 0, 1


class GameError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ParityGame:
    vertices_exists: frozenset[int]
    vertices_forall: frozenset[int]
    initial: int
    edges: frozenset[tuple[int, int]]
    priority: Mapping[int, int]
    labels: Mapping[int, str] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.vertices_exists & self.vertices_forall:
            raise GameError("vertex sets of the two players overlap")
        vs = self.vertices_exists | self.vertices_forall
        if self.initial not in vs:
            raise GameError(f"initial vertex {self.initial} does not exist")
        for a, b in self.edges:
            if a not in vs or b not in vs:
                raise GameError(f"edge {(a, b)} references unknown vertex")
        if set(self.priority) != vs:
            raise GameError("priority must be defined exactly on the vertices")
        if any(p < 0 for p in self.priority.values()):
            raise GameError("priorities must be natural numbers")

    @classmethod
    def build(
        cls,
        owners: Mapping[int, int],
        priority: Mapping[int, int],
        edges: Iterable[tuple[int, int]],
        initial: Optional[int] = None,
        labels: Optional[Mapping[int, str]] = None,
        name: str = "",
    ) -> "ParityGame":
        ve = frozenset(v for v, o in owners.items() if o == EXISTS)
        va = frozenset(v for v, o in owners.items() if o == FORALL)
        if initial is None:
            initial = min(owners)
        return cls(ve, va, initial, frozenset(edges), dict(priority), dict(labels or {}), name)

    def __eq__(self, other):
        if not isinstance(other, ParityGame):
            return NotImplemented
        return (
            self.vertices_exists == other.vertices_exists
            and self.vertices_forall == other.vertices_forall
            and self.initial == other.initial
            and self.edges == other.edges
            and dict(self.priority) == dict(other.priority)
            and dict(self.labels) == dict(other.labels)
        )

    __hash__ = None

    @property
    def vertices(self) -> list[int]:
        return sorted(self.vertices_exists | self.vertices_forall)

    def owner(self, v: int) -> int:
        return EXISTS if v in self.vertices_exists else FORALL

    def successors(self, v: int) -> list[int]:
        return self._succ().get(v, [])

    def _succ(self) -> dict[int, list[int]]:
        cached = self.__dict__.get("_succ_cache")
        if cached is None:
            cached = {}
            for a, b in sorted(self.edges):
                cached.setdefault(a, []).append(b)
            object.__setattr__(self, "_succ_cache", cached)
        return cached

    def max_priority(self) -> int:
        return max(self.priority.values())

    def with_initial(self, v: int) -> "ParityGame":
        return ParityGame(
            self.vertices_exists, self.vertices_forall, v, self.edges, self.priority, self.labels, self.name
        )

    def __len__(self) -> int:
        return len(self.priority)


@dataclass(frozen=True)
class Solution:
    win_exists: frozenset[int]
    win_forall: frozenset[int]
    strategy_exists: Mapping[int, int]
    strategy_forall: Mapping[int, int]

    def winner(self, v: int) -> int:
        return EXISTS if v in self.win_exists else FORALL


# ------------------------------------------------------------------ solver


class _Arena:
    def __init__(self, g: ParityGame):
        self.ids = g.vertices
        self.index = {v: k for k, v in enumerate(self.ids)}
        n = self.n = len(self.ids)
        src = np.array([self.index[a] for a, _ in g.edges], dtype=np.int64)
        dst = np.array([self.index[b] for _, b in g.edges], dtype=np.int64)
        self.indptr, self.indices = kernels.csr_from_edges(n, src, dst)
        self.owner = np.array([g.owner(v) for v in self.ids], dtype=np.int64)
        self.prio = np.array([g.priority[v] for v in self.ids], dtype=np.int64)

    def attractor(self, alive, target, player):
        return kernels.attractor(self.indptr, self.indices, self.owner, alive, target, player)

    def live_degree(self, alive):
        deg = np.zeros(self.n, dtype=np.int64)
        src = np.repeat(np.arange(self.n), np.diff(self.indptr))
        ok = alive[src] & alive[self.indices]
        np.add.at(deg, src[ok], 1)
        return deg

    def first_live_successor(self, v, alive):
        for k in range(self.indptr[v], self.indptr[v + 1]):
            if alive[self.indices[k]]:
                return self.indices[k]
        return -1


def _zielonka(ar: _Arena, alive: np.ndarray):
    """Returns (win masks [W0, W1], strategy array). strategy[v] is defined
    (>= 0) exactly for vertices won by their owner."""
    n = ar.n
    win = [np.zeros(n, dtype=np.bool_), np.zeros(n, dtype=np.bool_)]
    strat = np.full(n, -1, dtype=np.int64)
    alive = alive.copy()

    # a stuck player loses: peel the attractors of dead ends first
    while alive.any():
        dead = alive & (ar.live_degree(alive) == 0)
        if not dead.any():
            break
        for loser in (EXISTS, FORALL):
            stuck = dead & (ar.owner == loser)
            if stuck.any():
                winner = 1 - loser
                attr, s = ar.attractor(alive, stuck, winner)
                win[winner] |= attr
                sel = attr & (s >= 0)
                strat[sel] = s[sel]
                alive &= ~attr
                break

    while alive.any():
        d = ar.prio[alive].max()
        p = int(d % 2)
        top = alive & (ar.prio == d)
        attr, s_attr = ar.attractor(alive, top, p)
        sub_win, sub_strat = _zielonka(ar, alive & ~attr)
        if not sub_win[1 - p].any():
            win[p] |= alive
            sel = sub_win[p] & (sub_strat >= 0)
            strat[sel] = sub_strat[sel]
            sel = attr & ~top & (s_attr >= 0)
            strat[sel] = s_attr[sel]
            for v in np.flatnonzero(top & (ar.owner == p)):
                strat[v] = ar.first_live_successor(v, alive)
            return win, strat
        opp = 1 - p
        battr, s_b = ar.attractor(alive, sub_win[opp], opp)
        win[opp] |= battr
        sel = sub_win[opp] & (sub_strat >= 0)
        strat[sel] = sub_strat[sel]
        sel = battr & ~sub_win[opp] & (s_b >= 0)
        strat[sel] = s_b[sel]
        alive &= ~battr
    return win, strat


def solve(g: ParityGame) -> Solution:
    """Exact winning regions and memoryless winning strategies."""
    ar = _Arena(g)
    win, strat = _zielonka(ar, np.ones(ar.n, dtype=np.bool_))
    if (win[0] & win[1]).any() or not (win[0] | win[1]).all():
        raise AssertionError("winning regions do not partition the arena")
    ids = ar.ids
    sigma = {ids[v]: ids[strat[v]] for v in np.flatnonzero(win[0] & (ar.owner == EXISTS))}
    tau = {ids[v]: ids[strat[v]] for v in np.flatnonzero(win[1] & (ar.owner == FORALL))}
    return Solution(
        frozenset(ids[v] for v in np.flatnonzero(win[0])),
        frozenset(ids[v] for v in np.flatnonzero(win[1])),
        sigma,
        tau,
    )


def winning_positions(g: ParityGame) -> frozenset[int]:
    return solve(g).win_exists


def exists_wins(g: ParityGame) -> bool:
    return g.initial in solve(g).win_exists


# ------------------------------------------------------------------ shapes


def is_tree_like(g: ParityGame) -> bool:
    """Acyclic with in-degree at most one."""
    indeg: dict[int, int] = {}
    for _, b in g.edges:
        indeg[b] = indeg.get(b, 0) + 1
        if indeg[b] > 1:
            return False
    return is_acyclic(g)


def is_acyclic(g: ParityGame) -> bool:
    indeg = {v: 0 for v in g.vertices}
    for _, b in g.edges:
        indeg[b] += 1
    queue = deque(v for v, k in indeg.items() if k == 0)
    seen = 0
    while queue:
        u = queue.popleft()
        seen += 1
        for v in g.successors(u):
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    return seen == len(indeg)


def unfold(g: ParityGame, depth: int) -> ParityGame:
    """Tree of fresh copies along plays from the initial vertex, cut after
    `depth` moves. Copy ids are assigned in BFS order; labels keep the
    original vertex id. If some cut-off copy still had moves the result name
    carries a ``truncated`` marker (winners may differ from `g`)."""
    owners, prio, edges, labels = {}, {}, [], {}
    truncated = False
    queue = deque([(0, g.initial, 0)])
    owners[0], prio[0] = g.owner(g.initial), g.priority[g.initial]
    labels[0] = str(g.initial)
    next_id = 1
    while queue:
        cid, v, k = queue.popleft()
        succ = g.successors(v)
        if k >= depth:
            truncated |= bool(succ)
            continue
        for w in succ:
            owners[next_id], prio[next_id] = g.owner(w), g.priority[w]
            labels[next_id] = str(w)
            edges.append((cid, next_id))
            queue.append((next_id, w, k + 1))
            next_id += 1
    name = f"unfold({depth})" + (" truncated" if truncated else "")
    return ParityGame.build(owners, prio, edges, 0, labels, name)


# -------------------------------------------------------------- PGSolver


_HEADER = re.compile(r"^parity\s+(\d+)\s*;$")
_START = re.compile(r"^start\s+(\d+)\s*;$")
_LINE = re.compile(r'^(\d+)\s+(\d+)\s+([01])(?:\s+(\d+(?:\s*,\s*\d+)*))?(?:\s+"([^"]*)")?\s*;$')


def write_pg(g: ParityGame) -> str:
    vs = g.vertices
    lines = [f"parity {max(vs)};"]
    if g.initial != vs[0]:
        lines.append(f"start {g.initial};")
    for v in vs:
        parts = [str(v), str(g.priority[v]), str(g.owner(v))]
        succ = g.successors(v)
        if succ:
            parts.append(",".join(map(str, succ)))
        if v in g.labels:
            parts.append(f'"{g.labels[v]}"')
        lines.append(" ".join(parts) + ";")
    return "\n".join(lines) + "\n"


def read_pg(text: str) -> ParityGame:
    lines = [(k + 1, ln.strip()) for k, ln in enumerate(text.splitlines()) if ln.strip()]
    if not lines:
        raise GameError("empty PGSolver document")
    lineno, first = lines[0]
    m = _HEADER.match(first)
    if not m:
        raise GameError(f"line {lineno}: malformed header {first!r}")
    max_id = int(m.group(1))
    start = None
    owners, prio, labels, succs, order = {}, {}, {}, {}, []
    for lineno, ln in lines[1:]:
        m = _START.match(ln)
        if m:
            if order or start is not None:
                raise GameError(f"line {lineno}: start line must precede vertex lines")
            start = int(m.group(1))
            continue
        m = _LINE.match(ln)
        if not m:
            raise GameError(f"line {lineno}: malformed vertex line {ln!r}")
        v = int(m.group(1))
        if v in owners:
            raise GameError(f"line {lineno}: duplicate vertex {v}")
        if v > max_id:
            raise GameError(f"line {lineno}: vertex {v} exceeds declared maximum {max_id}")
        prio[v] = int(m.group(2))
        owners[v] = int(m.group(3))
        succs[v] = [int(s) for s in m.group(4).split(",")] if m.group(4) else []
        if m.group(5) is not None:
            labels[v] = m.group(5)
        order.append(v)
    if not order:
        raise GameError("no vertices")
    for v, ss in succs.items():
        for s in ss:
            if s not in owners:
                raise GameError(f"vertex {v}: dangling successor {s}")
    initial = order[0] if start is None else start
    if initial not in owners:
        raise GameError(f"start vertex {initial} is not declared")
    edges = [(v, s) for v, ss in succs.items() for s in ss]
    return ParityGame.build(owners, prio, edges, initial, labels)


SAMPLE_PG = 'parity 3;\n0 0 0 1,2,3 "e0";\n1 1 0 "e1";\n2 0 1 "a0";\n3 8 0 "e8";\n'


def sample_game() -> ParityGame:
    """The four-vertex example game: an existential root with priority 0
    moving to (exists, 1), (forall, 0) and (exists, 8), none of which can move."""
    return read_pg(SAMPLE_PG)
