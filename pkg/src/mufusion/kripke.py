"""Finite multimodal Kripke models: construction, JSON I/O, restriction by
distance, disjoint unions, frame-property checks and pointed isomorphism."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Optional

import numpy as np

from . import kernels

World = str
FRAME_PROPERTIES = ("reflexive", "transitive", "symmetric", "serial", "euclidean", "irreflexive")


class ModelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class KripkeModel:
    signature: frozenset[int]
    worlds: frozenset[World]
    relations: Mapping[int, frozenset[tuple[World, World]]]
    valuation: Mapping[str, frozenset[World]] = field(default_factory=dict)

    def __post_init__(self):
        if set(self.relations) != set(self.signature):
            raise ModelError("relations must have exactly one entry per signature index")
        for i, rel in self.relations.items():
            for a, b in rel:
                if a not in self.worlds or b not in self.worlds:
                    raise ModelError(f"relation {i} references unknown world in {(a, b)}")
        for p, ws in self.valuation.items():
            if not ws <= self.worlds:
                raise ModelError(f"valuation of {p!r} references unknown worlds")

    @classmethod
    def build(
        cls,
        signature: Iterable[int],
        worlds: Iterable[World],
        relations: Mapping[int, Iterable[tuple[World, World]]] | None = None,
        valuation: Mapping[str, Iterable[World]] | None = None,
    ) -> "KripkeModel":
        signature = frozenset(int(i) for i in signature)
        relations = relations or {}
        unknown = set(relations) - signature
        if unknown:
            raise ModelError(f"relations for indices outside the signature: {sorted(unknown)}")
        return cls(
            signature,
            frozenset(worlds),
            {i: frozenset((a, b) for a, b in relations.get(i, ())) for i in signature},
            {p: frozenset(ws) for p, ws in (valuation or {}).items()},
        )

    def __eq__(self, other):
        if not isinstance(other, KripkeModel):
            return NotImplemented
        return (
            self.signature == other.signature
            and self.worlds == other.worlds
            and dict(self.relations) == dict(other.relations)
            and dict(self.valuation) == dict(other.valuation)
        )

    __hash__ = None

    def val(self, prop: str) -> frozenset[World]:
        return self.valuation.get(prop, frozenset())

    def successors(self, index: int, w: World) -> list[World]:
        return sorted(b for a, b in self.relations[index] if a == w)

    def __len__(self) -> int:
        return len(self.worlds)

    def indexed(self) -> "IndexedModel":
        cached = self.__dict__.get("_indexed")
        if cached is None:
            cached = IndexedModel(self)
            object.__setattr__(self, "_indexed", cached)
        return cached


class IndexedModel:
    """Array view of a model: worlds numbered in sorted order, one CSR
    successor structure per relation index, valuations as bool masks."""

    def __init__(self, m: KripkeModel):
        self.model = m
        self.names = sorted(m.worlds)
        self.index = {w: k for k, w in enumerate(self.names)}
        self.n = len(self.names)
        self.csr = {}
        for i, rel in m.relations.items():
            src = np.array([self.index[a] for a, _ in rel], dtype=np.int64)
            dst = np.array([self.index[b] for _, b in rel], dtype=np.int64)
            self.csr[i] = kernels.csr_from_edges(self.n, src, dst)
        self._masks: dict[str, np.ndarray] = {}

    def mask(self, worlds: Iterable[World]) -> np.ndarray:
        out = np.zeros(self.n, dtype=np.bool_)
        for w in worlds:
            out[self.index[w]] = True
        return out

    def prop_mask(self, prop: str) -> np.ndarray:
        m = self._masks.get(prop)
        if m is None:
            m = self._masks[prop] = self.mask(self.model.val(prop))
        return m

    def worlds_of(self, mask: np.ndarray) -> frozenset[World]:
        return frozenset(self.names[k] for k in np.flatnonzero(mask))


@dataclass(frozen=True)
class PointedModel:
    model: KripkeModel
    point: World

    def __post_init__(self):
        if self.point not in self.model.worlds:
            raise ModelError(f"point {self.point!r} is not a world of the model")


def empty_model(signature: Iterable[int]) -> KripkeModel:
    return KripkeModel.build(signature, ())


# ------------------------------------------------------------------ JSON I/O


def model_to_json(m: KripkeModel, point: Optional[World] = None) -> str:
    """Canonical single-line JSON: sorted worlds, pairs and proposition names."""
    doc = {
        "signature": sorted(m.signature),
        "worlds": sorted(m.worlds),
        "relations": {str(i): [list(p) for p in sorted(m.relations[i])] for i in sorted(m.signature)},
        "valuation": {p: sorted(m.valuation[p]) for p in sorted(m.valuation)},
    }
    if point is not None:
        doc["point"] = point
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=False)


def model_from_json(text: str) -> tuple[KripkeModel, Optional[World]]:
    try:
        doc = json.loads(text)
        sig = [int(i) for i in doc["signature"]]
        worlds = [str(w) for w in doc["worlds"]]
        rels = {int(k): [(str(a), str(b)) for a, b in v] for k, v in doc.get("relations", {}).items()}
        val = {str(p): [str(w) for w in ws] for p, ws in doc.get("valuation", {}).items()}
        point = doc.get("point")
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"malformed model file: {exc}") from exc
    m = KripkeModel.build(sig, worlds, rels, val)
    if point is not None and point not in m.worlds:
        raise ModelError(f"point {point!r} is not a world of the model")
    return m, point


def read_model(path: str) -> tuple[KripkeModel, Optional[World]]:
    with open(path, encoding="utf-8") as fh:
        return model_from_json(fh.read())


# -------------------------------------------------------------- operations


def augment(m: KripkeModel, var: str, worlds: Iterable[World]) -> KripkeModel:
    """M[var := worlds]."""
    worlds = frozenset(worlds)
    if not worlds <= m.worlds:
        raise ModelError(f"augment: unknown worlds {sorted(worlds - m.worlds)}")
    return KripkeModel(m.signature, m.worlds, m.relations, {**m.valuation, var: worlds})


def disjoint_union(models: list[KripkeModel]) -> KripkeModel:
    """Union of tagged copies; world ``w`` of the k-th model becomes ``"k:w"``."""
    if not models:
        raise ModelError("disjoint_union of no models")
    sig = models[0].signature
    if any(m.signature != sig for m in models):
        raise ModelError("disjoint_union: signature mismatch")
    worlds, rels, val = set(), {i: set() for i in sig}, {}
    for k, m in enumerate(models):
        tag = lambda w, k=k: f"{k}:{w}"
        worlds.update(tag(w) for w in m.worlds)
        for i in sig:
            rels[i].update((tag(a), tag(b)) for a, b in m.relations[i])
        for p, ws in m.valuation.items():
            val.setdefault(p, set()).update(tag(w) for w in ws)
    return KripkeModel.build(sig, worlds, rels, val)


def induced(m: KripkeModel, keep: Iterable[World]) -> KripkeModel:
    keep = frozenset(keep)
    return KripkeModel(
        m.signature,
        keep,
        {i: frozenset((a, b) for a, b in r if a in keep and b in keep) for i, r in m.relations.items()},
        {p: ws & keep for p, ws in m.valuation.items()},
    )


def distances(m: KripkeModel, source: World, undirected: bool = False) -> dict[World, int]:
    """BFS distance from `source` along the union of all relations."""
    adj: dict[World, set[World]] = {w: set() for w in m.worlds}
    for rel in m.relations.values():
        for a, b in rel:
            adj[a].add(b)
            if undirected:
                adj[b].add(a)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def restrict(pm: PointedModel, n: int, undirected: bool = False) -> Optional[PointedModel]:
    """(M restricted to worlds at distance < n from the point, point).

    For n = 0 the result is the empty model, returned as None since it has no
    point.
    """
    if n <= 0:
        return None
    dist = distances(pm.model, pm.point, undirected)
    keep = [w for w, d in dist.items() if d < n]
    return PointedModel(induced(pm.model, keep), pm.point)


def check_frame_properties(
    m: KripkeModel, index: int, props: Iterable[str] = FRAME_PROPERTIES
) -> dict[str, bool]:
    if index not in m.signature:
        raise ModelError(f"unknown modality index {index}")
    rel = m.relations[index]
    succ: dict[World, set[World]] = {w: set() for w in m.worlds}
    for a, b in rel:
        succ[a].add(b)
    checks = {
        "reflexive": lambda: all(w in succ[w] for w in m.worlds),
        "irreflexive": lambda: all(w not in succ[w] for w in m.worlds),
        "symmetric": lambda: all((b, a) in rel for a, b in rel),
        "transitive": lambda: all(succ[b] <= succ[a] for a, b in rel),
        "serial": lambda: all(succ[w] for w in m.worlds),
        "euclidean": lambda: all(succ[a] <= succ[b] for a, b in rel),
    }
    out = {}
    for p in props:
        if p not in checks:
            raise ModelError(f"unknown frame property {p!r}")
        out[p] = checks[p]()
    return out


# -------------------------------------------------------------- isomorphism


@dataclass(frozen=True)
class Isomorphism:
    mapping: Mapping[World, World]

    def inverse(self) -> "Isomorphism":
        return Isomorphism({b: a for a, b in self.mapping.items()})

    def compose(self, then: "Isomorphism") -> "Isomorphism":
        return Isomorphism({a: then.mapping[b] for a, b in self.mapping.items()})


def is_isomorphism(a: PointedModel, b: PointedModel, iso: Isomorphism) -> bool:
    """Check the bullet conditions: point, every relation both ways, valuation."""
    f = iso.mapping
    ma, mb = a.model, b.model
    if set(f) != set(ma.worlds) or set(f.values()) != set(mb.worlds) or len(set(f.values())) != len(f):
        return False
    if f[a.point] != b.point or ma.signature != mb.signature:
        return False
    for i in ma.signature:
        if {(f[x], f[y]) for x, y in ma.relations[i]} != set(mb.relations[i]):
            return False
    for p in set(ma.valuation) | set(mb.valuation):
        if {f[w] for w in ma.val(p)} != set(mb.val(p)):
            return False
    return True


def _profile(m: KripkeModel) -> dict[World, tuple]:
    """Isomorphism-invariant label of each world: true propositions and, per
    relation index, (out-degree, in-degree, self-loop)."""
    props = {w: [] for w in m.worlds}
    for p in sorted(m.valuation):
        for w in m.valuation[p]:
            props[w].append(p)
    prof = {w: [tuple(props[w])] for w in m.worlds}
    for i in sorted(m.signature):
        outd = {w: 0 for w in m.worlds}
        ind = {w: 0 for w in m.worlds}
        loop = set()
        for x, y in m.relations[i]:
            outd[x] += 1
            ind[y] += 1
            if x == y:
                loop.add(x)
        for w in m.worlds:
            prof[w].append((outd[w], ind[w], w in loop))
    return {w: tuple(v) for w, v in prof.items()}


def isomorphic(a: Optional[PointedModel], b: Optional[PointedModel]) -> Optional[Isomorphism]:
    """A point-preserving isomorphism from `a` to `b`, or None.

    ``None`` inputs stand for the empty model, which is isomorphic only to
    itself (via the empty mapping).
    """
    if a is None or b is None:
        return Isomorphism({}) if a is None and b is None else None
    ma, mb = a.model, b.model
    if ma.signature != mb.signature or len(ma.worlds) != len(mb.worlds):
        return None
    pa, pb = _profile(ma), _profile(mb)
    if sorted(pa.values()) != sorted(pb.values()) or pa[a.point] != pb[b.point]:
        return None
    sig = sorted(ma.signature)
    ea = {i: set(ma.relations[i]) for i in sig}
    eb = {i: set(mb.relations[i]) for i in sig}
    nbr_a: dict[World, set[World]] = {w: set() for w in ma.worlds}
    for i in sig:
        for x, y in ma.relations[i]:
            nbr_a[x].add(y)
            nbr_a[y].add(x)
    by_profile: dict[tuple, list[World]] = {}
    for w in sorted(mb.worlds):
        by_profile.setdefault(pb[w], []).append(w)

    # visit a's worlds so that each (after the first of its component) is
    # adjacent to an already-placed world: prunes early
    order: list[World] = []
    seen: set[World] = set()
    for start in [a.point] + sorted(ma.worlds):
        if start in seen:
            continue
        seen.add(start)
        queue = deque([start])
        while queue:
            u = queue.popleft()
            order.append(u)
            for v in sorted(nbr_a[u]):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)

    fwd: dict[World, World] = {}
    used: set[World] = set()

    def consistent(x: World, y: World) -> bool:
        for z, t in fwd.items():
            for i in sig:
                if ((x, z) in ea[i]) != ((y, t) in eb[i]):
                    return False
                if ((z, x) in ea[i]) != ((t, y) in eb[i]):
                    return False
        for i in sig:
            if ((x, x) in ea[i]) != ((y, y) in eb[i]):
                return False
        return True

    def extend(k: int) -> bool:
        if k == len(order):
            return True
        x = order[k]
        cands = [b.point] if x == a.point else by_profile[pa[x]]
        for y in cands:
            if y in used or not consistent(x, y):
                continue
            fwd[x] = y
            used.add(y)
            if extend(k + 1):
                return True
            del fwd[x]
            used.discard(y)
        return False

    if not extend(0):
        return None
    return Isomorphism(dict(fwd))


def n_isomorphic(a: PointedModel, b: PointedModel, n: int, undirected: bool = False) -> Optional[Isomorphism]:
    return isomorphic(restrict(a, n, undirected), restrict(b, n, undirected))
