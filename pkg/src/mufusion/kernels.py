"""Hot loops: modal preimages over CSR relations and attractor computation.

Two interchangeable implementations are provided. The numba one is used when
numba imports and ``MUFUSION_PURE_NUMPY`` is unset (or "0"); otherwise the
vectorised numpy one is used. Both are always importable for testing and
benchmarking as ``NUMBA_KERNELS`` / ``NUMPY_KERNELS``.

CSR layout: successors of node ``u`` are ``indices[indptr[u]:indptr[u+1]]``.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kw):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def csr_from_edges(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    order = np.lexsort((dst, src))
    counts = np.bincount(src, minlength=n) if len(src) else np.zeros(n, dtype=np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, dst[order].copy()


def _sources(indptr: np.ndarray) -> np.ndarray:
    return np.repeat(np.arange(len(indptr) - 1, dtype=np.int64), np.diff(indptr))


# ------------------------------------------------------------------ numpy


def _np_diamond(indptr, indices, mask):
    out = np.zeros(len(indptr) - 1, dtype=np.bool_)
    hit = mask[indices]
    out[_sources(indptr)[hit]] = True
    return out


def _np_box(indptr, indices, mask):
    out = np.ones(len(indptr) - 1, dtype=np.bool_)
    miss = ~mask[indices]
    out[_sources(indptr)[miss]] = False
    return out


def _np_attractor(indptr, indices, owner, alive, target, player):
    """Layered attractor. `owner[v]` is 0/1, `alive` marks the subgame,
    `target` the set to attract to. Returns (attr mask, strategy) where
    strategy[v] is the chosen successor for `player` vertices added by the
    attractor (-1 elsewhere)."""
    n = len(indptr) - 1
    src = _sources(indptr)
    live_edge = alive[src] & alive[indices]
    src = src[live_edge]
    dst = indices[live_edge]
    attr = target & alive
    strategy = np.full(n, -1, dtype=np.int64)
    live_deg = np.bincount(src, minlength=n)
    while True:
        into = attr[dst]
        hits = np.bincount(src[into], minlength=n)
        mine = alive & ~attr & (owner == player) & (hits > 0)
        theirs = alive & ~attr & (owner != player) & (hits == live_deg)
        new = mine | theirs
        if not new.any():
            return attr, strategy
        # first successor into the current layer, in CSR order
        pick = into & mine[src]
        if pick.any():
            e_src = src[pick]
            e_dst = dst[pick]
            first = np.unique(e_src, return_index=True)[1]
            strategy[e_src[first]] = e_dst[first]
        attr = attr | new


NUMPY_KERNELS = SimpleNamespace(
    name="numpy", diamond=_np_diamond, box=_np_box, attractor=_np_attractor
)


# ------------------------------------------------------------------ numba


@njit(cache=True)
def _nb_diamond(indptr, indices, mask):
    n = len(indptr) - 1
    out = np.zeros(n, dtype=np.bool_)
    for u in range(n):
        for k in range(indptr[u], indptr[u + 1]):
            if mask[indices[k]]:
                out[u] = True
                break
    return out


@njit(cache=True)
def _nb_box(indptr, indices, mask):
    n = len(indptr) - 1
    out = np.ones(n, dtype=np.bool_)
    for u in range(n):
        for k in range(indptr[u], indptr[u + 1]):
            if not mask[indices[k]]:
                out[u] = False
                break
    return out


@njit(cache=True)
def _nb_attractor_layers(indptr, indices, owner, alive, target, player):
    n = len(indptr) - 1
    attr = target & alive
    strategy = np.full(n, -1, dtype=np.int64)
    live_deg = np.zeros(n, dtype=np.int64)
    for u in range(n):
        if alive[u]:
            for k in range(indptr[u], indptr[u + 1]):
                if alive[indices[k]]:
                    live_deg[u] += 1
    new = np.zeros(n, dtype=np.bool_)
    while True:
        changed = False
        for u in range(n):
            new[u] = False
            if not alive[u] or attr[u]:
                continue
            hits = 0
            first = -1
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if alive[v] and attr[v]:
                    hits += 1
                    if first < 0:
                        first = v
            if owner[u] == player:
                if hits > 0:
                    new[u] = True
                    strategy[u] = first
            elif hits == live_deg[u]:
                new[u] = True
        for u in range(n):
            if new[u]:
                attr[u] = True
                changed = True
        if not changed:
            return attr, strategy


NUMBA_KERNELS = SimpleNamespace(
    name="numba", diamond=_nb_diamond, box=_nb_box, attractor=_nb_attractor_layers
)


def _select() -> SimpleNamespace:
    flag = os.environ.get("MUFUSION_PURE_NUMPY", "").strip().lower()
    if not HAVE_NUMBA or flag not in ("", "0", "false", "no"):
        return NUMPY_KERNELS
    return NUMBA_KERNELS


ACTIVE = _select()
diamond = ACTIVE.diamond
box = ACTIVE.box
attractor = ACTIVE.attractor
