"""Denotational model checking by Kleene iteration."""

from __future__ import annotations

from typing import Mapping, Optional

import numpy as np

from . import kernels
from .formula import And, Bottom, Box, Dia, Formula, Mu, Nu, Or, Prop, Top, Var
from .kripke import IndexedModel, KripkeModel, PointedModel, World


class EvaluationError(ValueError):
    pass


def _free_var_table(f: Formula) -> dict[int, tuple[str, ...]]:
    out: dict[int, tuple[str, ...]] = {}

    def go(g: Formula) -> frozenset[str]:
        if isinstance(g, Var):
            fv = frozenset((g.name,))
        elif isinstance(g, (And, Or)):
            fv = go(g.left) | go(g.right)
        elif isinstance(g, (Dia, Box)):
            fv = go(g.body)
        elif isinstance(g, (Mu, Nu)):
            fv = go(g.body) - {g.var}
        else:
            fv = frozenset()
        out[id(g)] = tuple(sorted(fv))
        return fv

    go(f)
    return out


def _leq_all(a, b) -> bool:
    return all(not np.any(x & ~y) for x, y in zip(a, b))


def evaluate_mask(
    im: IndexedModel, f: Formula, env: Optional[Mapping[str, np.ndarray]] = None
) -> np.ndarray:
    """‖f‖ as a bool mask over ``im.names``. `env` maps variables to masks;
    variables missing from `env` fall back to the model's valuation, which is
    how augmented models M[X:=A] are read.

    Fixpoints are computed by Kleene iteration. Each fixpoint node remembers
    its last result together with the values of its free variables: an equal
    environment returns the cached set, and since variables only occur
    positively a larger (for mu) or smaller (for nu) environment lets the
    iteration resume from the cached set instead of from the bottom or top.
    """
    n = im.n
    sig = im.model.signature
    fvs = _free_var_table(f)
    memo: dict[int, tuple[tuple[np.ndarray, ...], np.ndarray]] = {}

    def lookup(name: str, env) -> np.ndarray:
        if name in env:
            return env[name]
        if name in im.model.valuation:
            return im.prop_mask(name)
        raise EvaluationError(f"unbound variable {name}")

    def go(g: Formula, env: Mapping[str, np.ndarray]) -> np.ndarray:
        if isinstance(g, Prop):
            m = im.prop_mask(g.name)
            return m if g.positive else ~m
        if isinstance(g, Var):
            return lookup(g.name, env)
        if isinstance(g, And):
            return go(g.left, env) & go(g.right, env)
        if isinstance(g, Or):
            return go(g.left, env) | go(g.right, env)
        if isinstance(g, (Dia, Box)):
            if g.index not in sig:
                raise EvaluationError(f"unknown modality index {g.index}")
            indptr, indices = im.csr[g.index]
            body = go(g.body, env)
            if isinstance(g, Dia):
                return kernels.diamond(indptr, indices, body)
            return kernels.box(indptr, indices, body)
        if isinstance(g, (Mu, Nu)):
            least = isinstance(g, Mu)
            key = tuple(lookup(v, env) for v in fvs[id(g)])
            cur = None
            hit = memo.get(id(g))
            if hit is not None:
                old_key, old = hit
                if all(np.array_equal(a, b) for a, b in zip(old_key, key)):
                    return old
                if (least and _leq_all(old_key, key)) or (not least and _leq_all(key, old_key)):
                    cur = old
            if cur is None:
                cur = np.zeros(n, dtype=np.bool_) if least else np.ones(n, dtype=np.bool_)
            while True:
                nxt = go(g.body, {**env, g.var: cur})
                if np.array_equal(nxt, cur):
                    break
                cur = nxt
            memo[id(g)] = (key, cur)
            return cur
        if isinstance(g, Top):
            return np.ones(n, dtype=np.bool_)
        if isinstance(g, Bottom):
            return np.zeros(n, dtype=np.bool_)
        raise TypeError(g)

    return go(f, dict(env or {}))


def evaluate(
    m: KripkeModel, f: Formula, env: Optional[Mapping[str, frozenset[World]]] = None
) -> frozenset[World]:
    """The set of worlds of `m` satisfying `f` under `env`."""
    im = m.indexed()
    masks = {}
    for var, ws in (env or {}).items():
        ws = frozenset(ws)
        if not ws <= m.worlds:
            raise EvaluationError(f"environment binds {var} to unknown worlds")
        masks[var] = im.mask(ws)
    return im.worlds_of(evaluate_mask(im, f, masks))


def holds(pm: PointedModel, f: Formula) -> bool:
    im = pm.model.indexed()
    return bool(evaluate_mask(im, f)[im.index[pm.point]])
