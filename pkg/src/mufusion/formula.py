"""Multimodal mu-calculus syntax: AST, text parser/printer, renaming and the
alternation-hierarchy classifier."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Union


class Formula:
    """Base class for formula nodes. Nodes are immutable and hashable."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)


@dataclass(frozen=True, repr=False)
class Prop(Formula):
    name: str
    positive: bool = True

    def __repr__(self) -> str:
        return f"Prop({self.name!r}{'' if self.positive else ', False'})"


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self) -> str:
        return "Top()"


@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    def __repr__(self) -> str:
        return "Bottom()"


@dataclass(frozen=True)
class Var(Formula):
    name: str


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    index: int
    body: Formula


@dataclass(frozen=True)
class Dia(Formula):
    index: int
    body: Formula


@dataclass(frozen=True)
class Mu(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Nu(Formula):
    var: str
    body: Formula


Fixpoint = Union[Mu, Nu]
TOP = Top()
BOTTOM = Bottom()


def neg(name: str) -> Prop:
    return Prop(name, False)


def conj(*fs: Formula) -> Formula:
    """Right-nested conjunction; empty conjunction is Top."""
    if not fs:
        return TOP
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def disj(*fs: Formula) -> Formula:
    if not fs:
        return BOTTOM
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Or(f, out)
    return out


def is_fixpoint(f: Formula) -> bool:
    return isinstance(f, (Mu, Nu))


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (And, Or)):
        return (f.left, f.right)
    if isinstance(f, (Box, Dia, Mu, Nu)):
        return (f.body,)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal, one item per node occurrence."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Var):
        return frozenset((f.name,))
    if isinstance(f, (Mu, Nu)):
        return free_vars(f.body) - {f.var}
    out: frozenset[str] = frozenset()
    for c in children(f):
        out |= free_vars(c)
    return out


def bound_vars(f: Formula) -> list[str]:
    """Binder names in pre-order, with repetitions."""
    return [g.var for g in subformulas(f) if isinstance(g, (Mu, Nu))]


def modal_indices(f: Formula) -> frozenset[int]:
    return frozenset(g.index for g in subformulas(f) if isinstance(g, (Box, Dia)))


def props(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Prop))


def is_closed(f: Formula) -> bool:
    return not free_vars(f)


def is_rename_apart(f: Formula) -> bool:
    names = bound_vars(f)
    return len(names) == len(set(names)) and not (set(names) & free_vars(f))


def substitute_var(f: Formula, name: str, repl: Formula) -> Formula:
    """Replace free occurrences of variable `name` by `repl` (no capture check)."""
    if isinstance(f, Var):
        return repl if f.name == name else f
    if isinstance(f, (Mu, Nu)):
        if f.var == name:
            return f
        return type(f)(f.var, substitute_var(f.body, name, repl))
    if isinstance(f, (And, Or)):
        return type(f)(substitute_var(f.left, name, repl), substitute_var(f.right, name, repl))
    if isinstance(f, (Box, Dia)):
        return type(f)(f.index, substitute_var(f.body, name, repl))
    return f


def _fresh(base: str, used: set[str]) -> str:
    k = 1
    while f"{base}{k}" in used:
        k += 1
    name = f"{base}{k}"
    used.add(name)
    return name


def fresh_var(f: Formula, base: str = "Y") -> str:
    used = set(bound_vars(f)) | set(free_vars(f))
    if base not in used:
        return base
    return _fresh(base, used)


def rename_apart(f: Formula) -> Formula:
    """Alpha-rename so that binder names are pairwise distinct and distinct
    from free variables. Binders whose name is already unique are kept."""
    names = bound_vars(f)
    free = free_vars(f)
    clashing = {n for n in names if names.count(n) > 1 or n in free}
    if not clashing:
        return f
    used = set(names) | set(free)

    def go(g: Formula, env: dict[str, str]) -> Formula:
        if isinstance(g, Var):
            return Var(env.get(g.name, g.name))
        if isinstance(g, (Mu, Nu)):
            new = _fresh(g.var, used) if g.var in clashing else g.var
            return type(g)(new, go(g.body, {**env, g.var: new}))
        if isinstance(g, (And, Or)):
            return type(g)(go(g.left, env), go(g.right, env))
        if isinstance(g, (Box, Dia)):
            return type(g)(g.index, go(g.body, env))
        return g

    return go(f, {})


def binder_of(f: Formula, var: str) -> Fixpoint:
    """The unique fixpoint subformula of `f` binding `var`."""
    for g in subformulas(f):
        if isinstance(g, (Mu, Nu)) and g.var == var:
            return g
    raise KeyError(f"variable {var!r} is not bound in formula")


def dual(f: Formula) -> Formula:
    """Syntactic negation with variables left in place: swaps and/or, box/dia,
    mu/nu, true/false and flips literals. For closed f this is the negation."""
    if isinstance(f, Prop):
        return Prop(f.name, not f.positive)
    if isinstance(f, Top):
        return BOTTOM
    if isinstance(f, Bottom):
        return TOP
    if isinstance(f, Var):
        return f
    if isinstance(f, And):
        return Or(dual(f.left), dual(f.right))
    if isinstance(f, Or):
        return And(dual(f.left), dual(f.right))
    if isinstance(f, Box):
        return Dia(f.index, dual(f.body))
    if isinstance(f, Dia):
        return Box(f.index, dual(f.body))
    if isinstance(f, Mu):
        return Nu(f.var, dual(f.body))
    if isinstance(f, Nu):
        return Mu(f.var, dual(f.body))
    raise TypeError(f)


def implies(antecedent: Formula, consequent: Formula) -> Formula:
    """`a -> b` for a propositional antecedent, as `dual(a) | b`."""
    if not _is_propositional(antecedent):
        raise ValueError("implication needs a propositional antecedent")
    return Or(dual(antecedent), consequent)


def _is_propositional(f: Formula) -> bool:
    if isinstance(f, (Prop, Top, Bottom)):
        return True
    if isinstance(f, (And, Or)):
        return _is_propositional(f.left) and _is_propositional(f.right)
    return False


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


# ---------------------------------------------------------------- hierarchy


class HierarchyLevel(NamedTuple):
    sigma_level: int
    pi_level: int


def _chain_lengths(f: Formula) -> dict[int, tuple[Formula, int]]:
    """Longest alternating dependency chain headed at each fixpoint node,
    keyed by id(node).

    A fixpoint d below s stays inside s (cannot be substituted out of it)
    when every fixpoint on the path from s down to d, d included, has a
    free variable bound on that path above it. A chain continues from s to
    such a d of the opposite type. Closed or otherwise independent blocks
    are cut off together with everything below them.
    """
    fv: dict[int, frozenset[str]] = {}

    def free(g: Formula) -> frozenset[str]:
        if isinstance(g, Var):
            out = frozenset((g.name,))
        elif isinstance(g, (Mu, Nu)):
            out = free(g.body) - {g.var}
        else:
            out = frozenset()
            for c in children(g):
                out |= free(c)
        fv[id(g)] = out
        return out

    free(f)
    out: dict[int, tuple[Formula, int]] = {}

    def length(s: Formula) -> int:
        hit = out.get(id(s))
        if hit is not None:
            return hit[1]
        best = 0
        stack = [(s.body, frozenset((s.var,)))]
        while stack:
            g, bound = stack.pop()
            if isinstance(g, (Mu, Nu)):
                if not fv[id(g)] & bound:
                    continue
                if type(g) is not type(s):
                    best = max(best, length(g))
                bound = bound | {g.var}
            stack.extend((c, bound) for c in children(g))
        out[id(s)] = (s, best + 1)
        return best + 1

    for g in subformulas(f):
        if isinstance(g, (Mu, Nu)):
            length(g)
    return out


def classify(f: Formula) -> HierarchyLevel:
    """Least n with f in Sigma_n and least n with f in Pi_n."""
    f = rename_apart(f)
    chains = _chain_lengths(f).values()
    if not chains:
        return HierarchyLevel(0, 0)
    top = max(length for _, length in chains)
    heads = {type(node) for node, length in chains if length == top}
    sigma = top if heads == {Mu} else top + 1
    pi = top if heads == {Nu} else top + 1
    return HierarchyLevel(sigma, pi)


def fixpoint_priorities(f: Formula) -> dict[int, int]:
    """Parity-game priority for every fixpoint node of `f`, keyed by id(node).

    A mu node heading a dependency chain of length k gets the largest odd
    number <= k, a nu node the largest even number <= k. Chain length is the
    node's own level; independent (substitutable) parts below it do not count.
    """
    out = {}
    for key, (node, length) in _chain_lengths(f).items():
        if isinstance(node, Mu):
            out[key] = length if length % 2 == 1 else length - 1
        else:
            out[key] = length if length % 2 == 0 else length - 1
    return out


def priority_of(f: Formula, sub: Formula) -> int:
    """Priority of the fixpoint subformula `sub` (an occurrence inside `f`,
    matched by identity first, then structurally)."""
    if not isinstance(sub, (Mu, Nu)):
        raise ValueError("priority_of needs a fixpoint subformula")
    prios = fixpoint_priorities(f)
    if id(sub) in prios:
        return prios[id(sub)]
    for g in subformulas(f):
        if g == sub:
            return prios[id(g)]
    raise ValueError("not a subformula")


# ------------------------------------------------------------- text syntax


class FormulaSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(
    r"""\s*(?:
        (?P<arrow>->)
      | (?P<sym>[&|~().\[\]<>])
      | (?P<num>\d+)
      | (?P<ident>@[A-Za-z0-9_]+|[A-Za-z][A-Za-z0-9_]*)
    )""",
    re.VERBOSE,
)
_KEYWORDS = {"mu", "nu", "true", "false"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        toks.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, val, pos = self.take()
        if val != value or kind == "ident":
            raise FormulaSyntaxError(f"expected {value!r}, got {val or 'end of input'!r}", pos)

    def at(self, value: str) -> bool:
        kind, val, _ = self.peek()
        return val == value and kind in ("sym", "arrow")

    def parse(self) -> Formula:
        f = self.implication()
        kind, val, pos = self.peek()
        if kind != "eof":
            raise FormulaSyntaxError(f"unexpected {val!r}", pos)
        return f

    def implication(self) -> Formula:
        pos = self.peek()[2]
        left = self.disjunction()
        if self.at("->"):
            self.take()
            right = self.implication()
            if not _is_propositional(left):
                raise FormulaSyntaxError("implication with non-propositional antecedent", pos)
            return Or(dual(left), right)
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.at("|"):
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.at("&"):
            self.take()
            f = And(f, self.unary())
        return f

    def modal_index(self, close: str) -> int:
        kind, val, pos = self.take()
        if kind != "num":
            raise FormulaSyntaxError("expected modality index", pos)
        self.expect(close)
        return int(val)

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "sym" and val == "~":
            self.take()
            kind, val, p2 = self.take()
            if kind == "ident" and _is_prop_name(val):
                return Prop(val, False)
            raise FormulaSyntaxError("negation applied to a non-proposition", p2)
        if kind == "sym" and val == "<":
            self.take()
            return Dia(self.modal_index(">"), self.unary())
        if kind == "sym" and val == "[":
            self.take()
            return Box(self.modal_index("]"), self.unary())
        if kind == "ident" and val in ("mu", "nu"):
            self.take()
            kind2, name, p2 = self.take()
            if kind2 != "ident" or not _is_var_name(name):
                raise FormulaSyntaxError("expected variable after binder", p2)
            self.expect(".")
            body = self.implication()
            return Mu(name, body) if val == "mu" else Nu(name, body)
        return self.primary()

    def primary(self) -> Formula:
        kind, val, pos = self.take()
        if kind == "sym" and val == "(":
            f = self.implication()
            self.expect(")")
            return f
        if kind == "ident":
            if val == "true":
                return TOP
            if val == "false":
                return BOTTOM
            if val in _KEYWORDS:
                raise FormulaSyntaxError(f"misplaced keyword {val!r}", pos)
            if _is_var_name(val):
                return Var(val)
            return Prop(val)
        raise FormulaSyntaxError(f"unexpected {val or 'end of input'!r}", pos)


def _is_var_name(name: str) -> bool:
    return name[0].isupper()


def _is_prop_name(name: str) -> bool:
    return (name[0] == "@" or name[0].islower()) and name not in _KEYWORDS


def parse(text: str) -> Formula:
    """Parse the ASCII concrete syntax, e.g. ``mu X. (p | <0> X)``."""
    return _Parser(text).parse()


# precedence: binders 0, | 1, & 2, unary 3
def _prec(f: Formula) -> int:
    if isinstance(f, (Mu, Nu)):
        return 0
    if isinstance(f, Or):
        return 1
    if isinstance(f, And):
        return 2
    return 3


def to_text(f: Formula) -> str:
    """Render in the concrete syntax accepted by `parse`."""

    def wrap(g: Formula, need: int, tail: bool) -> tuple[str, bool]:
        s, open_end = go(g)
        # binders extend maximally to the right: an open binder at the end of
        # a non-tail operand must be closed off
        if _prec(g) < need or (open_end and not tail):
            return f"({s})", False
        return s, open_end

    def binary(g, op: str, prec: int) -> tuple[str, bool]:
        left, _ = wrap(g.left, prec, False)
        right, open_end = wrap(g.right, prec + 1, True)
        return f"{left} {op} {right}", open_end

    def go(g: Formula) -> tuple[str, bool]:
        if isinstance(g, Prop):
            return (g.name if g.positive else f"~{g.name}"), False
        if isinstance(g, Top):
            return "true", False
        if isinstance(g, Bottom):
            return "false", False
        if isinstance(g, Var):
            return g.name, False
        if isinstance(g, Or):
            return binary(g, "|", 1)
        if isinstance(g, And):
            return binary(g, "&", 2)
        if isinstance(g, (Dia, Box)):
            body, open_end = wrap(g.body, 3, True)
            head = f"<{g.index}>" if isinstance(g, Dia) else f"[{g.index}]"
            return head + body, open_end
        if isinstance(g, (Mu, Nu)):
            body, _ = go(g.body)
            return f"{'mu' if isinstance(g, Mu) else 'nu'} {g.var}. {body}", True
        raise TypeError(g)

    return go(f)[0]
