"""Multimodal mu-calculus workbench: model checking, parity games, and the
encoding of parity games into fused Kripke models."""

from .encoder import (
    Encoding,
    WitnessFrames,
    blacklozenge,
    blacksquare,
    encode,
    encode_eval,
    minimal_witnesses,
    s5_witnesses,
    wn,
)
from .evalgame import build_eval_game, check_via_game
from .formula import Formula, HierarchyLevel, classify, parse, priority_of, rename_apart, to_text
from .kripke import KripkeModel, PointedModel, isomorphic, n_isomorphic, restrict
from .paritygame import ParityGame, read_pg, solve, unfold, winning_positions, write_pg
from .semantics import evaluate, holds

__all__ = [
    "Encoding", "WitnessFrames", "blacklozenge", "blacksquare", "encode", "encode_eval",
    "minimal_witnesses", "s5_witnesses", "wn", "build_eval_game", "check_via_game",
    "Formula", "HierarchyLevel", "classify", "parse", "priority_of", "rename_apart", "to_text",
    "KripkeModel", "PointedModel", "isomorphic", "n_isomorphic", "restrict",
    "ParityGame", "read_pg", "solve", "unfold", "winning_positions", "write_pg",
    "evaluate", "holds",
]
