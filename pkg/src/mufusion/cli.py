"""Command-line interface.

Exit codes: 0 ok, 1 the checked property is false, 2 usage or input error,
3 a verification pipeline found counterexamples.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .encoder import EncodeError, encode, resolve_witnesses, wn
from .evalgame import EvalGameError, build_eval_game, check_via_game
from .formula import FormulaSyntaxError, Mu, Nu, classify, parse, to_text
from .kripke import ModelError, PointedModel, isomorphic, model_to_json, n_isomorphic, read_model
from .paritygame import GameError, read_pg, solve, write_pg
from .pipelines import run_fixpoint, verify_oracle, verify_prop3, verify_prop4
from .semantics import EvaluationError, holds

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_COUNTER = 0, 1, 2, 3
INPUT_ERRORS = (
    FormulaSyntaxError, ModelError, GameError, EncodeError, EvalGameError,
    EvaluationError, OSError, ValueError, KeyError,
)


def _emit(args, text: str) -> None:
    out = getattr(args, "output", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text.rstrip("\n"))


def _pointed(path: str, world: Optional[str]) -> PointedModel:
    m, point = read_model(path)
    w = world if world is not None else point
    if w is None:
        raise ModelError(f"{path}: no world given and the file has no point")
    return PointedModel(m, w)


def _read_game(path: str):
    with open(path, encoding="utf-8") as fh:
        return read_pg(fh.read())


def cmd_parse(args) -> int:
    f = parse(args.formula)
    if args.json:
        lvl = classify(f)
        print(json.dumps({"formula": to_text(f), "sigma_level": lvl.sigma_level, "pi_level": lvl.pi_level}))
    else:
        print(to_text(f))
    return EXIT_OK


def cmd_depth(args) -> int:
    lvl = classify(parse(args.formula))
    if args.json:
        print(json.dumps({"sigma_level": lvl.sigma_level, "pi_level": lvl.pi_level}))
    else:
        print(f"sigma {lvl.sigma_level} pi {lvl.pi_level}")
    return EXIT_OK


def cmd_check(args) -> int:
    pm = _pointed(args.model, args.world)
    f = parse(args.formula)
    verdict = holds(pm, f) if args.method == "denotational" else check_via_game(pm, f)
    print(json.dumps({"holds": verdict}) if args.json else str(verdict).lower())
    return EXIT_OK if verdict else EXIT_FALSE


def cmd_solve(args) -> int:
    g = _read_game(args.game)
    s = solve(g)
    if args.json:
        print(json.dumps({
            "win_exists": sorted(s.win_exists),
            "win_forall": sorted(s.win_forall),
            "strategy_exists": {str(k): v for k, v in sorted(s.strategy_exists.items())},
            "strategy_forall": {str(k): v for k, v in sorted(s.strategy_forall.items())},
        }))
    else:
        print("exists " + " ".join(map(str, sorted(s.win_exists))))
        print("forall " + " ".join(map(str, sorted(s.win_forall))))
    return EXIT_OK


def cmd_evalgame(args) -> int:
    eg = build_eval_game(_pointed(args.model, args.world), parse(args.formula))
    _emit(args, write_pg(eg.game))
    return EXIT_OK


def cmd_encode(args) -> int:
    g = _read_game(args.game)
    wf = resolve_witnesses(args.witness, args.variant)
    strict = {"auto": None, "strict": True, "graph": False}[args.mode]
    enc = encode(g, wf, args.max_parity, strict)
    _emit(args, model_to_json(enc.model, enc.vertex_map[g.initial]))
    return EXIT_OK


def cmd_wn(args) -> int:
    op = {"default": None, "mu": Mu, "nu": Nu}[args.macro_fixpoint]
    _emit(args, to_text(wn(args.n, args.variant, op)))
    return EXIT_OK


def cmd_iso(args) -> int:
    a = _pointed(args.model_a, args.point_a)
    b = _pointed(args.model_b, args.point_b)
    iso = isomorphic(a, b) if args.n is None else n_isomorphic(a, b, args.n, args.undirected_distance)
    if args.json:
        print(json.dumps({"isomorphic": iso is not None,
                          "mapping": None if iso is None else dict(sorted(iso.mapping.items()))}))
    elif iso is None:
        print("not isomorphic")
    else:
        print("isomorphic")
        for x, y in sorted(iso.mapping.items()):
            print(f"{x} -> {y}")
    return EXIT_OK if iso is not None else EXIT_FALSE


def _report(args, rep) -> int:
    print(rep.to_json() if args.json else rep.summary())
    if not args.json:
        for c in rep.counterexamples[:5]:
            print("  counterexample: " + json.dumps(c, sort_keys=True))
    print(f"elapsed {rep.elapsed:.2f}s", file=sys.stderr)
    return EXIT_OK if rep.ok else EXIT_COUNTER


def cmd_verify(args) -> int:
    if args.pipeline == "oracle":
        rep = verify_oracle(args.trials, args.seed, args.max_worlds, args.max_fixpoints)
    elif args.pipeline == "prop3":
        tree = {"auto": None, "cyclic": False, "tree": True}[args.games]
        rep = verify_prop3(args.variant, args.witness, args.trials, args.seed, args.max_vertices,
                           args.max_parity, tree, not args.no_robustness)
    else:
        rep = verify_prop4(args.trials, args.seed, args.variant, args.witness,
                           args.max_worlds, args.max_fixpoints)
    return _report(args, rep)


def cmd_fixpoint(args) -> int:
    seed_model = _pointed(args.seed_model, args.world) if args.seed_model else None
    rep = run_fixpoint(parse(args.formula), seed_model, args.steps, args.variant, args.witness,
                       args.world_budget, args.undirected_distance)
    code = _report(args, rep)
    if rep.details["aborted"]:
        print(f"aborted: {rep.details['aborted']}", file=sys.stderr)
        return EXIT_INPUT if code == EXIT_OK else code
    return code


DEFAULT_TRIALS = {"oracle": 300, "prop3": 100, "prop4": 200}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mufusion", description="Multimodal mu-calculus workbench.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=False, variant=False, output=False):
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        if seed:
            sp.add_argument("--seed", type=int, default=7)
            sp.add_argument("--trials", type=int, default=None)
        if variant:
            sp.add_argument("--variant", type=int, choices=(1, 2, 3), default=1)
            sp.add_argument("--witness", default="minimal", help="minimal, s5 or file:<path>")
        if output:
            sp.add_argument("-o", "--output", help="write to a file instead of stdout")

    sp = sub.add_parser("parse", help="parse and pretty-print a formula")
    sp.add_argument("formula")
    common(sp)
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("depth", help="alternation-hierarchy levels of a formula")
    sp.add_argument("formula")
    common(sp)
    sp.set_defaults(func=cmd_depth)

    sp = sub.add_parser("check", help="model-check a formula at a world")
    sp.add_argument("model")
    sp.add_argument("world", nargs="?", help="defaults to the file's point")
    sp.add_argument("formula")
    sp.add_argument("--method", choices=("denotational", "game"), default="denotational")
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("solve", help="solve a PGSolver game")
    sp.add_argument("game")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("evalgame", help="emit the evaluation game as PGSolver text")
    sp.add_argument("model")
    sp.add_argument("world", nargs="?")
    sp.add_argument("formula")
    common(sp, output=True)
    sp.set_defaults(func=cmd_evalgame)

    sp = sub.add_parser("encode", help="encode a PGSolver game as a Kripke model")
    sp.add_argument("game")
    sp.add_argument("--max-parity", type=int, default=None)
    sp.add_argument("--mode", choices=("auto", "strict", "graph"), default="auto")
    common(sp, variant=True, output=True)
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("wn", help="emit the winning-region formula W_n")
    sp.add_argument("n", type=int)
    sp.add_argument("--macro-fixpoint", choices=("default", "mu", "nu"), default="default")
    common(sp, variant=True, output=True)
    sp.set_defaults(func=cmd_wn)

    sp = sub.add_parser("iso", help="(n-)isomorphism of two pointed models")
    sp.add_argument("model_a")
    sp.add_argument("model_b")
    sp.add_argument("--point-a")
    sp.add_argument("--point-b")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--undirected-distance", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_iso)

    sp = sub.add_parser("verify", help="run a seeded verification pipeline")
    sp.add_argument("pipeline", choices=("oracle", "prop3", "prop4"))
    sp.add_argument("--max-worlds", type=int, default=6)
    sp.add_argument("--max-fixpoints", type=int, default=3)
    sp.add_argument("--max-vertices", type=int, default=None)
    sp.add_argument("--max-parity", type=int, default=None)
    sp.add_argument("--games", choices=("auto", "cyclic", "tree"), default="auto")
    sp.add_argument("--no-robustness", action="store_true", help="skip the swapped-macro check")
    common(sp, seed=True, variant=True)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("fixpoint", help="iterate the encoded-evaluation-game map")
    sp.add_argument("formula")
    sp.add_argument("--seed-model", help="model file; default is one world with no edges")
    sp.add_argument("--world")
    sp.add_argument("--steps", type=int, default=3)
    sp.add_argument("--world-budget", type=int, default=10**5)
    sp.add_argument("--undirected-distance", action="store_true")
    common(sp, variant=True)
    sp.set_defaults(func=cmd_fixpoint)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if getattr(args, "trials", None) is None and args.command == "verify":
        args.trials = DEFAULT_TRIALS[args.pipeline]
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
