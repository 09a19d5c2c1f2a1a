"""Command-line front end.

Every command prints one JSON run record on stdout.  Exit codes::

    0   success / feasible / pass
    2   infeasible (classify)
    3   undetermined / fail
    4   product state rejected
    64  usage error
    65  malformed input data
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import platform
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np
import scipy

from . import __version__
from .classify import ProductStateError, Status, classify_state
from .game import classical_payoff, play_quantum
from .io import DataFormatError, encode_matrix, load_game, load_witness, validate
from .oracles import CHECKS, run_check
from .ortho import (
    FEASIBILITY_TOL,
    NotDistinguishableError,
    assignment_residual,
    gram_matrix,
    joint_index,
    max_offdiagonal,
    orthonormal_completion,
    output_states,
    referee_projectors,
)
from .search import SearchConfig, SearchError, optimize, residual_profile
from .states import GHZ, Dicke, W, parse_state_spec

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_FAIL = 3
EXIT_PRODUCT = 4
EXIT_USAGE = 64
EXIT_DATA = 65


class UsageError(Exception):
    pass


@dataclass
class RunRecord:
    command: str
    inputs: dict
    result: dict
    versions: dict
    wall_time: float
    seed: int | None = None

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, doc: dict) -> "RunRecord":
        return cls(**doc)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, allow_nan=False)


def versions() -> dict:
    return {"entgame": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _search_flags(p):
    p.add_argument("--starts", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=FEASIBILITY_TOL)
    p.add_argument("--max-iter", type=int, default=3000)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="entgame", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="analytic verdict for a state family")
    p.add_argument("state", help="dicke:N,m | ghz:N[,phase] | w:N | file:PATH")
    p.add_argument("--search", action="store_true", help="search custom states for a witness")
    _search_flags(p)

    p = sub.add_parser("search", help="multistart witness search")
    p.add_argument("state")
    _search_flags(p)

    p = sub.add_parser("verify", help="check a witness file against a state")
    p.add_argument("state")
    p.add_argument("witness")
    p.add_argument("--tol", type=float, default=FEASIBILITY_TOL)

    p = sub.add_parser("play", help="run the quantum game for one joint strategy")
    p.add_argument("state")
    p.add_argument("witness")
    p.add_argument("game")
    p.add_argument("--choices", required=True, help="comma separated 1/2 per player")
    p.add_argument("--require-classical", action="store_true")
    p.add_argument("--tol", type=float, default=FEASIBILITY_TOL)

    p = sub.add_parser("oracle", help="closed-form overlap formulas vs brute force")
    p.add_argument("--check", required=True, choices=CHECKS)
    p.add_argument("--draws", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=None)

    p = sub.add_parser("profile", help="search residual floor across sizes")
    p.add_argument("family", choices=["w", "ghz", "dicke-half"])
    p.add_argument("--sizes", required=True, help="comma separated qubit counts")
    p.add_argument("--out", choices=["json", "csv"], default="json")
    _search_flags(p)
    return parser


def _state(text):
    try:
        return parse_state_spec(text)
    except DataFormatError:
        raise
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _config(args) -> SearchConfig:
    return SearchConfig(starts=args.starts, max_iterations=args.max_iter, tol=args.tol, seed=args.seed)


def _cmd_classify(args):
    family = _state(args.state)
    verdict = classify_state(family, _config(args) if args.search else None)
    code = {Status.FEASIBLE: EXIT_OK, Status.INFEASIBLE: EXIT_INFEASIBLE,
            Status.UNDETERMINED: EXIT_FAIL}[verdict.status]
    doc = verdict.to_json()
    validate(doc, "verdict")
    return {"state": args.state, "search": args.search}, doc, code, (args.seed if args.search else None)


def _cmd_search(args):
    state = _state(args.state).build()
    try:
        result = optimize(state, _config(args))
    except SearchError as exc:
        raise UsageError(str(exc)) from None
    doc = result.to_json()
    validate(doc, "search_result")
    inputs = {"state": args.state, "starts": args.starts, "tol": args.tol, "max_iter": args.max_iter}
    return inputs, doc, EXIT_OK if result.converged else EXIT_FAIL, args.seed


def _load_matching_witness(path, state):
    witness = load_witness(path)
    if witness.n_players != state.n_qubits:
        raise DataFormatError(
            f"witness has {witness.n_players} players, state has {state.n_qubits} qubits")
    return witness


def _cmd_verify(args):
    state = _state(args.state).build()
    witness = _load_matching_witness(args.witness, state)
    g = gram_matrix(state, witness)
    worst = max_offdiagonal(g)
    ok = worst <= args.tol
    doc = {"max_offdiagonal": worst, "residual": assignment_residual(state, witness),
           "tol": args.tol, "pass": ok}
    return {"state": args.state, "witness": args.witness}, doc, EXIT_OK if ok else EXIT_FAIL, None


def _cmd_play(args):
    state = _state(args.state).build()
    witness = _load_matching_witness(args.witness, state)
    game = load_game(args.game)
    try:
        choices = [int(c) for c in args.choices.split(",")]
        index = joint_index(choices)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if len(choices) != state.n_qubits or game.players != state.n_qubits:
        raise DataFormatError("state, game and choices disagree on the number of players")
    try:
        projectors = referee_projectors(state, witness, args.tol)
        basis = "referee"
    except NotDistinguishableError:
        if args.require_classical:
            raise
        projectors = orthonormal_completion(output_states(state, witness))
        basis = "completion"
    result = play_quantum(state, witness.operators_for(index.k), projectors, game)
    doc = {**result.to_json(), "k": index.k, "referee_basis": basis,
           "classical_payoffs": classical_payoff(game, choices).tolist()}
    inputs = {"state": args.state, "witness": args.witness, "game": args.game,
              "choices": choices, "require_classical": args.require_classical}
    return inputs, doc, EXIT_OK, None


def _cmd_oracle(args):
    params = {}
    if args.check != "phase":
        params["seed"] = args.seed
        if args.draws is not None:
            params["draws"] = args.draws
    if args.n is not None:
        params["n"] = args.n
    try:
        report = run_check(args.check, **params)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    inputs = {"check": args.check, "draws": args.draws, "n": args.n}
    return inputs, report.to_json(), EXIT_OK, args.seed


_FAMILIES = {
    "w": W,
    "ghz": GHZ,
    "dicke-half": lambda n: Dicke(n, n // 2),
}


def _cmd_profile(args):
    try:
        sizes = [int(s) for s in args.sizes.split(",")]
    except ValueError:
        raise UsageError(f"bad --sizes {args.sizes!r}") from None
    make = _FAMILIES[args.family]
    try:
        rows = residual_profile(lambda n: make(n).build(), sizes, _config(args))
    except (SearchError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    table = [{"n": n, "best_residual": j, "converged": c} for n, j, c in rows]
    inputs = {"family": args.family, "sizes": sizes, "starts": args.starts, "tol": args.tol,
              "max_iter": args.max_iter}
    return inputs, {"rows": table}, EXIT_OK, args.seed


COMMANDS = {
    "classify": _cmd_classify, "search": _cmd_search, "verify": _cmd_verify,
    "play": _cmd_play, "oracle": _cmd_oracle, "profile": _cmd_profile,
}


def rows_to_csv(rows: list[dict]) -> str:
    buf = _io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["n", "best_residual", "converged"], lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({**row, "best_residual": repr(row["best_residual"])})
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        inputs, result, code, seed = COMMANDS[args.command](args)
    except ProductStateError as exc:
        print(f"entgame: product state rejected: {exc}", file=sys.stderr)
        return EXIT_PRODUCT
    except DataFormatError as exc:
        print(f"entgame: bad input data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NotDistinguishableError as exc:
        print(f"entgame: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except UsageError as exc:
        print(f"entgame: {exc}", file=sys.stderr)
        return EXIT_USAGE
    record = RunRecord(args.command, inputs, result, versions(),
                       time.perf_counter() - start, seed)
    if getattr(args, "out", "json") == "csv":
        sys.stdout.write(rows_to_csv(result["rows"]))
    else:
        doc = record.to_json()
        validate(doc, "run_record")
        print(record.dumps())
    return code


if __name__ == "__main__":
    sys.exit(main())
