"""JSON encodings shared by the CLI and the file formats.

Complex numbers are ``[re, im]`` pairs and matrices are row-major nested
lists.  Python's float repr is the shortest string that round-trips, so
values survive a dump/load cycle bit for bit.
"""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .qcore import PureState, make_state


class DataFormatError(ValueError):
    """Input file does not match its documented JSON layout."""


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def decode_complex(pair) -> complex:
    re, im = pair
    return complex(float(re), float(im))


def encode_matrix(mat) -> list:
    mat = np.asarray(mat, dtype=complex)
    return [[encode_complex(z) for z in row] for row in mat]


def decode_matrix(rows) -> np.ndarray:
    return np.array([[decode_complex(z) for z in row] for row in rows], dtype=complex)


def encode_vector(vec) -> list:
    return [encode_complex(z) for z in np.asarray(vec, dtype=complex)]


@lru_cache(maxsize=None)
def schema(name: str) -> dict:
    text = resources.files("entgame").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(doc, name: str) -> None:
    try:
        jsonschema.validate(doc, schema(name))
    except jsonschema.ValidationError as exc:
        raise DataFormatError(f"{name}: {exc.message}") from None


def _read_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON ({exc})") from None


# -- states -------------------------------------------------------------------

def state_to_json(state: PureState) -> dict:
    return {"n": state.n_qubits, "amplitudes": encode_vector(state.amplitudes)}


def state_from_json(doc) -> PureState:
    validate(doc, "state")
    amps = [decode_complex(z) for z in doc["amplitudes"]]
    try:
        return make_state(doc["n"], amps)
    except ValueError as exc:
        raise DataFormatError(str(exc)) from None


def load_state(path) -> PureState:
    return state_from_json(_read_json(path))


# -- witnesses ----------------------------------------------------------------

def witness_to_json(assignment) -> dict:
    return {"pairs": [{"u": encode_matrix(u), "v": encode_matrix(v)} for u, v in assignment.pairs]}


def witness_from_json(doc):
    from .ortho import OperatorAssignment

    validate(doc, "witness")
    pairs = tuple((decode_matrix(p["u"]), decode_matrix(p["v"])) for p in doc["pairs"])
    try:
        return OperatorAssignment(pairs)
    except ValueError as exc:
        raise DataFormatError(f"witness: {exc}") from None


def load_witness(path):
    return witness_from_json(_read_json(path))


# -- games --------------------------------------------------------------------

def load_game(path):
    from .game import GameSpec

    doc = _read_json(path)
    validate(doc, "game")
    try:
        return GameSpec.from_json(doc)
    except ValueError as exc:
        raise DataFormatError(str(exc)) from None


def fixture_path(name: str) -> Path:
    """Path of a file shipped in ``entgame/data``."""
    return Path(str(resources.files("entgame").joinpath("data", name)))
