import json

import numpy as np
import pytest

from entgame.classify import ghz_witness, halfhalf4_witness
from entgame.io import (
    DataFormatError,
    decode_matrix,
    encode_matrix,
    fixture_path,
    load_game,
    load_state,
    load_witness,
    state_from_json,
    state_to_json,
    validate,
    witness_from_json,
    witness_to_json,
)
from entgame.ortho import gram_matrix, max_offdiagonal
from entgame.states import dicke, ghz, random_state, random_unitary


def test_matrix_roundtrip_exact(rng):
    m = random_unitary(rng)
    back = decode_matrix(json.loads(json.dumps(encode_matrix(m))))
    assert np.array_equal(back, m)


def test_state_roundtrip_exact():
    s = random_state(4, 31)
    back = state_from_json(json.loads(json.dumps(state_to_json(s))))
    assert np.array_equal(back.amplitudes, s.amplitudes)


def test_witness_roundtrip_exact():
    w = ghz_witness(3, 0.7)
    back = witness_from_json(json.loads(json.dumps(witness_to_json(w))))
    for (u, v), (u2, v2) in zip(w.pairs, back.pairs):
        assert np.array_equal(u, u2) and np.array_equal(v, v2)


@pytest.mark.parametrize("doc", [
    {"n": 1, "amplitudes": [[1, 0]]},
    {"n": 1, "amplitudes": [[1, 0], [0]]},
    {"amplitudes": [[1, 0], [0, 0]]},
    {"n": 1, "amplitudes": [[3, 0], [0, 0]]},
])
def test_bad_state(doc):
    with pytest.raises(DataFormatError):
        state_from_json(doc)


def test_bad_witness():
    with pytest.raises(DataFormatError):
        witness_from_json({"pairs": [{"u": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}]})
    non_unitary = {"pairs": [{"u": encode_matrix(np.eye(2)), "v": encode_matrix(2 * np.eye(2))}]}
    with pytest.raises(DataFormatError):
        witness_from_json(non_unitary)


def test_invalid_json_file(tmp_path):
    path = tmp_path / "x.json"
    path.write_text("{nope")
    with pytest.raises(DataFormatError):
        load_state(path)


def test_game_row_count(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"players": 2, "payoffs": [[0, 0]] * 3}))
    with pytest.raises(DataFormatError):
        load_game(path)


def test_fixture_witnesses():
    w = load_witness(fixture_path("dicke42_witness.json"))
    ref = halfhalf4_witness()
    for (u, v), (u2, v2) in zip(w.pairs, ref.pairs):
        assert np.allclose(u, u2) and np.allclose(v, v2)
    assert max_offdiagonal(gram_matrix(dicke(4, 2), w)) <= 1e-12
    assert max_offdiagonal(gram_matrix(ghz(3), load_witness(fixture_path("ghz3_witness.json")))) <= 1e-12


def test_schema_rejects_extra_status():
    with pytest.raises(DataFormatError):
        validate({"status": "Maybe", "reason": "x", "witness": None, "residual": None,
                  "certificate": None}, "verdict")
