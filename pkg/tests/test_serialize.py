import json

import numpy as np
import pytest

from qcausal.channels import KrausChannel, choi, choi_distance
from qcausal.games import and_box_channel
from qcausal.linalg import BiDims
from qcausal.measurements import bell_basis, incomplete_bell_channel
from qcausal.serialize import (
    ParseError,
    basis_from_json,
    basis_to_json,
    channel_from_json,
    channel_to_json,
    dump_document,
    load_document,
    matrix_from_json,
    matrix_to_json,
)


def test_matrix_round_trip(rng):
    m = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    doc = matrix_to_json(m)
    assert doc["rows"] == 3 and doc["cols"] == 4 and len(doc["data"]) == 12
    back = matrix_from_json(json.loads(json.dumps(doc)))
    assert np.allclose(back, m)


def test_vector_encodes_as_column():
    doc = matrix_to_json(np.array([1j, 2.0]))
    assert doc["rows"] == 2 and doc["cols"] == 1


def test_matrix_rejects_bad_documents():
    with pytest.raises(ParseError):
        matrix_from_json({"rows": 2, "cols": 2, "data": [[1, 0]]})
    with pytest.raises(ParseError):
        matrix_from_json({"rows": 2, "data": []})
    with pytest.raises(ParseError):
        matrix_from_json({"rows": 1, "cols": 1, "data": [["x", 0]]})


def test_channel_round_trip():
    ch = and_box_channel()
    back = channel_from_json(json.loads(json.dumps(channel_to_json(ch))))
    assert back.dims == ch.dims
    assert choi_distance(choi(back), choi(ch)) < 1e-12


def test_basis_round_trip():
    basis = bell_basis()
    back = basis_from_json(json.loads(json.dumps(basis_to_json(basis))))
    assert back.dims == basis.dims
    for u, v in zip(back.vectors, basis.vectors):
        assert np.allclose(u, v)


def test_basis_rejects_non_orthonormal():
    doc = basis_to_json(bell_basis())
    doc["vectors"][1] = doc["vectors"][0]
    with pytest.raises(ParseError):
        basis_from_json(doc)


def test_load_document_auto_detects(tmp_path):
    p1 = tmp_path / "channel.json"
    dump_document(incomplete_bell_channel(), str(p1))
    obj = load_document(str(p1))
    assert isinstance(obj, KrausChannel)
    p2 = tmp_path / "basis.json"
    dump_document(bell_basis(), str(p2))
    obj = load_document(str(p2))
    assert obj.dims == BiDims(2, 2) and len(obj.vectors) == 4


def test_load_document_errors(tmp_path):
    missing = tmp_path / "nope.json"
    with pytest.raises(ParseError):
        load_document(str(missing))
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2, 3]")
    with pytest.raises(ParseError):
        load_document(str(bad))
    empty = tmp_path / "empty.json"
    empty.write_text("{}")
    with pytest.raises(ParseError):
        load_document(str(empty))
