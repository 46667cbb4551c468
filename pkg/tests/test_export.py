"""Deterministic serialization helpers."""

import json
import math

import numpy as np
import pytest

from qskyrm.export import (
    canonical_bytes,
    config_hash,
    jsonable,
    write_csv,
    write_json,
    write_pgm,
)


def test_jsonable_handles_numpy_and_nan():
    doc = jsonable(
        {
            "arr": np.array([1.0, np.nan, 3.0]),
            "i": np.int64(4),
            "z": 1.0 + 2.0j,
            "nested": (True, None, "x"),
        }
    )
    assert doc["arr"] == [1.0, None, 3.0]
    assert doc["i"] == 4
    assert doc["z"] == [1.0, 2.0]
    assert doc["nested"] == [True, None, "x"]
    with pytest.raises(TypeError):
        jsonable(object())


def test_config_hash_is_order_insensitive():
    a = config_hash({"x": 1, "y": [2.5, 3]})
    b = config_hash({"y": [2.5, 3], "x": 1})
    assert a == b
    assert a != config_hash({"x": 1, "y": [2.5, 4]})
    assert canonical_bytes({"x": 1}) == b'{"x":1}'


def test_write_json_round_trips_floats(tmp_path):
    path = tmp_path / "doc.json"
    write_json(path, {"v": 0.1 + 0.2, "n": float("nan")})
    doc = json.loads(path.read_text())
    assert doc["v"] == 0.1 + 0.2
    assert doc["n"] is None


def test_write_csv_formats(tmp_path):
    path = tmp_path / "t.csv"
    write_csv(path, ["a", "b", "c"], [[1, math.pi, True], [2, float("nan"), False]])
    lines = path.read_text().splitlines()
    assert lines[0] == "a,b,c"
    assert lines[1] == f"1,{math.pi!r},true"
    assert lines[2] == "2,nan,false"


def test_write_pgm_format_and_sidecar(tmp_path):
    path = tmp_path / "img.pgm"
    data = np.linspace(0.0, 1.0, 12).reshape(3, 4)
    write_pgm(path, data)
    blob = path.read_bytes()
    assert blob.startswith(b"P5\n4 3\n65535\n")
    pixels = np.frombuffer(blob.split(b"65535\n", 1)[1], dtype=">u2")
    assert pixels[0] == 0 and pixels[-1] == 65535
    sidecar = json.loads((tmp_path / "img.pgm.json").read_text())
    assert sidecar["min"] == 0.0 and sidecar["max"] == 1.0
    assert sidecar["width"] == 4 and sidecar["height"] == 3


def test_writers_are_byte_stable(tmp_path):
    doc = {"values": np.arange(6, dtype=float).reshape(2, 3), "flag": True}
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    write_json(p1, doc)
    write_json(p2, doc)
    assert p1.read_bytes() == p2.read_bytes()
