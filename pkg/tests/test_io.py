import json
import os

import numpy as np
import pytest

from dmf import io


def test_number_formatting():
    assert io.format_value(0.1) == "0.10000000000000001"
    assert io.format_value(np.float64(2.0)) == "2"
    assert io.format_value(-0.0) == "0"
    assert io.format_value(np.int64(7)) == "7"
    assert float(io.format_value(1e-300)) == 1e-300


def test_round_trip_is_exact():
    vals = np.random.default_rng(3).normal(size=50) * 10.0 ** np.arange(-25, 25)
    text = io.csv_text(["v"], [[v] for v in vals])
    back = np.array([float(line) for line in text.splitlines()[1:]])
    assert np.array_equal(back, vals)


def test_header_always_present(tmp_path):
    p = tmp_path / "empty.csv"
    io.write_csv(p, ["a", "b"], [])
    assert p.read_bytes() == b"a,b\n"
    with pytest.raises(ValueError):
        io.csv_text(["a"], [[1, 2]])


def test_atomic_write_leaves_no_temp_files(tmp_path):
    p = tmp_path / "sub" / "out.csv"
    io.write_csv(p, ["a"], [[1.5]])
    io.write_csv(p, ["a"], [[2.5]])
    assert p.read_text() == "a\n2.5\n"
    assert os.listdir(p.parent) == ["out.csv"]


def test_json_is_sorted_and_nan_free(tmp_path):
    p = tmp_path / "s.json"
    io.write_json(p, {"b": np.float64(1.5), "a": [np.int64(1), float("nan")], "c": np.bool_(True)})
    text = p.read_text()
    assert json.loads(text) == {"a": [1, None], "b": 1.5, "c": True}
    assert text.index('"a"') < text.index('"b"') and text.endswith("\n")
