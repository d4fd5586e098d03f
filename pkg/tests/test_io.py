import json
import math

import numpy as np

from qfi_lab import io


def test_fmt_round_trips():
    for x in (0.1, 1 / 3, 2.0**-40, 1e300, -7.5):
        assert float(io.fmt(x)) == x
    assert io.fmt(3) == "3" and io.fmt(np.int64(4)) == "4"
    assert io.fmt(True) == "true" and io.fmt(math.inf) == "inf"


def test_csv_header():
    text = io.csv_text(["a", "b"], [(1, 0.1)], "cmd --x 1", seed=42)
    lines = text.splitlines()
    assert lines[0] == f"# qfi-lab {io.__version__} command=cmd --x 1 seed=42"
    assert lines[1:] == ["a,b", "1,0.10000000000000001"]


def test_json_text():
    doc = json.loads(io.json_text({"x": np.float64(0.25), "y": [np.int32(2)], "z": math.nan}))
    assert doc == {"x": 0.25, "y": [2], "z": "nan"}


def test_gnuplot_script(tmp_path):
    s = io.gnuplot_script(tmp_path / "out.csv", ["p", "m_opt"], "p", ["m_opt"])
    assert "using 1:2" in s and "'out.csv'" in s


def test_amplitudes_json():
    assert io.amplitudes_json(np.array([1j, 0.5])) == [[0.0, 1.0], [0.5, 0.0]]
