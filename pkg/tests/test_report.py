import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import ftsbreak
from ftsbreak.report import Report, read_report_json, to_jsonable, write_report_json

floats = st.floats(allow_nan=True, allow_infinity=True, width=64)
leaves = st.one_of(
    floats, st.integers(-(2**62), 2**62), st.text(max_size=8), st.sampled_from(["NaN", "Infinity"]), st.booleans(), st.none()
)
payloads = st.recursive(leaves, lambda ch: st.one_of(st.lists(ch, max_size=4), st.dictionaries(st.text(max_size=5), ch, max_size=4)), max_leaves=20)


def same_bits(a, b):
    if isinstance(a, float) and isinstance(b, float):
        return math.isnan(a) and math.isnan(b) or np.float64(a).tobytes() == np.float64(b).tobytes()
    if isinstance(a, dict) and isinstance(b, dict):
        return list(a) == list(b) and all(same_bits(a[k], b[k]) for k in a)
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(same_bits(x, y) for x, y in zip(a, b))
    return type(a) is type(b) and a == b


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.text(max_size=6), payloads, max_size=5), st.integers(0, 2**31))
def test_round_trip_is_lossless(tmp_path_factory, payload, seed):
    path = tmp_path_factory.mktemp("r") / "report.json"
    report = Report("ff", {"reps": 10, "level": 0.05}, payload, seed=seed, input_fingerprint="abc")
    write_report_json(report, path)
    back = read_report_json(path)
    assert same_bits(back.to_dict(), report.to_dict())
    assert back.dumps() == report.dumps()


def test_float_bits_survive():
    values = np.random.default_rng(0).standard_normal(200) * 10.0 ** np.arange(-100, 100)
    back = Report.from_dict(json.loads(Report("x", payload={"v": values}).dumps()))
    assert np.array_equal(np.array(back.payload["v"]).view(np.int64), values.view(np.int64))


def test_minimal_document_and_key_order(tmp_path):
    path = tmp_path / "empty.json"
    write_report_json(Report("evaluate"), path)
    doc = json.loads(path.read_text())
    assert list(doc) == ["schema", "version", "method", "seed", "parameters", "input_fingerprint", "payload"]
    assert doc["version"] == ftsbreak.__version__ and doc["schema"] == 1
    assert doc["payload"] == {}


def test_numpy_values_and_dataclasses():
    from ftsbreak.simlab import summarize

    out = to_jsonable({"a": np.arange(3), "b": np.float32(0.5), "c": (1, 2), "d": np.bool_(True), "s": summarize([1], [1])})
    assert out == {"a": [0, 1, 2], "b": 0.5, "c": [1, 2], "d": True, "s": {"mean": 1.0, "median": 1.0, "sd": 0.0, "mse": 0.0, "n_ok": 1, "n_failed": 0}}
    with pytest.raises(TypeError):
        to_jsonable(object())


def test_atomic_write_leaves_no_temp_files(tmp_path):
    path = tmp_path / "r.json"
    write_report_json(Report("ff", payload={"x": 1}), path)
    write_report_json(Report("ff", payload={"x": 2}), path)
    assert [p.name for p in tmp_path.iterdir()] == ["r.json"]
    assert read_report_json(path).payload == {"x": 2}


def test_rejects_unknown_schema():
    with pytest.raises(ValueError):
        Report.from_dict({"schema": 2, "version": "0", "method": "ff"})
    with pytest.raises(ValueError):
        Report.from_dict({"schema": 1})
