"""Deterministic serialization of report documents."""

import json
import math

import numpy as np
import pytest

from reebflow import ConfigError
from reebflow.reports import (emit_report, format_float, render_csv,
                              render_json)


def test_format_float_roundtrips():
    for x in (1.0 / 3.0, 0.1, 1e-9, math.pi, 2.0 ** -20,
              1.5740817252762716e-4, -0.0, 12345.678):
        assert float(format_float(x)) == x


def test_json_sorted_keys():
    text = render_json({"beta": 1, "alpha": 2})
    assert text.index('"alpha"') < text.index('"beta"')
    assert json.loads(text) == {"alpha": 2, "beta": 1}


def test_json_nested_structures():
    doc = {"rows": [{"v": 0.5, "tag": "ok"}, {"v": None}], "empty": []}
    parsed = json.loads(render_json(doc))
    assert parsed["rows"][0]["v"] == 0.5
    assert parsed["rows"][1]["v"] is None
    assert parsed["empty"] == []


def test_json_empty_documents():
    assert render_json([]) == "[]\n"
    assert render_json({}) == "{}\n"


def test_json_scalar_variety():
    doc = {"f": np.float64(0.25), "i": np.int32(7), "b": np.bool_(True),
           "n": None, "s": "x\"y"}
    parsed = json.loads(render_json(doc))
    assert parsed == {"f": 0.25, "i": 7, "b": True, "n": None, "s": 'x"y'}


def test_json_rejects_non_finite():
    with pytest.raises(ConfigError, match=r"non-finite value.*rows\[0\].v"):
        render_json({"rows": [{"v": float("nan")}]})
    with pytest.raises(ConfigError, match="non-finite"):
        render_json([float("inf")])


def test_json_rejects_exotic_values():
    with pytest.raises(ConfigError, match="keys must be strings"):
        render_json({1: "x"})
    with pytest.raises(ConfigError, match="cannot serialize"):
        render_json({"x": object()})


def test_json_float_precision():
    text = render_json({"v": 1.0 / 3.0})
    assert "0.33333333333333331" in text


def test_csv_sorted_union_header():
    rows = [{"b": 1.5, "a": "x"}, {"a": "y", "c": None}]
    text = render_csv(rows)
    lines = text.split("\n")
    assert lines[0] == "a,b,c"
    assert lines[1] == "x,1.5,"
    assert lines[2] == "y,,"


def test_csv_explicit_columns():
    rows = [{"a": 1, "b": 2}]
    assert render_csv(rows, columns=["b", "a"]).split("\n")[0] == "b,a"


def test_csv_deterministic():
    rows = [{"x": 0.1 * k, "k": k} for k in range(5)]
    assert render_csv(rows) == render_csv(rows)


class _Boxed:
    def to_dict(self):
        return {"verdict": "pass", "witnesses": [{"r": 0.25}]}


def test_emit_report_object_and_formats(tmp_path):
    path = tmp_path / "r.json"
    text = emit_report(_Boxed(), path=str(path), format="json")
    assert path.read_text() == text
    assert text.endswith("\n")
    assert json.loads(text)["verdict"] == "pass"
    csv_text = emit_report(_Boxed(), format="csv")
    assert csv_text.split("\n")[0] == "r"


def test_emit_report_table_fallbacks():
    assert emit_report([{"a": 1}], format="csv").startswith("a\n")
    assert emit_report({"rows": [{"a": 1}]}, format="csv").startswith("a\n")
    with pytest.raises(ConfigError, match="no tabular part"):
        emit_report({"verdict": "pass"}, format="csv")


def test_emit_report_unknown_format():
    with pytest.raises(ConfigError, match="unknown report format"):
        emit_report({}, format="yaml")


def test_emit_report_path_context():
    with pytest.raises(ConfigError, match="/no/such/dir/out.json"):
        emit_report({}, path="/no/such/dir/out.json")
