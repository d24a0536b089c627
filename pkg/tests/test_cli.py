import json
import subprocess
import sys

import numpy as np
import pytest

from isgqd.catalog import SCHEMA, build, catalog_names, load_spec, parse_text
from isgqd.cli import main
from isgqd.errors import SemigroupError, SpecInvalid


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_catalog_listing(capsys):
    code, out, _ = _run(["catalog"], capsys)
    assert code == 0
    assert out.split() == catalog_names()
    assert len(catalog_names()) >= 10


def test_every_catalog_entry_validates():
    import jsonschema
    from importlib import resources

    for name in catalog_names():
        text = (resources.files("isgqd") / "catalog" / f"{name}.json").read_text()
        jsonschema.validate(json.loads(text), SCHEMA)


def test_analyze_to_directory(tmp_path, capsys):
    code, _, _ = _run(["analyze", "symmetric_inverse_3", "--out", str(tmp_path)], capsys)
    assert code == 0
    rep = json.loads((tmp_path / "analysis.json").read_text())
    assert rep["semigroup"]["size"] == 34
    assert rep["green"]["D"] == 4
    assert rep["structure"]["brandt_structure"] is False
    assert rep["consistency"]["conflict"] is False
    assert rep["isolated_bound"]["holds"]


def test_qd_outputs(tmp_path, capsys):
    code, _, err = _run(["qd", "brandt_z2_2", "--n-max", "3", "--out", str(tmp_path)], capsys)
    assert code == 0 and "pass" in err
    rows = (tmp_path / "qd.csv").read_text().splitlines()
    assert rows[0] == "n,rank,max_commutator,schedule_ok,defect"
    assert len(rows) == 4
    rep = json.loads((tmp_path / "qd_report.json").read_text())
    assert rep["reaches_identity"] and rep["strategy"] == "full"


def test_qd_window_defaults_to_berg(capsys):
    code, out, _ = _run(["qd", "brandt_z_window", "--n-max", "2"], capsys)
    assert code == 0
    assert json.loads(out)["strategy"] == "berg"


def test_qd_user_strategy_soft_failure(tmp_path, capsys):
    corner = np.zeros((2, 2))
    corner[0, 0] = 1.0
    w = tmp_path / "w.json"
    w.write_text(json.dumps({"projections": [corner.tolist()]}))
    code, out, _ = _run(["qd", "brandt_z2_2", "--n-max", "2", "--strategy", f"user:{w}"], capsys)
    assert code == 2
    assert json.loads(out)["verdict"] == "schedule-unachievable"


def test_nonfl_command(tmp_path, capsys):
    code, _, _ = _run(["nonfl", "tower_nonfl", "--out", str(tmp_path)], capsys)
    assert code == 0
    rep = json.loads((tmp_path / "nonfl_report.json").read_text())
    assert rep["verdict"] == "pass" and rep["report"]["n"] == 4
    code, _, _ = _run(["nonfl", "tower_nonfl", "--orientation", "literal", "--out", str(tmp_path)], capsys)
    assert code == 2


def test_trace_command(capsys):
    code, out, _ = _run(["trace", "qdnotr_k4", "--margin"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert [m["margin"] for m in rep["margins"]] == ["1", "1/2", "1/3", "1/4"]
    assert rep["unit_summand_trace"]["faithful"] is False


def test_groupoid_command(capsys):
    code, out, _ = _run(["groupoid", "brandt_z3_4"], capsys)
    assert code == 0
    g = json.loads(out)["groupoid"]
    assert len(g["units"]) == 4 and len(g["germs"]) == 48


def test_determinism_bytes(tmp_path, capsys):
    for d in ("a", "b"):
        assert _run(["analyze", "clifford_z6_z3", "--seed", "5", "--out", str(tmp_path / d)], capsys)[0] == 0
        assert _run(["qd", "brandt_z3_4", "--seed", "5", "--n-max", "2", "--out", str(tmp_path / d)], capsys)[0] == 0
    for f in ("analysis.json", "qd_report.json", "qd.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_malformed_json_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "type": "brandt",\n  "k": 2,\n  "group": {"type": "trivial"}\n  oops\n}\n')
    code, _, err = _run(["analyze", str(bad)], capsys)
    assert code == 1
    assert "line 5" in err and "SpecInvalid" in err


def test_schema_violation_names_path():
    with pytest.raises(SpecInvalid, match="k"):
        parse_text('{"type": "brandt", "group": {"type": "trivial"}, "k": 0}')
    with pytest.raises(SpecInvalid):
        parse_text('{"type": "nonsense"}')


def test_invalid_table_is_rejected(tmp_path, capsys):
    p = tmp_path / "t.json"
    p.write_text(json.dumps({"type": "table", "elements": ["0", "a"], "mul": [[0, 0], [0, 5]], "zero": "0"}))
    with pytest.raises(SemigroupError):
        load_spec(p)
    code, _, err = _run(["analyze", str(p)], capsys)
    assert code == 1 and "SemigroupError" in err


def test_unsupported_command_for_spec(capsys):
    code, _, err = _run(["nonfl", "brandt_z2_2"], capsys)
    assert code == 1 and "Unsupported" in err


def test_build_clifford_from_dict():
    spec = build({"type": "clifford", "labels": ["z", "e"], "meet": [[0, 0], [0, 1]],
                  "groups": [{"type": "trivial"}, {"type": "product", "factors": [{"type": "cyclic", "n": 2},
                                                                                  {"type": "cyclic", "n": 3}]}]})
    assert spec.semigroup.size == 7


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "isgqd.cli", "catalog"], capture_output=True, text=True, check=True)
    assert "qdnotr_k8" in out.stdout
