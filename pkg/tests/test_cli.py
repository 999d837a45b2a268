import io
import json

import pytest

from mtc.cli import run
from mtc.invariants import Library
from mtc.modular_data import datum_from_json, datum_to_json, save_datum, su2_data


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_classify_level16_json():
    code, text = call("classify", "--su2", "16", "--out", "json")
    assert code == 0
    payload = json.loads(text)
    assert payload["provenance"]["precision"] == {"bits": 53, "tol_zero": 1e-9,
                                                  "tol_int": 1e-6}
    names = [z["name"] for z in payload["result"]["invariants"]]
    assert names == ["A17", "D10", "E7"]
    lib = Library.from_json(payload["result"])
    assert lib.names == names


def test_json_output_is_byte_identical():
    a = call("classify", "--su2", "10", "--out", "json")
    b = call("classify", "--su2", "10", "--out", "json")
    assert a == b


def test_fuse_from_files(tmp_path):
    code, _ = call("classify", "--su2", "16", "--out", "json", "--write-dir", str(tmp_path))
    assert code == 0
    code, text = call("fuse", "--left", str(tmp_path / "D10.json"),
                      "--right", str(tmp_path / "D10.json"),
                      "--lib", str(tmp_path / "library.json"), "--out", "json")
    assert code == 0
    result = json.loads(text)["result"]
    assert result["summands"] == [{"name": "D10", "mult": 2}]
    assert result["unique"] is True


def test_fuse_accepts_cli_envelope_as_library(tmp_path):
    lib = tmp_path / "lib16.json"
    _, text = call("classify", "--su2", "16", "--out", "json", "--write-dir", str(tmp_path))
    lib.write_text(text)
    code, text = call("fuse", "--left", str(tmp_path / "E7.json"),
                      "--right", str(tmp_path / "E7.json"), "--lib", str(lib))
    assert code == 0 and text.startswith("E7 ⊗ E7 = D10 ⊕ E7")


def test_usage_errors_exit_2(capsys):
    assert call("mdata", "--su2", "0")[0] == 2
    assert call("mdata")[0] == 2
    assert call("frobnicate")[0] == 2
    assert call("classify", "--su2", "4", "--left", "vec", "--right", "vec")[0] == 2
    assert call("mdata", "--su2", "3", "--precision-bits", "64")[0] == 2


def test_mdata_round_trips_through_schema():
    code, text = call("mdata", "--su2", "3", "--out", "json")
    assert code == 0
    d = datum_from_json(json.loads(text)["result"])
    assert d.same_as(su2_data(3))


def test_validate_exit_codes(tmp_path):
    assert call("validate", "--su2", "7")[0] == 0
    obj = datum_to_json(su2_data(2))
    obj.pop("generator")
    obj["h"][1] = "1/8"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    code, text = call("validate", "--category", str(bad))
    assert code == 1 and "modular_relation" in text


def test_load_failure_exit_1(tmp_path):
    obj = datum_to_json(su2_data(2))
    obj.pop("generator")
    obj["h"][0] = "1/2"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    assert call("mdata", "--category", str(bad))[0] == 1


def test_verlinde_text():
    code, text = call("verlinde", "--su2", "2")
    assert code == 0 and "1 × 1 = 0 + 2" in text


def test_table_text_format():
    code, text = call("table", "--su2", "16")
    assert code == 0
    lines = text.splitlines()
    assert "D10 ⊗ D10 = 2·D10" in lines
    assert "D10 ⊗ E7 = 2·E7" in lines and "E7 ⊗ D10 = 2·E7" in lines
    assert "E7 ⊗ E7 = D10 ⊕ E7" in lines
    assert lines[-1].startswith("# precision:")


def test_table_from_library_file(tmp_path):
    call("classify", "--su2", "4", "--write-dir", str(tmp_path))
    code, text = call("table", "--lib", str(tmp_path / "library.json"), "--out", "json")
    assert code == 0
    assert len(json.loads(text)["result"]["table"]) == 4


def test_audit():
    code, text = call("audit", "--su2", "16")
    assert code == 0 and "0 failures" in text


def test_heterotic_classify_with_builtins_and_files(tmp_path):
    code, text = call("classify", "--left", "vec", "--right", "toric", "--out", "json")
    assert code == 0 and len(json.loads(text)["result"]["invariants"]) == 2
    path = save_datum(su2_data(1), tmp_path / "su2_1.json")
    assert call("classify", "--left", "vec", "--right", str(path),
                "--strict-heterotic")[0] == 1
    code, text = call("classify", "--left", "vec", "--right", str(path))
    assert code == 0 and "0 physical" in text


def test_budget_exceeded_exit_1():
    assert call("classify", "--su2", "16", "--node-budget", "5")[0] == 1


def test_tolerance_flags_reach_provenance():
    code, text = call("classify", "--su2", "4", "--tol", "1e-10", "--out", "json")
    assert json.loads(text)["provenance"]["precision"]["tol_zero"] == 1e-10


def test_env_precision_bits(monkeypatch):
    monkeypatch.setenv("MTC_PRECISION_BITS", "80")
    assert call("mdata", "--su2", "2")[0] == 2
    monkeypatch.setenv("MTC_PRECISION_BITS", "53")
    assert call("mdata", "--su2", "2")[0] == 0


@pytest.mark.parametrize("threads", ["0", "2"])
def test_threads_flag(threads):
    code, text = call("classify", "--su2", "16", "--threads", threads)
    assert code == 0 and "3 physical" in text
