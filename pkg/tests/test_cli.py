import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from cotensorkit.cli import (FORMAT_VERSION, InputError, coalgebra_from_dict, coalgebra_of,
                             load_document, main, parse_rational, run, span_of)
from cotensorkit.coalg import divided_power

DATA = Path(__file__).resolve().parent.parent / "data"


def invoke(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def doc_of(name):
    return load_document((DATA / name).read_text())


@pytest.mark.parametrize("command", ["validate", "filtration", "cotensor", "verify"])
def test_a3_commands(capsys, command):
    code, out, _ = invoke(capsys, command, "--input", str(DATA / "a3.json"),
                          "--sub", str(DATA / "vertices.json"))
    assert code == 0
    report = json.loads(out)
    assert report["format_version"] == FORMAT_VERSION and report["exit_code"] == 0
    assert report["results"]["validation"]["ok"]


def test_a3_verify_reports_isomorphism(capsys):
    code, out, _ = invoke(capsys, "verify", "--input", str(DATA / "a3.json"))
    res = json.loads(out)["results"]["verify"]
    assert code == 0
    assert res["verdicts"]["cotensor_iso"]["value"] is True
    assert res["filtration"]["dims"] == [0, 3, 5, 6]


def test_a3_cotensor_dims(capsys):
    code, out, _ = invoke(capsys, "cotensor", "--input", str(DATA / "a3.json"))
    res = json.loads(out)["results"]
    assert code == 0 and res["filtration"]["dims"] == [0, 3, 5, 6]
    assert res["cotensor"]["dims"] == [3, 2, 1]


@pytest.mark.parametrize("name", ["dp3.json", "dp3_explicit.json"])
def test_divided_power_verify_reports_condition4(name):
    code, res = run("verify", doc_of(name))
    v = res["verify"]["verdicts"]
    assert code == 0
    assert v["cotensor_iso"]["value"] is False
    assert v["condition4"]["value"] is False
    assert v["condition4"]["details"]["failing_degree"] == 1
    assert res["verify"]["universal_morphism"]["verdict"] == "MonoNotEpi"


def test_emit_round_trip(tmp_path, capsys):
    code, out, _ = invoke(capsys, "emit", "--input", str(DATA / "dp3.json"))
    assert code == 0
    emitted = json.loads(out)["results"]["document"]
    path = tmp_path / "dp3_emitted.json"
    path.write_text(json.dumps(emitted))
    doc = load_document(path.read_text())
    assert "coalgebra" in doc
    C = coalgebra_of(doc)
    assert C.delta == divided_power(3).delta and C.epsilon == divided_power(3).epsilon
    code2, res = run("filtration", doc)
    assert code2 == 0 and res["filtration"]["dims"] == [0, 1, 2, 3]


def test_parse_rational():
    assert parse_rational("3/4", "x") == Fraction(3, 4)
    assert parse_rational(-2, "x") == -2
    for bad in (0.5, True, "1/0", "abc", None):
        with pytest.raises(InputError):
            parse_rational(bad, "x")


def test_float_entry_is_an_input_error(tmp_path, capsys):
    doc = {"format_version": 1,
           "coalgebra": {"basis": ["g"], "delta": [[0, 0, 0, 1.0]], "epsilon": [1]}}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = invoke(capsys, "validate", "--input", str(path))
    assert code == 2 and "input error" in err


def test_malformed_json_reports_position(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"format_version": 1,\n "builder": }')
    code, _, err = invoke(capsys, "validate", "--input", str(path))
    assert code == 2 and "line 2 column" in err


def test_missing_file_and_bad_version(tmp_path, capsys):
    code, _, _ = invoke(capsys, "validate", "--input", str(tmp_path / "nope.json"))
    assert code == 2
    with pytest.raises(InputError):
        load_document(json.dumps({"format_version": 2, "builder": {"kind": "grouplike"}}))
    with pytest.raises(InputError):
        load_document(json.dumps({"format_version": 1}))


def test_non_subcoalgebra_is_an_input_error(tmp_path, capsys):
    sub = tmp_path / "sub.json"
    sub.write_text(json.dumps(["c1"]))
    code, _, err = invoke(capsys, "filtration", "--input", str(DATA / "dp3.json"), "--sub", str(sub))
    assert code == 2 and "NotASubcoalgebra" in err


def test_command_without_subcoalgebra():
    doc = {"format_version": 1, "builder": {"kind": "grouplike", "params": {"g": 2}}}
    with pytest.raises(InputError):
        run("filtration", doc)
    code, res = run("coseparable", doc)
    assert code == 0 and res["coseparable"]["value"] is True


def test_invalid_coalgebra_exits_one():
    bad = {"basis": ["a", "b"], "delta": [[0, 0, 0, 1], [1, 1, 1, 1]], "epsilon": [1, 0]}
    code, res = run("validate", {"format_version": 1, "coalgebra": bad})
    assert code == 1 and not res["validation"]["ok"]


def test_coalgebra_from_dict_rejects_junk():
    with pytest.raises(InputError):
        coalgebra_from_dict({"basis": ["a"]})
    with pytest.raises(InputError):
        span_of({"span": "e1"})


@pytest.mark.parametrize("seed", [0, 1, 7])
def test_seed_does_not_change_verdicts(seed):
    base = run("verify", doc_of("dp3.json"))[1]["verify"]
    code, res = run("verify", doc_of("dp3.json"), seed=seed)
    assert code == 0 and sorted(res["basis_permutation"]) == [0, 1, 2]
    v = res["verify"]
    assert v["filtration"] == base["filtration"]
    assert {k: x["value"] for k, x in v["verdicts"].items()} == \
        {k: x["value"] for k, x in base["verdicts"].items()}


def test_seed_with_label_span():
    code, res = run("filtration", doc_of("a3.json"), seed=3)
    assert code == 0 and res["filtration"]["dims"] == [0, 3, 5, 6]


def test_identities_text_output(capsys):
    code, out, _ = invoke(capsys, "identities", "--input", str(DATA / "a3.json"), "--output", "text")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "command: identities"
    assert any(line.startswith("PASS formula gamma (") and line.endswith("instances)") for line in lines)
    assert not any(line.startswith("FAIL") for line in lines)


def test_injective_and_fsmooth_commands():
    code, res = run("injective", doc_of("dp3.json"))
    assert code == 0 and res["injective"]["M"]["value"] is True
    assert res["injective"]["quotients"]["1"] == {"right": False, "left": False}
    code, res = run("fsmooth", doc_of("a3.json"))
    # D is a sum of points, hence cosemisimple and formally smooth
    assert code == 0 and res["fsmooth"]["value"] is True


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "cotensorkit", "validate", "--input",
                          str(DATA / "gl2.json"), "--output", "text"],
                         capture_output=True, text=True, check=False)
    assert out.returncode == 0
    assert "validation.ok: true" in out.stdout
