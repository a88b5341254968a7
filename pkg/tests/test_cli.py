import json

import pytest

from finlat import build_lattice, is_isomorphic, s7_family
from finlat.cli import LatticeFile, ParseError, lattice_to_jsonable, parse_lattice_file, run
from tests.conftest import S7_COVERS, S7_ELEMENTS


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


C3_FILE = {"name": "C3", "elements": ["0", "a", "1"], "covers": [["0", "a"], ["a", "1"]]}


def test_parse_lattice_file_roundtrip():
    lattice = parse_lattice_file(json.dumps(C3_FILE).encode())
    assert lattice.elements == ("0", "1", "a")
    assert lattice.bottom == "0"


def test_parse_canonical_s7():
    payload = {
        "name": "S7",
        "elements": S7_ELEMENTS,
        "covers": [list(c) for c in S7_COVERS],
    }
    lattice = parse_lattice_file(json.dumps(payload).encode())
    assert lattice == build_lattice(S7_ELEMENTS, S7_COVERS)


def test_parse_rejects_missing_endpoint():
    bad = {"name": "x", "elements": ["0"], "covers": [["0", "missing"]]}
    with pytest.raises(Exception):
        parse_lattice_file(json.dumps(bad).encode())


def test_parse_rejects_malformed_json():
    with pytest.raises(ParseError) as info:
        LatticeFile.parse(b"{not json")
    assert "line" in str(info.value)


def test_serializer_sorts_covers():
    lattice = build_lattice(S7_ELEMENTS, S7_COVERS)
    out = lattice_to_jsonable("S7", lattice)
    assert out["covers"] == sorted(out["covers"])
    again = LatticeFile.parse(json.dumps(out).encode())
    assert again.lattice == lattice


def test_analyze_command(tmp_path):
    path = write(tmp_path, "s7.json", {
        "name": "S7",
        "elements": S7_ELEMENTS,
        "covers": [list(c) for c in S7_COVERS],
    })
    report, code = run(["analyze", path])
    assert code == 0
    assert report["properties"]["slim"] is True
    assert report["properties"]["semimodular"] is True
    assert report["properties"]["distributive"] is False
    # reports round-trip through the serializer losslessly
    assert json.loads(json.dumps(report)) == report


def test_dim_command(tmp_path):
    path = write(tmp_path, "c3.json", C3_FILE)
    report, code = run(["dim", path])
    assert (report["dimension"], code) == (1, 0)


def test_embed_grid_command(tmp_path):
    d5 = {
        "name": "D5",
        "elements": ["0", "p", "q", "1", "t"],
        "covers": [["0", "p"], ["0", "q"], ["p", "1"], ["q", "1"], ["1", "t"]],
    }
    path = write(tmp_path, "d5.json", d5)
    report, code = run(["embed-grid", path])
    assert code == 0
    assert report["factor_sizes"] == [3, 2]
    assert report["map"]["t"] == "2,1"
    target = LatticeFile.parse(json.dumps(report["target"]).encode())
    assert len(target.lattice) == 6


def test_retract_command_positive(tmp_path):
    payload = dict(C3_FILE, sub=["0", "1"])
    path = write(tmp_path, "c3s.json", payload)
    report, code = run(["retract", path])
    assert code == 0
    assert report["retraction_exists"] is True
    assert report["map"]["a"] in ("0", "1")


def test_retract_command_refutation(tmp_path):
    payload = {
        "name": "B2",
        "elements": ["00", "01", "10", "11"],
        "covers": [["00", "01"], ["00", "10"], ["01", "11"], ["10", "11"]],
        "sub": ["00", "10", "11"],
    }
    path = write(tmp_path, "b2.json", payload)
    report, code = run(["retract", path])
    assert code == 2
    assert report["retraction_exists"] is False


def test_retract_command_sub_flag(tmp_path):
    path = write(tmp_path, "c3.json", C3_FILE)
    sub_path = write(tmp_path, "sub.json", {"sub": ["0", "1"]})
    report, code = run(["retract", path, "--sub", sub_path])
    assert code == 0 and report["retraction_exists"]


def test_retract_report_reverifies(tmp_path):
    from finlat import Homomorphism, induced_lattice

    payload = dict(C3_FILE, sub=["0", "1"])
    path = write(tmp_path, "c3s.json", payload)
    report, _ = run(["retract", path])
    lattice = build_lattice(C3_FILE["elements"], [tuple(c) for c in C3_FILE["covers"]])
    hom = Homomorphism(
        lattice, induced_lattice(lattice, {"0", "1"}), report["map"]
    )
    assert hom.is_retraction()
    # a reported refutation re-runs to the same verdict
    again, code = run(["retract", path])
    assert again == report and code == 0


def test_classify_command_positive(tmp_path):
    path = write(tmp_path, "c3.json", C3_FILE)
    report, code = run(["classify", path, "--class", "dfin:1"])
    assert code == 0
    assert report["verdict"] == "absolute-retract"


def test_classify_command_witness_reverifies(tmp_path):
    path = write(tmp_path, "c3.json", C3_FILE)
    report, code = run(["classify", path, "--class", "dfin:2"])
    assert code == 0
    assert report["verdict"] == "not-absolute-retract"
    witness = LatticeFile.parse(json.dumps(report["witness"]["lattice"]).encode())
    assert len(witness.lattice) == 4
    cert = report["witness"]["certificate"]
    assert cert["proper"] and cert["is_cover01"] and cert["oracle_confirmed"]
    # refutation re-runs to the same verdict through the oracle
    from finlat import exists_retraction

    image = set(report["witness"]["embedding"].values())
    assert exists_retraction(witness.lattice, image) is None


def test_witness_sps_command(tmp_path):
    path = write(tmp_path, "c3.json", C3_FILE)
    report, code = run(["witness-sps", path])
    assert code == 0
    assert report["retraction_found"] is False
    assert report["t"] == 4
    extension = LatticeFile.parse(json.dumps(report["extension"]).encode())
    assert is_isomorphic(extension.lattice, s7_family(4).lattice)


def test_gen_slim_command(tmp_path):
    report, code = run(["gen-slim", "--grid", "1x1"])
    assert code == 0
    built = LatticeFile.parse(json.dumps(report["lattice"]).encode())
    assert len(built.lattice) == 4


def test_gen_slim_with_forks(tmp_path, s7):
    script = {"base_sizes": [2, 2], "steps": [["1,1", "1,0"]]}
    path = write(tmp_path, "script.json", script)
    report, code = run(["gen-slim", "--grid", "1x1", "--forks", path])
    assert code == 0
    built = LatticeFile.parse(json.dumps(report["lattice"]).encode())
    assert is_isomorphic(built.lattice, s7)


def test_gen_slim_rejects_mismatched_script(tmp_path):
    script = {"base_sizes": [3, 2], "steps": []}
    path = write(tmp_path, "script.json", script)
    report, code = run(["gen-slim", "--grid", "1x1", "--forks", path])
    assert code == 1
    assert "error" in report


def test_oracle_verify_suite(tmp_path, capsys):
    report, code = run(["oracle-verify", "--suite", "swing", "--max-size", "4"])
    assert code == 0
    assert report["passed"] is True
    err = capsys.readouterr().err
    assert "PASS" in err


def test_oracle_verify_unknown_suite():
    report, code = run(["oracle-verify", "--suite", "bogus"])
    assert code == 1


def test_unknown_command_is_domain_error():
    report, code = run(["frobnicate"])
    assert code == 1
    assert "error" in report


def test_domain_error_exit_code(tmp_path):
    path = write(tmp_path, "s7.json", {
        "name": "S7",
        "elements": S7_ELEMENTS,
        "covers": [list(c) for c in S7_COVERS],
    })
    report, code = run(["dim", path])  # S7 is not distributive
    assert code == 1
    assert "NotDistributive" in report["error"]


def test_reports_are_deterministic(tmp_path):
    path = write(tmp_path, "c3.json", C3_FILE)
    first, _ = run(["classify", path, "--class", "dfin:2"])
    second, _ = run(["classify", path, "--class", "dfin:2"])
    assert first == second
