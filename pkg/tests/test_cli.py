import json

import jsonschema
import pytest

from densitylab import cli
from densitylab.measures import MeasureSpec, evaluate_measure
from densitylab.parse import parse_set_expr
from densitylab.report import CheckReport

B = "blocks(2,2,on=[0])"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, schema, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    doc = json.loads(out)
    jsonschema.validate(doc, cli.load_schema(schema))
    return doc


def test_density_example(capsys):
    doc = run_json(capsys, "density", "density", "ap(0,2)", "--horizon", "1048576", "--format", "json")
    assert doc["exists"] and doc["value"] == pytest.approx(0.5, abs=5e-3)
    assert doc["liminf"] == pytest.approx(0.5, abs=5e-3) and doc["limsup"] == pytest.approx(0.5, abs=5e-3)


def test_power_horizon_syntax(capsys):
    a = run(capsys, "density", "ap(0,3)", "--horizon", "2^16")
    b = run(capsys, "density", "ap(0,3)", "--horizon", "65536")
    assert a == b


def test_alpha_density(capsys):
    doc = run_json(capsys, "alpha-density", "alpha-density", B, "--alpha", "1", "--horizon", "2^20")
    assert doc["liminf"] == pytest.approx(0.2, abs=0.01) and doc["limsup"] == pytest.approx(0.8, abs=0.01)
    doc = run_json(capsys, "alpha-density", "alpha-density", B, "--alpha-grid", "0,1,2", "--horizon", "2^16")
    assert [e["alpha"] for e in doc["estimates"]] == [0, 1, 2]


def test_exact(capsys):
    doc = run_json(capsys, "exact", "exact", "diff(ap(0,2),finite{2,4})")
    assert doc["density"] == "1/2"
    doc = run_json(capsys, "exact", "exact", B, "--alpha", "0")
    assert doc["density"] is None and doc["alpha_extremes"] == pytest.approx([1 / 3, 2 / 3])


def test_polya(capsys):
    doc = run_json(capsys, "polya", "polya", B)
    assert doc["lld"] <= 0.02 and doc["uud"] >= 0.98


def test_gap(capsys):
    assert run_json(capsys, "gap", "gap", B)["gap_density"] == pytest.approx(2, abs=1e-3)
    doc = run_json(capsys, "gap", "gap", "finite{1,2,6,24,120,720,5040,40320}", "--horizon", "2^16")
    assert doc["infinite"] and doc["gap_density"] is None


def test_envelopes(capsys):
    doc = run_json(capsys, "envelopes", "envelopes", B, "--alpha-grid", "0,1,8")
    assert doc["lda_inf"] == pytest.approx(1 / 513) and doc["uda_inf"] == pytest.approx(512 / 513)


def test_measure_with_inline_and_file_spec(capsys, tmp_path):
    spec = {"atoms": [{"w": 1.0, "kind": "alpha", "param": 1.0,
                       "filter": {"kind": "block_boundaries", "base": 2, "phase": 1, "stride": 2}}]}
    jsonschema.validate(spec, cli.load_schema("measure_spec"))
    doc = run_json(capsys, "measure", "measure", B, "--spec", json.dumps(spec))
    assert doc["value"] == pytest.approx(0.8, abs=0.01)
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    assert run_json(capsys, "measure", "measure", B, "--spec", str(path))["value"] == doc["value"]


def test_witness_round_trip(capsys):
    doc = run_json(capsys, "witness", "witness", B, "--target", "0.5")
    jsonschema.validate(doc["spec"], cli.load_schema("measure_spec"))
    spec = MeasureSpec.from_json(doc["spec"])
    assert evaluate_measure(spec, parse_set_expr(B), 2**22) == pytest.approx(0.5, abs=0.02)


def test_construct(capsys):
    doc = run_json(capsys, "construct", "construct", "intermediate", "ap(0,3)", "ap(0,2)", "--with-rle",
                   "--horizon", "2^16")
    assert doc["count"] == 65536 // 3
    assert doc["rle"].startswith("4-4,6-6,10-10,12-12")  # 2 waits until A' has an element
    doc = run_json(capsys, "construct", "construct", "superset", "ap(0,4)", "ap(0,2)", "--horizon", "2^16")
    assert doc["density_bounds"][0] == pytest.approx(0.5, abs=0.02)


def test_density_set_csv_and_json(capsys):
    code, out, _ = run(capsys, "density-set", B, "--num", "3", "--horizon", "2^16", "--seed", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "ld,ud" and len(lines) == 4
    doc = run_json(capsys, "density-set", "density-set", B, "--num", "3", "--horizon", "2^16", "--seed", "4",
                   "--format", "json")
    assert [f"{a!r},{b!r}" for a, b in doc["points"]] == lines[1:]


@pytest.mark.parametrize("argv", [
    ("density", "ap(0,2)", "--horizon", "2^20"),
    ("density-set", B, "--num", "5", "--horizon", "2^16", "--seed", "7"),
    ("witness", B, "--target", "0.25"),
    ("construct", "difference", "ap(0,4)", "ap(0,2)", "--horizon", "5000", "--with-rle"),
])
def test_byte_identical_output(capsys, argv):
    first = run(capsys, *argv)
    assert first[0] == 0
    assert run(capsys, *argv) == first


def test_out_path(capsys, tmp_path):
    path = tmp_path / "d.json"
    code, out, _ = run(capsys, "exact", "ap(0,3)", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["density"] == "1/3"


@pytest.mark.parametrize("argv", [
    ("density", "ap(5,3)"),
    ("density", "ap(0,2)", "ap(1,2)"),
    ("density", "nat", "--format", "csv"),
    ("alpha-density", "nat"),
    ("witness", B),
    ("construct", "sideways", "nat", "nat"),
    ("measure", B, "--spec", "{not json"),
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == cli.EXIT_PARSE and err.startswith("densitylab:")


@pytest.mark.parametrize("argv", [["frobnicate", "nat"], ["density", "nat", "--bogus"], ["density", "nat", "--horizon", "x"]])
def test_argparse_rejections_exit_2(argv):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == 2


@pytest.mark.parametrize("argv", [
    ("density", "nat", "--horizon", "100"),
    ("witness", B, "--target", "1.5"),
    ("construct", "intermediate", "ap(0,2)", "ap(0,3)", "--horizon", "2^14"),
    ("gap", "finite{3}", "--horizon", "2^14"),
])
def test_precondition_errors_exit_3(capsys, argv):
    assert run(capsys, *argv)[0] == cli.EXIT_PRECONDITION


def test_nonconvergent_exit_4(capsys):
    spec = {"atoms": [{"w": 1.0, "kind": "alpha", "param": 0.0,
                       "filter": {"kind": "block_boundaries", "base": 2, "phase": 0, "stride": 1}}]}
    code, _, err = run(capsys, "measure", B, "--spec", json.dumps(spec))
    assert code == cli.EXIT_NONCONVERGENT and "atom 0" in err


def test_verify_failure_exit_5(capsys, monkeypatch):
    from densitylab import verify

    fake = [("invariant", CheckReport("good", True, []), 0.0), ("invariant", CheckReport("bad", False, [], "boom"), 0.0)]
    monkeypatch.setattr(verify, "run_suite", lambda progress=None: fake)
    code, out, _ = run(capsys, "verify")
    assert code == cli.EXIT_VERIFY
    assert "bad" in out and "FAIL" in out and "boom" in out
    code, out, _ = run(capsys, "verify", "--format", "json")
    doc = json.loads(out)
    jsonschema.validate(doc, cli.load_schema("verify"))
    assert code == cli.EXIT_VERIFY and doc["passed"] is False


def test_every_schema_is_valid():
    for name in ("alpha-density", "construct", "density-set", "density", "envelopes", "exact", "gap", "measure",
                 "measure_spec", "polya", "verify", "witness"):
        jsonschema.Draft202012Validator.check_schema(cli.load_schema(name))
