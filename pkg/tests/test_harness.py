import json
from pathlib import Path

import pytest

from secto.cli import main
from secto.harness import KINDS, TOLERANCES, ScenarioError, dumps_report, load_scenario, run, schema_for

SCEN = Path(__file__).resolve().parents[1] / "demos" / "scenarios"
DIAG3 = {"blocks": [{"lambda": 1.0, "size": 1}, {"lambda": 2.0, "size": 1}, {"lambda": 3.0, "size": 1}]}


def scenario(**kw):
    return json.dumps(kw)


def test_minimal_verify_scenario_is_valid():
    sc = load_scenario(scenario(kind="sectional-verify", n=3, jordan_spec=DIAG3, p=[0, 0, 1]))
    assert sc.kind == "sectional-verify" and sc.seed == 0
    assert sc.effective_tolerances()["sectional"] == 1e-10


def test_block_sizes_must_sum_to_n():
    with pytest.raises(ScenarioError) as info:
        load_scenario(scenario(kind="sectional-verify", n=3, jordan_spec={"blocks": [{"lambda": 0, "size": 2}]},
                               p=[0, 1]))
    assert info.value.errors[0][0] == "$.jordan_spec.blocks"


def test_duplicate_tolerance_key_rejected():
    text = '{"kind": "spectrum", "A": [[1]], "g": [[1]], "p": [0, 1], ' \
           '"tolerances": {"match": 1e-8, "match": 1e-3}}'
    with pytest.raises(ScenarioError, match="duplicate key 'match'"):
        load_scenario(text)


def test_schema_errors_carry_paths():
    with pytest.raises(ScenarioError, match="unknown kind"):
        load_scenario(scenario(kind="nope"))
    with pytest.raises(ScenarioError) as info:
        load_scenario(scenario(kind="spectrum", A=[[1]], g=[[1]], p=[0, 1], extra=1))
    assert info.value.errors[0][0] == "$"
    with pytest.raises(ScenarioError) as info:
        load_scenario(scenario(kind="spectrum", A=[[1]], g=[[1]], p=[0, 1], tolerances={"match": -1}))
    assert info.value.errors[0][0] == "$.tolerances.match"
    with pytest.raises(ScenarioError, match="invalid JSON"):
        load_scenario("{")
    with pytest.raises(ScenarioError, match="does not match"):
        load_scenario(scenario(kind="flow", A=[[1]], g=[[1]], p=[0, 1]), kind="spectrum")


@pytest.mark.parametrize("kind", KINDS)
def test_schema_lists_every_tolerance(kind):
    props = schema_for(kind)["properties"]["tolerances"]["properties"]
    assert set(props) == set(TOLERANCES[kind])


def test_spectrum_end_to_end():
    rep = run(load_scenario((SCEN / "spectrum_diag.json").read_text()))
    assert rep["pass"]
    assert rep["results"]["predicted"] == [3.0, 4.0, 5.0]
    assert all(m["ok"] for m in rep["results"]["matches"])


def test_flow_end_to_end():
    rep = run(load_scenario((SCEN / "flow_rigid_body.json").read_text()))
    assert rep["pass"]
    d = rep["results"]["diagnostics"]
    assert d["energy_drift"] <= 1e-8 and d["casimir_drift"] <= 1e-8 and d["max_integral_drift"] <= 1e-8


def test_holonomy_end_to_end():
    rep = run(load_scenario((SCEN / "holonomy_j2j2.json").read_text()))
    assert rep["pass"]
    r = rep["results"]
    assert r["berger"]["image_rank"] == r["berger"]["centralizer_dim"] == 2
    assert r["checks"]["commutes"] and r["checks"]["skew_bracket"] and r["checks"]["curvature_split"]


def test_module_errors_are_reported():
    # g-skew A violates the role of A
    sc = load_scenario(scenario(kind="spectrum", A=[[0, 1], [-1, 0]], g=[[1, 0], [0, 1]], p=[0, 1]))
    rep = run(sc)
    assert not rep["pass"] and rep["error"]["type"] and rep["error"]["context"] == "spectrum"


def test_every_tolerance_in_report():
    sc = load_scenario(scenario(kind="uniqueness", g=[[1, 0], [0, 1]], A=[[1, 0], [0, 2]], B=[[1, 0], [0, 2]],
                                A2=[[1, 0], [0, 3]], B2=[[1, 0], [0, 3]], tolerances={"solve": 1e-7}))
    rep = run(sc)
    assert rep["tolerances"] == {"solve": 1e-7}
    for name in ("verify_diag.json", "projective_dini.json"):
        rep = run(load_scenario((SCEN / name).read_text()))
        assert set(rep["tolerances"]) == set(TOLERANCES[rep["kind"]])


@pytest.mark.parametrize("name", ["verify_random.json", "flow_rigid_body.json", "uniqueness_fubini.json"])
def test_reports_are_byte_identical(name):
    text = (SCEN / name).read_text()
    assert dumps_report(run(load_scenario(text))) == dumps_report(run(load_scenario(text)))


def test_cli_exit_codes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["spectrum", "--input", str(SCEN / "spectrum_diag.json"), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["pass"]
    assert "runtime_s" not in json.loads(out.read_text())
    assert main(["verify", "--input", str(SCEN / "bad_blocks.json")]) == 2
    assert "$.jordan_spec.blocks" in capsys.readouterr().err
    strict = tmp_path / "strict.json"
    data = json.loads((SCEN / "flow_rigid_body.json").read_text())
    data.update(T=1.0, bracket_points=0, tolerances={"integral_drift": 1e-300})
    strict.write_text(json.dumps(data))
    assert main(["flow", "--input", str(strict)]) == 1
    assert "failed: integral_drift" in capsys.readouterr().out
    odd = tmp_path / "odd.json"
    odd.write_text(json.dumps({"kind": "spectrum", "A": [[0, 1], [-1, 0]], "g": [[1, 0], [0, 1]], "p": [0, 1]}))
    assert main(["spectrum", "--input", str(odd)]) == 1


def test_cli_seed_override_and_timing(tmp_path):
    out = tmp_path / "r.json"
    assert main(["verify", "--input", str(SCEN / "verify_random.json"), "--seed", "3", "--timing",
                 "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["seed"] == 3 and rep["runtime_s"] > 0


def test_cli_parallel_matches_sequential(tmp_path):
    files = [str(SCEN / n) for n in ("verify_diag.json", "verify_random.json")]
    seq, par = tmp_path / "s.json", tmp_path / "p.json"
    assert main(["verify", "--input", *files, "--out", str(seq)]) == 0
    assert main(["verify", "--input", *files, "--parallel", "--out", str(par)]) == 0
    assert seq.read_bytes() == par.read_bytes()
