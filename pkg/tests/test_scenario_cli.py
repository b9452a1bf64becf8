"""Scenario validation, the corpus, artifact determinism, and the CLI.

CLI tests call main() in-process and assert on exit codes; artifact tests
compare bytes across repeated runs.  Coarse meshes keep everything fast.
"""

import copy
import json
import os

import numpy as np
import pytest

import alaplace as al
from alaplace.cli import main


def _coarse(cid, h=0.25):
    cfg = al.corpus_entry(cid)["config"]
    cfg["h"] = h
    return cfg


# ----------------------------------------------------------------------------
# validation


def test_unknown_top_level_key():
    cfg = _coarse("torsion-p2")
    cfg["extra"] = 1
    with pytest.raises(al.ScenarioError, match="extra"):
        al.load_scenario(cfg)


def test_unknown_nested_key_reports_path():
    cfg = _coarse("torsion-p2")
    cfg["convection"]["typo"] = 1
    with pytest.raises(al.ScenarioError, match="convection"):
        al.load_scenario(cfg)


def test_missing_required_key():
    cfg = _coarse("torsion-p2")
    del cfg["bracket"]
    with pytest.raises(al.ScenarioError, match="bracket"):
        al.load_scenario(cfg)


def test_bad_young_parameters_wrapped():
    cfg = _coarse("torsion-p2")
    cfg["young"] = {"family": "power", "p": 0.5}
    with pytest.raises(al.ScenarioError, match="young"):
        al.load_scenario(cfg)


def test_bad_scalar_kind_reports_path():
    cfg = _coarse("example-4.2")
    cfg["convection"]["g"] = {"kind": "nope"}
    with pytest.raises(al.ScenarioError, match="convection.g"):
        al.load_scenario(cfg)


def test_bracket_must_straddle_zero():
    cfg = _coarse("torsion-p2")
    cfg["bracket"] = {"kind": "constants", "lower": 0.5, "upper": 1.0}
    with pytest.raises(al.ScenarioError, match="bracket"):
        al.load_scenario(cfg)


def test_auxiliary_bracket_needs_one_sided():
    cfg = _coarse("torsion-p2")
    cfg["bracket"] = {"kind": "auxiliary"}
    with pytest.raises(al.ScenarioError, match="one_sided"):
        al.load_scenario(cfg)


def test_sign_check_value_validated():
    cfg = _coarse("torsion-p2")
    cfg["checks"]["sign"] = "nonzero"
    with pytest.raises(al.ScenarioError, match="sign"):
        al.load_scenario(cfg)


def test_domain_validation():
    cfg = _coarse("torsion-p2")
    cfg["domain"] = {"dim": 1, "x": [1.0, -1.0]}
    with pytest.raises(al.ScenarioError, match="domain"):
        al.load_scenario(cfg)
    cfg["domain"] = {"dim": 1, "x": [-1.0, 1.0], "y": [0.0, 1.0]}
    with pytest.raises(al.ScenarioError, match="'y'"):
        al.load_scenario(cfg)


def test_load_scenario_from_file(tmp_path):
    path = tmp_path / "sc.json"
    path.write_text(json.dumps(_coarse("torsion-p2")))
    sc = al.load_scenario(str(path))
    assert sc.name == "torsion-p2"


# ----------------------------------------------------------------------------
# corpus and runner


def test_corpus_ids_stable():
    assert al.corpus_ids() == [
        "example-4.1", "example-4.2", "example-4.3", "example-4.4",
        "torsion-p2", "torsion-p3", "plaplace-exact",
    ]


def test_corpus_entry_is_a_copy():
    one = al.corpus_entry("torsion-p2")
    one["config"]["h"] = 99.0
    again = al.corpus_entry("torsion-p2")
    assert again["config"]["h"] != 99.0
    with pytest.raises(KeyError):
        al.corpus_entry("nope")


def test_run_scenario_report_shape():
    # default h here: the exact-solution tolerance is calibrated for it
    rep = al.run_scenario(al.load_scenario(al.corpus_entry("torsion-p2")["config"]))
    assert rep["passed"]
    assert rep["solve"]["converged"]
    assert rep["checks"]["exact"]["passed"]
    assert rep["checks"]["sign"]["passed"]
    json.dumps(rep)  # JSON-safe throughout


def test_auxiliary_bracket_end_to_end():
    cfg = _coarse("example-4.4", h=0.125)
    cfg["bracket"] = {"kind": "auxiliary"}
    cfg["checks"] = {"hypothesis": True}
    rep = al.run_scenario(al.load_scenario(cfg))
    assert rep["solve"]["converged"]
    assert rep["checks"]["hypothesis"]["passed"]


def test_artifacts_deterministic(tmp_path):
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        al.run_scenario(al.load_scenario(_coarse("example-4.2", h=0.125)), out_dir=str(out))
        outs.append({name: (out / name).read_bytes() for name in
                     ("report.json", "field.csv", "plotdata.csv")})
    assert outs[0] == outs[1]


def test_field_artifact_reads_back(tmp_path):
    cfg = _coarse("torsion-p2", h=0.03125)
    al.run_scenario(al.load_scenario(cfg), out_dir=str(tmp_path))
    mesh = al.interval_mesh(-1.0, 1.0, cfg["h"])
    u = al.read_field_csv(tmp_path / "field.csv", mesh=mesh)
    exact = 0.5 * (1.0 - mesh.nodes[:, 0] ** 2)
    assert np.max(np.abs(u.values - exact)) < 1e-10
    with open(tmp_path / "plotdata.csv") as fh:
        header = fh.readline().strip()
    assert header == "node_id,x,u,grad_norm"


def test_trivial_solution_warns_but_passes():
    rep = al.run_scenario(al.load_scenario(_coarse("example-4.1", h=0.125)))
    assert rep["passed"]
    assert any("trivial" in w for w in rep["warnings"])


# ----------------------------------------------------------------------------
# cli


def test_cli_corpus_list(capsys):
    assert main(["corpus", "list"]) == 0
    out = capsys.readouterr().out
    for cid in al.corpus_ids():
        assert cid in out


def test_cli_corpus_run_with_h_override(tmp_path, capsys):
    code = main(["corpus", "run", "torsion-p2", "--h", "0.03125", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "torsion-p2" / "report.json").exists()
    assert "[PASS]" in capsys.readouterr().out


def test_cli_run_files_parallel(tmp_path, capsys):
    paths = []
    for cid, h in (("torsion-p2", 0.03125), ("example-4.2", 0.125)):
        p = tmp_path / (cid + ".json")
        p.write_text(json.dumps(_coarse(cid, h=h)))
        paths.append(str(p))
    assert main(["run", *paths, "--jobs", "2"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 2


def test_cli_overrides_file_and_failure_exit(tmp_path, capsys):
    ov = tmp_path / "ov.json"
    ov.write_text(json.dumps({"h": 0.25, "checks": {"exact": {"name": "torsion_p2", "tol": 1e-12}}}))
    code = main(["corpus", "run", "torsion-p2", "--overrides", str(ov)])
    assert code == 1
    assert "[FAIL]" in capsys.readouterr().out


def test_cli_check_young(tmp_path, capsys):
    spec = tmp_path / "young.json"
    spec.write_text(json.dumps({"family": "power_sum", "p": 3.0, "q": 2.0}))
    assert main(["check", "young", str(spec)]) == 0
    out = capsys.readouterr().out
    assert "consistency ok" in out


def test_cli_check_structure(tmp_path, capsys):
    spec = tmp_path / "young.json"
    spec.write_text(json.dumps({"family": "sqrt_shift", "gamma": 1.5}))
    assert main(["check", "structure", str(spec), "--samples", "500"]) == 0
    assert "result      ok" in capsys.readouterr().out


def test_cli_bad_config_is_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"young": {"family": "power", "p": 2.0}}))
    assert main(["run", str(bad)]) == 2
    assert "error" in capsys.readouterr().err
