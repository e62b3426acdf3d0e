import json
import subprocess
import sys

import numpy as np
import pytest

from vekua_bergman import cli
from vekua_bergman.config import DEFAULTS, ConfigError, ExperimentConfig
from vekua_bergman.geometry import build_disk
from vekua_bergman.tables import read_csv, read_grid_function, write_csv, write_grid_function

SMALL_DISK = {"kind": "disk", "radial_order": 24, "angular_order": 48}


def _run(tmp_path, command, doc, *extra, name="cfg.json"):
    cfg = tmp_path / name
    cfg.write_text(json.dumps(doc))
    out = tmp_path / f"out_{command}"
    code = cli.main([command, "--config", str(cfg), "--output", str(out), *extra])
    return code, out


def _json(path):
    return json.loads(path.read_text())


def test_kernel_command(tmp_path):
    code, out = _run(tmp_path, "kernel", {"domain": SMALL_DISK, "basis": {"N": 15}})
    assert code == 0
    cols = read_csv(out / "kernel.csv", ["zeta_re", "K_re", "L_im", "N", "oracle_delta"])
    assert cols["zeta_re"].size == 625
    assert np.all(cols["N"] == 32)
    rep = _json(out / "kernel_report.json")
    assert rep["oracle_delta_max"]["pass"]
    assert rep["alpha_zero_max"]["value"] == 0.0
    assert all(m["pass"] for m in rep["symmetry"].values())
    assert rep["config"]["domain"]["radial_order"] == 24
    assert rep["exclusion_factor"] == 0.5 and rep["h"] > 0
    assert len(rep["sup_over_norm"]["per_member"]) == 32
    assert rep["sup_over_norm"]["tolerance"] == "report-only"


def test_kernel_deterministic(tmp_path):
    doc = {"domain": SMALL_DISK, "basis": {"N": 6}}
    _, a = _run(tmp_path, "kernel", doc)
    first = (a / "kernel.csv").read_bytes()
    _, b = _run(tmp_path, "kernel", doc)
    assert (b / "kernel.csv").read_bytes() == first


def test_truncation_and_quad_scale_overrides(tmp_path):
    code, out = _run(tmp_path, "kernel", {"domain": SMALL_DISK}, "--truncation", "3",
                     "--quad-scale", "0.5")
    assert code == 0
    rep = _json(out / "kernel_report.json")
    assert rep["truncation_N"] == 8
    assert rep["config"]["domain"]["angular_order"] == 24


def test_reproduce_polynomial(tmp_path):
    doc = {"domain": SMALL_DISK, "basis": {"N": 5},
           "target": {"kind": "polynomial", "coefficients": [[0, 1], 0, 0, 1]}}
    code, out = _run(tmp_path, "reproduce", doc)
    assert code == 0
    rep = _json(out / "reproduce_report.json")
    assert rep["max_error"]["pass"] and rep["route_agreement"]["pass"]
    series = rep["refinement_series"]
    assert series[-1]["max_error"] <= 1e-8 < series[0]["max_error"]
    cols = read_csv(out / "reproduce.csv", ["W_re", "R_re", "error"])
    assert cols["error"].max() <= 1e-8


def test_reproduce_exact_family(tmp_path):
    doc = {"domain": SMALL_DISK, "coefficients": {"preset": "constant", "re": 0.2},
           "basis": {"generator": "formal_powers", "N": 2},
           "target": {"kind": "exact_family", "family": "constant_b", "params": {"re": 0.2}}}
    code, out = _run(tmp_path, "reproduce", doc)
    assert code == 0
    rep = _json(out / "reproduce_report.json")
    assert rep["max_error"]["pass"] is None
    assert rep["target_residual"] <= 1e-5


def test_uncertified_target_refused(tmp_path, capsys):
    doc = {"domain": SMALL_DISK, "coefficients": {"preset": "constant", "re": 0.2},
           "basis": {"generator": "formal_powers", "N": 1},
           "target": {"kind": "exact_family", "family": "constant_b", "params": {"re": 0.3}}}
    code, out = _run(tmp_path, "reproduce", doc)
    assert code == 2
    assert "do not match" in capsys.readouterr().err
    assert not (out / "reproduce_report.json").exists()
    doc["target"] = {"kind": "polynomial"}
    assert _run(tmp_path, "reproduce", doc)[0] == 2


def test_project_presets(tmp_path):
    code, out = _run(tmp_path, "project", {"domain": SMALL_DISK, "basis": {"N": 6}})
    assert code == 0
    rep = _json(out / "project_report.json")
    assert rep["distance_to_expected"]["pass"]
    assert rep["idempotence"]["pass"] and rep["self_adjointness"]["pass"]
    d = build_disk(0j, 1.0, 24, 48)
    P = read_grid_function(out / "projected.csv", d)
    assert np.abs(P.values).max() <= 1e-9

    code, out = _run(tmp_path, "project", {"domain": SMALL_DISK, "basis": {"N": 6},
                                          "project": {"preset": "member_plus_zbar", "index": 3}})
    assert code == 0
    assert _json(out / "project_report.json")["distance_to_expected"]["pass"]


def test_project_from_csv_and_mismatch(tmp_path):
    d = build_disk(0j, 1.0, 24, 48)
    from vekua_bergman.gridfn import sample
    src = tmp_path / "phi.csv"
    write_grid_function(src, sample(lambda z: z ** 2 + np.abs(z), d))
    doc = {"domain": SMALL_DISK, "basis": {"N": 4}, "project": {"input": str(src)}}
    assert _run(tmp_path, "project", doc)[0] == 0
    # a file sampled on a different rule does not cover the nodes
    other = tmp_path / "other.csv"
    write_grid_function(other, sample(lambda z: z, build_disk(0j, 1.0, 24, 47)))
    doc["project"] = {"input": str(other)}
    assert _run(tmp_path, "project", doc)[0] == 2


def test_verify_analytic_passes(tmp_path):
    code, out = _run(tmp_path, "verify", {"domain": SMALL_DISK, "basis": {"N": 10}})
    rep = _json(out / "verify_report.json")
    assert code == 0 and rep["all_pass"]
    names = {c["name"] for c in rep["checks"]}
    assert {"oracle.classical_disk", "project.zbar_annihilated", "quadrature.monomials",
            "teodorescu.T1_anchor_C"} <= names


def test_verify_formal_powers(tmp_path):
    doc = {"domain": SMALL_DISK, "coefficients": {"preset": "constant", "re": 0.2},
           "basis": {"generator": "formal_powers", "N": 1}}
    code, out = _run(tmp_path, "verify", doc)
    rep = _json(out / "verify_report.json")
    assert code == 0, [c for c in rep["checks"] if not c["pass"]]
    assert any(c["name"] == "solver.contraction_ratio" for c in rep["checks"])


def test_verify_reports_noncontraction(tmp_path):
    doc = {"domain": SMALL_DISK, "coefficients": {"preset": "constant", "re": 0.6},
           "basis": {"generator": "formal_powers", "N": 1}}
    code, out = _run(tmp_path, "verify", doc)
    rep = _json(out / "verify_report.json")
    assert any(w.startswith("non-contraction") for w in rep["warnings"])
    warn = [c for c in rep["checks"] if c["name"] == "solver.noncontraction_warning"]
    assert warn and warn[0]["pass"]
    assert rep["contraction_q"] == pytest.approx(1.2)
    assert code in (0, 4)


def test_verify_invariant_violation_exit_4(tmp_path):
    # a zero certification tolerance cannot be met by rounded FD residuals
    doc = {"domain": SMALL_DISK, "basis": {"N": 3}, "certify": {"target_tol": 0.0}}
    code, out = _run(tmp_path, "verify", doc)
    assert code == 4
    rep = _json(out / "verify_report.json")
    assert not rep["all_pass"]
    assert [c["name"] for c in rep["checks"] if not c["pass"]] == ["basis.member_residual"]


def test_divergence_exit_3(tmp_path, capsys):
    doc = {"domain": SMALL_DISK, "coefficients": {"preset": "constant", "re": 3.0},
           "basis": {"generator": "formal_powers", "N": 0}}
    assert _run(tmp_path, "kernel", doc)[0] == 3
    assert "[basis]" in capsys.readouterr().err


@pytest.mark.parametrize("doc", [
    {"domain": {"kind": "ellipse"}},
    {"domain": {"kind": "disk", "radius": -1}},
    {"basis": {"N": 2.5}},
    {"coefficients": {"preset": "constant", "re": 0.1}},
    {"bogus": 1},
    {"evaluation": {"grid": {"x": [0, 1]}}},
    {"solver": {"exclusion_factor": 3}},
], ids=["kind", "radius", "N", "analytic-needs-zero", "section", "grid", "eps"])
def test_config_errors_exit_2(tmp_path, doc):
    assert _run(tmp_path, "kernel", doc)[0] == 2


def test_unreadable_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["kernel", "--config", str(bad)]) == 2


def test_evaluation_outside_region_exit_2(tmp_path):
    doc = {"domain": SMALL_DISK, "basis": {"N": 2}, "evaluation": {"points": [[0.0, 0.95]]}}
    assert _run(tmp_path, "kernel", doc)[0] == 2


def test_config_round_trip():
    cfg = ExperimentConfig.from_dict({"domain": {"radius": 2}, "seed": 7})
    again = ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again.raw == cfg.raw
    assert cfg.raw["domain"]["radius"] == 2.0
    assert ExperimentConfig.from_dict({}).raw["basis"] == DEFAULTS["basis"]
    with pytest.raises(ConfigError):
        cfg.with_overrides(quad_scale=0)


def test_csv_coefficients(tmp_path):
    xs = np.linspace(-1, 1, 21)
    X, Y = np.meshgrid(xs, xs)
    keep = X ** 2 + Y ** 2 <= 1.2
    rows = [[x, y, 0.0, 0.0, 0.2, 0.0] for x, y in zip(X[keep], Y[keep])]
    path = tmp_path / "coef.csv"
    write_csv(path, ["x", "y", "a_re", "a_im", "b_re", "b_im"], rows)
    doc = {"domain": SMALL_DISK, "coefficients": {"preset": "csv", "path": str(path)},
           "basis": {"generator": "formal_powers", "N": 1}}
    code, out = _run(tmp_path, "kernel", doc)
    assert code == 0
    rep = _json(out / "kernel_report.json")
    assert rep["M_is_estimate"] and rep["M"] == pytest.approx(0.2)


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "vekua_bergman", "--version"],
                       capture_output=True, text=True, check=True)
    assert r.stdout.strip().endswith("0.1.0")
