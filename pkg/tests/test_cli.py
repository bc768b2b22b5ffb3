import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from qmpa import catalog
from qmpa.cli import main
from qmpa.models import decode_matrix, encode_matrix, model_to_dict


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    report = json.loads(out)
    assert report["exit_code"] == code
    return code, report


def write_model(path, model):
    path.write_text(json.dumps(model_to_dict(model)))
    return path


def write_state(path, rho):
    path.write_text(json.dumps(encode_matrix(rho)))
    return path


def test_analyze_cnot(capsys):
    code, rep = run_json(capsys, "analyze", "cnot_ruo")
    assert code == 0 and rep["passed"]
    assert rep["attractor_dimension"] == 6
    spectrum = {tuple(e["eigenvalue"]): e["multiplicity"] for e in rep["asymptotic_spectrum"]}
    assert spectrum == {(1.0, 0.0): 5, (-1.0, 0.0): 1}
    for c in rep["checks"] + rep["algebra_closure"] + rep["cross_validation"]["checks"]:
        assert "residual" in c and "tol" in c


def test_analyze_jump(capsys):
    code, rep = run_json(capsys, "analyze", "jump_lindblad")
    assert code == 0
    eigs = sorted(complex(*e["eigenvalue"]).imag for e in rep["asymptotic_spectrum"])
    assert np.allclose(eigs, [-1, 0, 1])
    assert all(abs(e["eigenvalue"][0]) <= 1e-9 for e in rep["asymptotic_spectrum"])


@pytest.mark.parametrize("k", ["power:1", "log1p"])
def test_analyze_with_other_k(capsys, k):
    code, rep = run_json(capsys, "analyze", "cnot_ruo", "--k", k)
    assert code == 0 and rep["k"] == k


def test_invalid_k(capsys):
    code, rep = run_json(capsys, "analyze", "cnot_ruo", "--k", "power:3")
    assert code == 2 and rep["error"]["code"] == "invalid_argument"


@pytest.mark.parametrize("text", ["{not json", '{"kind": "discrete"}', "[1, 2]"])
def test_malformed_file(capsys, tmp_path, text):
    p = tmp_path / "bad.json"
    p.write_text(text)
    code, rep = run_json(capsys, "analyze", p)
    assert code == 3


def test_missing_file(capsys, tmp_path):
    code, _ = run_json(capsys, "analyze", tmp_path / "nope.json")
    assert code == 3


def test_trace_increasing_kraus(capsys, tmp_path):
    doc = model_to_dict(catalog.cnot_ruo())
    doc["kraus"][0] = encode_matrix(1.2 * decode_matrix(doc["kraus"][0]))
    doc.pop("trace_preserving")
    p = tmp_path / "corrupt.json"
    p.write_text(json.dumps(doc))
    code, rep = run_json(capsys, "verify", p)
    assert code == 4


def test_amplitude_damping_partial(capsys, tmp_path):
    p = write_model(tmp_path / "ad.json", catalog.amplitude_damping(0.3))
    code, rep = run_json(capsys, "verify", p)
    assert code == 5 and rep["partial"]
    assert rep["errors"][0]["rank"] == 1
    # spectral-only checks still ran
    assert any(c["name"] == "schrodinger_eigen_residual" and c["passed"] for c in rep["checks"])
    code, rep = run_json(capsys, "analyze", p)
    assert code == 5 and rep["partial"]
    assert [e["eigenvalue"] for e in rep["asymptotic_spectrum"]] == [[1.0, 0.0]]


@pytest.mark.parametrize("name", ["cnot_ruo", "jump_lindblad"])
def test_verify_bundled(capsys, name):
    code, rep = run_json(capsys, "verify", name)
    assert code == 0 and rep["passed"] and not rep["partial"]
    assert rep["seed"] == 0
    assert all(c["residual"] <= c["tol"] for c in rep["checks"] if c["tol"] > 0)


def test_verify_single_k(capsys):
    code, rep = run_json(capsys, "verify", "cnot_ruo", "--k", "log1p")
    names = [c["name"] for c in rep["checks"] if c["name"].startswith("biorthogonality")]
    assert code == 0 and names == ["biorthogonality[log1p]"]


def test_determinism():
    cmd = [sys.executable, "-m", "qmpa.cli", "verify", "cnot_ruo", "--seed", "7"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["seed"] == 7


def test_tstate_command(capsys):
    code, rep = run_json(capsys, "tstate", "cnot_ruo")
    assert code == 0
    assert rep["tstate"]["stationary"]


def test_dual_command(capsys):
    code, rep = run_json(capsys, "dual", "jump_lindblad", "--k", "log1p")
    assert code == 0 and rep["biorthogonality_deviation"] <= 1e-8
    assert sum(len(b["dual"]) for b in rep["blocks"]) == 4


def test_recover_command(capsys):
    code, rep = run_json(capsys, "recover", "cnot_ruo")
    assert code == 0
    assert len(rep["recovery"]["kraus"]) == 2
    assert all(c["passed"] for c in rep["checks"])


def test_recover_rejects_semigroup(capsys):
    code, _ = run_json(capsys, "recover", "jump_lindblad")
    assert code == 3


def test_evolve_depolarizing(capsys, tmp_path, rng):
    p = write_model(tmp_path / "dep.json", catalog.depolarizing(0.3))
    s = write_state(tmp_path / "rho.json", catalog.random_state(2, rng))
    code, rep = run_json(capsys, "evolve", p, "--initial", s, "--steps", 10)
    assert code == 0
    assert np.allclose(decode_matrix(rep["asymptotic_state"]), np.eye(2) / 2)


def test_evolve_stationary_semigroup(capsys, tmp_path):
    X1, X2, _, _ = catalog.jump_attractors()
    rho = (0.5 * X1 + 0.5 * X2) / 3
    s = write_state(tmp_path / "rho.json", rho)
    code, rep = run_json(capsys, "evolve", "jump_lindblad", "--initial", s, "--time", 3.7)
    assert code == 0 and rep["time"] == 3.7
    assert np.allclose(decode_matrix(rep["asymptotic_state"]), rho, atol=1e-10)


def test_evolve_without_tstate_uses_spectral_dual(capsys, tmp_path):
    p = write_model(tmp_path / "ad.json", catalog.amplitude_damping(0.3))
    code, rep = run_json(capsys, "evolve", p, "--steps", 4)
    assert code == 0 and rep["dual_basis"] == "spectral"
    assert np.allclose(decode_matrix(rep["asymptotic_state"]), np.diag([1, 0]))


def test_evolve_compare_exact_csv(capsys, tmp_path, rng):
    s = write_state(tmp_path / "rho.json", catalog.random_state(4, rng))
    out = tmp_path / "curves"
    code, rep = run_json(capsys, "evolve", "cnot_ruo", "--initial", s, "--compare-exact",
                         "--csv", out)
    assert code == 0
    pts = rep["convergence"]["points"]
    assert len(pts) == 51 and pts[-1][1] < 1e-10
    assert abs(rep["convergence"]["rate"] - rep["second_modulus"]) <= 0.05
    with open(out / "convergence.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "distance"] and len(rows) == 52


def test_gibbs_coeffs_on_hamiltonian(capsys, tmp_path):
    beta = 0.8
    basis = tmp_path / "basis.json"
    basis.write_text(json.dumps([encode_matrix(catalog.jump_hamiltonian())]))
    code, rep = run_json(capsys, "gibbs", "jump_lindblad", "--basis", basis,
                         "--coeffs", json.dumps([-beta]))
    X1, X2, _, _ = catalog.jump_attractors()
    assert code == 0
    expected = (X1 + np.exp(-beta) * X2) / (3 + 3 * np.exp(-beta))
    assert np.allclose(decode_matrix(rep["state"]), expected, atol=1e-10)


def test_gibbs_sigma_gives_zero(capsys):
    code, rep = run_json(capsys, "gibbs", "jump_lindblad", "--scope", "fixed")
    assert code == 0 and rep["scope"] == "fixed"
    assert np.allclose(rep["coefficients"], 0, atol=1e-10)


def test_gibbs_limit_table(capsys, tmp_path):
    P, Q = catalog.ketbra(catalog.PHI, catalog.PHI), catalog.ketbra(catalog.PSI, catalog.PSI)
    rho = 0.5 * (np.eye(4) - P - Q + 1j * catalog.X_MINUS_ONE / np.sqrt(3))
    s = write_state(tmp_path / "rho.json", rho)
    code, rep = run_json(capsys, "gibbs", "cnot_ruo", "--state", s, "--form", 1)
    assert code == 0
    assert len(rep["limit_procedure"]) == 8
    assert all(p["reconstruction_error"] <= 1e-8 for p in rep["limit_procedure"])


def test_gibbs_not_representable(capsys, tmp_path):
    from qmpa.models import DiscreteModel
    model = DiscreteModel(4, catalog.cnot_ruo().kraus, tstate=catalog.cnot_tstate())
    p = write_model(tmp_path / "cnot_sigma.json", model)
    Z = catalog.ketbra(catalog.PSI, catalog.PHI) + catalog.ketbra(catalog.PHI, catalog.PSI)
    basis = tmp_path / "basis.json"
    basis.write_text(json.dumps([encode_matrix(np.eye(4)), encode_matrix(Z)]))
    code, rep = run_json(capsys, "gibbs", p, "--basis", basis, "--coeffs", "[0, 1]", "--form", 1)
    assert code == 0
    s = write_state(tmp_path / "rho.json", decode_matrix(rep["state"]))
    code, rep = run_json(capsys, "gibbs", p, "--basis", basis, "--state", s, "--form", 2)
    assert code == 7 and rep["error"]["code"] == "not_form2_representable"
    code, rep = run_json(capsys, "gibbs", p, "--basis", basis, "--state", s, "--form", 1)
    assert code == 0 and np.allclose(rep["coefficients"][1], 1.0)


def test_gibbs_bad_coeffs(capsys):
    code, rep = run_json(capsys, "gibbs", "jump_lindblad", "--coeffs", "[1, oops]")
    assert code == 3


def test_human_output(capsys):
    code, out = run(capsys, "tstate", "cnot_ruo", "--human")
    assert code == 0
    assert "exit_code: 0" in out and "tstate:" in out
    with pytest.raises(json.JSONDecodeError):
        json.loads(out)


def test_tolerance_override(capsys):
    code, rep = run_json(capsys, "tstate", "cnot_ruo", "--tol-peripheral", 1e-10, "--tol-eigen", 1e-7)
    assert code == 0
