import json
import math
import subprocess
import sys

import numpy as np
import pytest

from subjet import cli


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def run(argv, monkeypatch=None, stdin=None):
    if stdin is not None:
        import io
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    return cli.main(argv)


# -- check -------------------------------------------------------------------

def test_check_passes_and_writes_report(tmp_path, capsys):
    cfg = write(tmp_path, "s.json", {"model": "nambu-goto", "checks": ["noether-identity"],
                                     "sampling": {"seed": 42, "count": 200}})
    out = tmp_path / "report.json"
    assert cli.main(["check", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    cli.validate(report, "report")
    (rec,) = report["checks"]
    assert rec["passed"] and rec["max_residual"] < 1e-8 * rec["scale"]
    assert report["seed"] == 42 and len(report["config_hash"]) == 64
    assert "PASS" in capsys.readouterr().out


def test_check_negative_control_fails(tmp_path, capsys):
    cfg = write(tmp_path, "s.json", {"model": "quadratic-control", "checks": ["noether-identity"],
                                     "sampling": {"count": 50}})
    assert cli.main(["check", "--config", cfg]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_empty_check_list(tmp_path):
    cfg = write(tmp_path, "s.json", {"model": "nambu-goto", "checks": []})
    out = tmp_path / "r.json"
    assert cli.main(["check", "--config", cfg, "--out", str(out)]) == 0
    assert json.loads(out.read_text())["checks"] == []


def test_check_is_deterministic(tmp_path):
    cfg = write(tmp_path, "s.json", {"model": "nambu-goto", "hamiltonian": "string-hamiltonian",
                                     "checks": ["first-variation", "associated-hamiltonian",
                                                "hamiltonian-noether"]})
    texts = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        assert cli.main(["check", "--config", cfg, "--seed", "7", "--samples", "15",
                         "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        report.pop("timestamp")
        texts.append(json.dumps(report, sort_keys=True))
    assert texts[0] == texts[1]


def test_seed_changes_samples(tmp_path):
    cfg = write(tmp_path, "s.json", {"model": "free-particle", "checks": ["noether-identity"]})
    residuals = []
    for seed in ("1", "2"):
        out = tmp_path / f"r{seed}.json"
        cli.main(["check", "--config", cfg, "--seed", seed, "--samples", "5", "--out", str(out)])
        residuals.append(json.loads(out.read_text())["checks"][0]["max_residual"])
    assert residuals[0] != residuals[1]


def test_tolerance_override(tmp_path):
    cfg = write(tmp_path, "s.json", {"model": "nambu-goto", "checks": ["noether-identity"],
                                     "sampling": {"count": 20}})
    assert cli.main(["check", "--config", cfg, "--tol", "1e-30"]) == 1


@pytest.mark.parametrize("payload", [
    {"model": "nambu-goto", "bogus": 1},
    {"model": "no-such-model"},
    {"model": "nambu-goto", "sampling": {"count": -1}},
    {"model": "nambu-goto", "checks": ["noether"]},
])
def test_invalid_scenarios_exit_2(tmp_path, capsys, payload):
    cfg = write(tmp_path, "s.json", payload)
    assert cli.main(["check", "--config", cfg]) == 2
    assert "error" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert cli.main(["check", "--config", str(tmp_path / "nope.json")]) == 2


def test_missing_hamiltonian(tmp_path):
    cfg = write(tmp_path, "s.json", {"model": "nambu-goto", "checks": ["hamiltonian-noether"]})
    assert cli.main(["check", "--config", cfg]) == 2


def test_sampling_exhausted_exit_3(tmp_path, capsys):
    # velocities far outside the light cone can never be accepted
    cfg = write(tmp_path, "s.json", {"model": "free-particle", "checks": ["noether-identity"],
                                     "sampling": {"velocity_range": [5, 6], "count": 3,
                                                  "rejection_limit": 50}})
    assert cli.main(["check", "--config", cfg]) == 3
    assert "SamplingExhausted" in capsys.readouterr().err


def test_usage_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["check", "--config", "x", "--format", "xml"])
    assert exc.value.code == 2


# -- grad-check ----------------------------------------------------------------

def test_grad_check_all_models(capsys):
    assert cli.main(["grad-check", "--samples", "10", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    for name in ("free-particle", "charged-particle", "nambu-goto", "quadratic-control",
                 "string-hamiltonian"):
        assert name in out


# -- transform ---------------------------------------------------------------

def transform(monkeypatch, capsys, payload, *args):
    code = run(["transform", *args], monkeypatch, json.dumps(payload))
    captured = capsys.readouterr()
    return code, (json.loads(captured.out) if code == 0 else captured.err)


def test_transform_boost_example(monkeypatch, capsys):
    code, out = transform(monkeypatch, capsys, {"three_velocity": [0, 0, 0]},
                          "--transition", "boost", "--alpha", str(math.log(2)))
    assert code == 0
    np.testing.assert_allclose(out["output"]["three_velocity"], [-0.6, 0, 0], atol=1e-15)
    assert out["input"] == {"three_velocity": [0, 0, 0]}
    cli.validate(out, "transform")


def test_transform_inverse_boost(monkeypatch, capsys):
    code, out = transform(monkeypatch, capsys, {"three_velocity": [-0.6, 0, 0]},
                          "--transition", "boost", "--alpha", str(math.log(2)), "--inverse")
    np.testing.assert_allclose(out["output"]["three_velocity"], [0, 0, 0], atol=1e-15)


def test_transform_round_trip(monkeypatch, capsys):
    jet = {"n": 2, "m": 4, "base": [0, 2], "x": [0.1, 0.2], "y": [0.3, 0.4],
           "yx": [[0.5, -0.2], [0.1, 0.7]]}
    code, out = transform(monkeypatch, capsys, jet, "--op", "roundtrip",
                          "--xq", "[[2.0, 0.5], [0.1, 1.0]]")
    assert code == 0
    np.testing.assert_allclose(out["output"]["yx"], jet["yx"], atol=1e-12)
    assert out["relation_residual"] < 1e-12


def test_transform_lift_and_project(monkeypatch, capsys):
    code, lifted = transform(monkeypatch, capsys, {"three_velocity": [0.6, 0, 0]},
                             "--op", "lift", "--xq", "[[1.25]]")
    np.testing.assert_allclose(np.array(lifted["output"]["zq"])[:, 0], [1.25, 0.75, 0, 0])
    code, projected = transform(monkeypatch, capsys, lifted["output"], "--op", "project")
    assert code == 0
    np.testing.assert_allclose(np.array(projected["output"]["yx"])[:, 0], [0.6, 0, 0])


def test_transform_section_jet(monkeypatch, capsys):
    jet = {"n": 1, "m": 4, "q": [0], "z": [0, 0, 0, 0], "zq": [[1], [0], [0], [0]]}
    code, out = transform(monkeypatch, capsys, jet, "--op", "section",
                          "--transition", "boost", "--alpha", str(math.log(2)))
    assert code == 0
    np.testing.assert_allclose(np.array(out["output"]["zq"])[:, 0], [1.25, -0.75, 0, 0],
                               atol=1e-15)
    assert out["relation_residual"] < 1e-12


def test_transform_project_zero_rank(monkeypatch, capsys):
    jet = {"n": 1, "m": 3, "q": [0], "z": [0, 0, 0], "zq": [[0], [0], [0]]}
    code, err = transform(monkeypatch, capsys, jet, "--op", "project")
    assert code == 3
    assert "NotRegularInChart" in err and "SplitChart(m=3, n=1, base=[0])" in err


def test_transform_singular_target(monkeypatch, capsys):
    jet = {"n": 1, "m": 3, "base": [1], "x": [0], "y": [0, 0], "yx": [[0], [0]]}
    code, err = transform(monkeypatch, capsys, jet, "--target-base", "0")
    assert code == 3 and "SingularM" in err


def test_transform_permutation_and_affine(monkeypatch, capsys):
    jet = {"n": 1, "m": 3, "base": [0], "x": [0], "y": [0, 0], "yx": [[2.0], [4.0]]}
    code, out = transform(monkeypatch, capsys, jet, "--transition", "permutation",
                          "--perm", "1,0,2")
    np.testing.assert_allclose(out["output"]["yx"], [[0.5], [2.0]])
    code, out = transform(monkeypatch, capsys, jet, "--transition", "affine",
                          "--matrix", "[[2,0,0],[0,1,0],[0,0,1]]")
    np.testing.assert_allclose(out["output"]["yx"], [[1.0], [2.0]])


def test_transform_bad_payload(monkeypatch, capsys):
    code, err = transform(monkeypatch, capsys, {"n": 1}, "--op", "lift")
    assert code == 2
    code, err = transform(monkeypatch, capsys, {"three_velocity": [0, 0, 0]},
                          "--transition", "permutation")
    assert code == 2


# -- simulate ----------------------------------------------------------------

def test_simulate_free_default(tmp_path):
    cfg = write(tmp_path, "s.json", {"model": "free-particle"})
    out = tmp_path / "traj.csv"
    assert cli.main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    data = np.genfromtxt(out, delimiter=",", names=True)
    assert data.dtype.names[0] == "tau" and data.dtype.names[-1] == "constraint_violation"
    assert np.all(data["constraint_violation"] < 1e-12)
    np.testing.assert_allclose(data["z1"], 0.0)
    np.testing.assert_allclose(data["z0"], data["tau"], atol=1e-12)


def test_simulate_constant_field_ten_periods(tmp_path, capsys):
    B = 2.0
    period = 2 * np.pi / B
    cfg = write(tmp_path, "s.json", {
        "model": "charged-particle", "potential": {"kind": "magnetic", "B": B},
        "integration": {"z0": [0, 0, 0, 0], "v0": [1.25, 0.75, 0, 0],
                        "step": period / 500, "steps": 5000},
        "output": {"format": "json"}})
    out = tmp_path / "traj.json"
    assert cli.main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    cli.validate(json.loads(out.read_text()), "trajectory")
    summary = dict(line.split(":", 1) for line in capsys.readouterr().out.splitlines())
    assert float(summary["closure_error".rjust(16)]) < 1e-5


def test_simulate_rejects_spacelike(tmp_path, capsys):
    cfg = write(tmp_path, "s.json", {"model": "free-particle",
                                     "integration": {"z0": [0, 0, 0, 0], "v0": [0.5, 1, 0, 0],
                                                     "step": 0.01, "steps": 10}})
    assert cli.main(["simulate", "--config", cfg]) == 2
    assert "timelike" in capsys.readouterr().err


def test_simulate_rejects_string_models(tmp_path):
    cfg = write(tmp_path, "s.json", {"model": "nambu-goto"})
    assert cli.main(["simulate", "--config", cfg]) == 2


def test_simulate_step_failure(tmp_path):
    cfg = write(tmp_path, "s.json", {
        "model": "charged-particle", "potential": {"kind": "magnetic", "B": 50.0},
        "integration": {"z0": [0, 0, 0, 0], "v0": [1.25, 0.75, 0, 0], "step": 0.5, "steps": 10}})
    assert cli.main(["simulate", "--config", cfg]) == 3


def test_console_script(tmp_path):
    cfg = write(tmp_path, "s.json", {"model": "free-particle", "checks": ["noether-identity"],
                                     "sampling": {"count": 5}})
    proc = subprocess.run([sys.executable, "-m", "subjet.cli", "check", "--config", cfg],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "overall: PASS" in proc.stdout
