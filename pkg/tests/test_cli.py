from __future__ import annotations

import json
import subprocess
import sys

import pytest

from pcbrick import cli, pcgates
from pcbrick.vqe import ExperimentResult


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gates_verify_passes(capsys):
    code, out, _ = run(["gates", "verify", "--draws", "20"], capsys)
    assert code == 0
    assert "FAIL" not in out
    assert "CNOT counts (A/B/G): 3/3/3" in out


def test_gates_verify_names_corrupted_check(capsys, monkeypatch):
    original = pcgates._gate_a
    monkeypatch.setattr(pcgates, "_gate_a", lambda t, p: -original(t, p))
    code, out, err = run(["gates", "verify", "--draws", "5"], capsys)
    assert code == 1
    assert "decompose[compact] A" in err
    assert "FAIL" in out


@pytest.mark.parametrize(
    ("argv", "energy"),
    [(["--model", "xxz", "--sites", "4", "--gamma", "1"], -6.4641), (["--model", "nnn", "--sites", "8"], -14.7262)],
)
def test_ed(capsys, argv, energy):
    code, out, _ = run(["ed", *argv], capsys)
    payload = json.loads(out)
    assert code == 0
    assert list(payload) == ["model", "L", "gamma", "sector", "ground_energy"]
    assert round(payload["ground_energy"], 4) == energy


def test_ed_sector(capsys):
    code, out, _ = run(["ed", "--sites", "4", "--sector", "1"], capsys)
    assert code == 0 and json.loads(out)["sector"] == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["ed", "--model", "xxz", "--sites", "1"],
        ["ed", "--sites", "4", "--sector", "5"],
        ["ed", "--model", "heisenberg"],
        ["vqe", "--trials", "0"],
        ["fidelity", "--gate", "Q"],
        ["vqe", "--optimizer", "bfgs"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = cli.main(argv)
        raise SystemExit(code)
    assert exc.value.code == 2


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"model": "xx", "sites": 8}))
    code, out, _ = run(["ed", "--config", str(cfg)], capsys)
    assert code == 0 and round(json.loads(out)["ground_energy"], 4) == -9.5175
    code, out, _ = run(["ed", "--config", str(cfg), "--sites", "4"], capsys)
    assert json.loads(out)["L"] == 4


def test_config_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"sites": 4, "colour": "blue"}))
    code, _, err = run(["ed", "--config", str(cfg)], capsys)
    assert code == 2 and "colour" in err


def test_missing_config_is_usage_error(tmp_path, capsys):
    code, _, err = run(["ed", "--config", str(tmp_path / "absent.json")], capsys)
    assert code == 2 and "absent.json" in err


def test_vqe_writes_json_and_csv(tmp_path, capsys):
    out_path = tmp_path / "v.json"
    code, out, _ = run(
        ["vqe", "--gate", "G", "--sites", "4", "--trials", "2", "--budget", "100", "--output", str(out_path)], capsys
    )
    summary = json.loads(out)
    assert code == 0
    assert summary["mean_energy"] < -3 and summary["relative_error"] > 0
    result = ExperimentResult.load(out_path)
    assert result.config["run"]["seed"] == 0 and result.config["seed"] == 0
    assert result.compute_aggregates() == result.aggregates
    lines = (tmp_path / "v.csv").read_text().splitlines()
    assert lines[0] == "trial,eval,cost"
    assert len(lines) - 1 == sum(len(t.trace) for t in result.trials)


def test_vqe_same_seed_byte_identical(tmp_path, capsys):
    out_path = tmp_path / "v.json"
    argv = ["vqe", "--gate", "A", "--sites", "4", "--trials", "2", "--budget", "80", "--seed", "9", "--output", str(out_path)]
    run(argv, capsys)
    first = out_path.read_bytes()
    run(argv, capsys)
    assert out_path.read_bytes() == first


def test_fidelity_reports_epsilon(tmp_path, capsys):
    out_path = tmp_path / "f.json"
    code, out, _ = run(
        ["fidelity", "--sites", "4", "--particles", "2", "--gate", "A", "--layers", "4", "--samples", "2", "--trials", "1",
         "--budget", "300", "--output", str(out_path)],
        capsys,
    )
    summary = json.loads(out)
    assert code == 0 and summary["free_params"] == 24
    assert 0 <= summary["epsilon_bar"] <= 1
    assert (tmp_path / "f.csv").exists()


def test_unwritable_output_reports_path(tmp_path, capsys):
    bad = tmp_path / "missing-dir" / "v.json"
    code, _, err = run(["vqe", "--trials", "1", "--budget", "5", "--output", str(bad)], capsys)
    assert code == 1 and str(bad) in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pcbrick", "ed", "--sites", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["ground_energy"] == pytest.approx(-3.0)
