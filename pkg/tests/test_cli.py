"""CLI modes, strict config handling, manifests, and atomic output."""

import json
import os
from pathlib import Path

import pytest

from floqmbl import parse_qasm
from floqmbl.cli import main, resolve_config, run


def _write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj, indent=1))
    return str(path)


def _base_config(**over):
    cfg = {
        "mode": "dynamics",
        "seed": 3,
        "circuit": {"num_qubits": 3, "theta_base": 0.8, "t_base": 0.2},
        "dynamics": {"n_steps": 8},
    }
    cfg.update(over)
    return cfg


class TestConfigResolution:
    def test_defaults_materialized(self):
        resolved = resolve_config(_base_config())
        circ = resolved["circuit"]
        assert circ["jz"] == 0.1
        assert circ["theta_amplitude"] == pytest.approx(0.16)
        assert circ["wavenumber"] == pytest.approx(0.6180339887498949)
        assert circ["phi"] == 0.0
        assert resolved["output_dir"] == "out"

    def test_resolution_is_idempotent(self):
        once = resolve_config(_base_config())
        twice = resolve_config(json.loads(json.dumps(once)))
        assert once == twice

    def test_unknown_top_level_key_rejected(self):
        with pytest.raises(Exception, match="unknown key"):
            resolve_config(_base_config(extra=1))

    def test_unknown_circuit_key_rejected(self):
        cfg = _base_config()
        cfg["circuit"]["tt_base"] = 0.3
        with pytest.raises(Exception, match="tt_base"):
            resolve_config(cfg)

    def test_missing_num_qubits_named(self):
        cfg = _base_config()
        del cfg["circuit"]["num_qubits"]
        with pytest.raises(Exception, match="num_qubits"):
            resolve_config(cfg)

    def test_wrong_mode_block_rejected(self):
        cfg = _base_config()
        cfg["scan"] = {}
        with pytest.raises(Exception, match="scan"):
            resolve_config(cfg)

    def test_mode_must_be_known(self):
        with pytest.raises(Exception, match="mode"):
            resolve_config(_base_config(mode="plot"))


class TestCliRuns:
    def test_dynamics_mode(self, tmp_path):
        cfg = _write(tmp_path, "c.json", _base_config())
        out = tmp_path / "out"
        assert main(["--config", cfg, "--output-dir", str(out)]) == 0
        series = (out / "norm_series.csv").read_text().splitlines()
        assert series[0] == "step,size_sq"
        assert len(series) == 1 + 8
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["mode"] == "dynamics"
        assert manifest["outputs"] == ["norm_series.csv"]
        assert manifest["kernel_backend"] in ("cython", "python")

    def test_scan_mode(self, tmp_path):
        cfg = _write(tmp_path, "c.json", {
            "mode": "scan",
            "seed": 5,
            "circuit": {"num_qubits": 3},
            "scan": {"num_points": 2, "n_long": 8, "n_short": 4, "num_phi": 2},
        })
        out = tmp_path / "scan_out"
        assert main(["--config", cfg, "--output-dir", str(out)]) == 0
        header = (out / "scan.csv").read_text().splitlines()[0]
        assert header == "t,theta,size_n8,size_n4,extrapolated_c,n_realizations"
        assert (out / "realizations.csv").exists()

    def test_randmeas_mode(self, tmp_path):
        cfg = _write(tmp_path, "c.json", {
            "mode": "randmeas",
            "seed": 2,
            "circuit": {"num_qubits": 2, "theta_base": 0.8, "t_base": 0.2},
            "randmeas": {"num_unitaries": 10, "n_steps": 3},
        })
        out = tmp_path / "rm"
        assert main(["--config", cfg, "--output-dir", str(out)]) == 0
        record = json.loads((out / "estimator.json").read_text())
        assert record["variant"] == "cross_correlation"
        assert record["m"] == 2
        assert record["exact_value"] is not None

    def test_validate_mode(self, tmp_path):
        cfg = _write(tmp_path, "c.json", {
            "mode": "validate",
            "seed": 6,
            "circuit": {"num_qubits": 2, "theta_base": 0.7, "t_base": 0.3, "phi": 1.0},
            "validate": {"num_unitaries": 300, "n_steps": 6},
        })
        out = tmp_path / "val"
        assert main(["--config", cfg, "--output-dir", str(out)]) == 0
        report = json.loads((out / "validation_report.json").read_text())
        assert report["validated_variant"] == "cross_correlation"
        assert report["protocol_mean_from_rhs"] == pytest.approx(
            report["exact_trace_size"], rel=1e-10
        )

    def test_export_qasm_mode(self, tmp_path):
        cfg = _write(tmp_path, "c.json", {
            "mode": "export-qasm",
            "circuit": {"num_qubits": 3, "theta_base": 0.8, "t_base": 0.2},
            "export_qasm": {"repetitions": 2},
        })
        out = tmp_path / "q"
        assert main(["--config", cfg, "--output-dir", str(out)]) == 0
        num_qubits, gates = parse_qasm((out / "circuit.qasm").read_text())
        assert num_qubits == 3
        assert gates


class TestErrorPaths:
    def test_malformed_json_exit_2_with_line(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "mode": "dynamics",\n  broken\n}')
        assert main(["--config", str(path)]) == 2
        err = capsys.readouterr().err
        assert "line 3" in err

    def test_missing_field_exit_2_names_field(self, tmp_path, capsys):
        cfg = _base_config()
        del cfg["circuit"]["num_qubits"]
        path = _write(tmp_path, "c.json", cfg)
        assert main(["--config", path, "--output-dir", str(tmp_path / "o")]) == 2
        assert "num_qubits" in capsys.readouterr().err

    def test_unreadable_config_exit_2(self, tmp_path):
        assert main(["--config", str(tmp_path / "absent.json")]) == 2

    def test_operator_out_of_range_exit_2(self, tmp_path, capsys):
        cfg = _base_config()
        cfg["dynamics"]["operator"] = [[9, "X"]]
        path = _write(tmp_path, "c.json", cfg)
        assert main(["--config", path, "--output-dir", str(tmp_path / "o")]) == 2
        assert "operator" in capsys.readouterr().err

    def test_runtime_failure_exit_3(self, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("file, not a directory")
        path = _write(tmp_path, "c.json", _base_config())
        assert main(["--config", path, "--output-dir", str(blocker / "sub")]) == 3

    def test_validate_rejects_large_L(self, tmp_path, capsys):
        cfg = {
            "mode": "validate",
            "circuit": {"num_qubits": 7, "theta_base": 0.7, "t_base": 0.3},
            "validate": {"num_unitaries": 5, "n_steps": 2},
        }
        path = _write(tmp_path, "c.json", cfg)
        assert main(["--config", path, "--output-dir", str(tmp_path / "o")]) == 2
        assert "L <=" in capsys.readouterr().err


class TestManifestRoundTrip:
    def test_rerunning_manifest_reproduces_results(self, tmp_path):
        cfg = _write(tmp_path, "c.json", _base_config())
        out1 = tmp_path / "o1"
        out2 = tmp_path / "o2"
        assert main(["--config", cfg, "--output-dir", str(out1)]) == 0
        assert main([
            "--config", str(out1 / "manifest.json"), "--output-dir", str(out2),
        ]) == 0
        text1 = (out1 / "norm_series.csv").read_bytes()
        text2 = (out2 / "norm_series.csv").read_bytes()
        assert text1 == text2
        m1 = json.loads((out1 / "manifest.json").read_text())
        m2 = json.loads((out2 / "manifest.json").read_text())
        c1, c2 = m1["config"], m2["config"]
        c1.pop("output_dir"), c2.pop("output_dir")
        assert c1 == c2

    def test_seed_override_changes_outputs(self, tmp_path):
        cfg = _write(tmp_path, "c.json", {
            "mode": "scan",
            "circuit": {"num_qubits": 3},
            "scan": {"num_points": 2, "n_long": 8, "n_short": 4, "num_phi": 2},
        })
        out1, out2 = tmp_path / "s1", tmp_path / "s2"
        assert main(["--config", cfg, "--output-dir", str(out1), "--seed", "1"]) == 0
        assert main(["--config", cfg, "--output-dir", str(out2), "--seed", "2"]) == 0
        assert (out1 / "scan.csv").read_text() != (out2 / "scan.csv").read_text()


class TestOutputHygiene:
    def test_writes_stay_inside_output_dir(self, tmp_path, monkeypatch):
        workdir = tmp_path / "work"
        workdir.mkdir()
        monkeypatch.chdir(workdir)
        cfg = _write(tmp_path, "c.json", _base_config())
        before = set(os.listdir(workdir)) | set(os.listdir(tmp_path))
        assert main(["--config", cfg, "--output-dir", str(tmp_path / "only_here")]) == 0
        after = (set(os.listdir(workdir)) | set(os.listdir(tmp_path))) - {"only_here"}
        assert after == before

    def test_no_temp_files_left_behind(self, tmp_path):
        cfg = _write(tmp_path, "c.json", _base_config())
        out = tmp_path / "o"
        assert main(["--config", cfg, "--output-dir", str(out)]) == 0
        leftovers = [p for p in out.iterdir() if p.name.endswith(".tmp")]
        assert leftovers == []

    def test_threads_env_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("FLOQMBL_THREADS", "2")
        cfg = _write(tmp_path, "c.json", {
            "mode": "scan",
            "circuit": {"num_qubits": 3},
            "scan": {"num_points": 2, "n_long": 8, "n_short": 4, "num_phi": 2},
        })
        out_env = tmp_path / "env"
        assert main(["--config", cfg, "--output-dir", str(out_env)]) == 0
        manifest = json.loads((out_env / "manifest.json").read_text())
        assert manifest["threads"] == 2

        monkeypatch.delenv("FLOQMBL_THREADS")
        out_serial = tmp_path / "serial"
        assert main(["--config", cfg, "--output-dir", str(out_serial)]) == 0
        assert (out_env / "scan.csv").read_text() == (out_serial / "scan.csv").read_text()
