"""End-to-end CLI coverage: exit codes, artifacts, determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

from rydberg_receiver.cli import main

TWO_PI = 2.0 * np.pi


def run(tmp_path, *argv, config=None, name="run.ini"):
    args = list(argv)
    if config is not None:
        path = tmp_path / name
        path.write_text(config)
        args += ["--config", str(path)]
    return main(args)


class TestParsing:
    def test_version_subprocess(self):
        out = subprocess.run(
            [sys.executable, "-m", "rydberg_receiver.cli", "--version"],
            capture_output=True, text=True,
        )
        assert out.returncode == 0
        assert "0.1.0" in out.stdout

    def test_usage_error_exits_1(self):
        with pytest.raises(SystemExit) as exc:
            main(["no-such-command"])
        assert exc.value.code == 1

    def test_missing_command_exits_1(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 1


class TestValidateScheme:
    def test_bundled_scheme_valid(self, capsys):
        assert main(["validate-scheme"]) == 0
        out = capsys.readouterr().out
        assert "valid" in out.lower()

    def test_broken_scheme_exits_1(self, tmp_path, capsys):
        scheme = tmp_path / "broken.ini"
        scheme.write_text(
            "[scheme]\narchitecture = Hybrid\n"
            + "\n".join(
                f"[level.{k}]\nlabel = L{k}\nparity = 1" for k in range(1, 7)
            )
            + "\n[transition.1]\nlower = 3\nupper = 4\ncarrier_ghz = 3\n"
            "dipole_ea0 = 100\ndetuning_khz = 0\nband = rf\n"
            "[transition.2]\nlower = 4\nupper = 5\ncarrier_ghz = 3\n"
            "dipole_ea0 = 100\ndetuning_khz = 0\nband = rf\n"
            "[transition.3]\nlower = 5\nupper = 6\ncarrier_ghz = 3\n"
            "dipole_ea0 = 100\ndetuning_khz = 0\nband = rf\n"
            "[transition.4]\nlower = 3\nupper = 6\ncarrier_ghz = 3\n"
            "dipole_ea0 = 100\ndetuning_khz = 0\nband = rf\n"
            "[decay.2-1]\nrate_mhz = 5.2\n"
        )
        # parses fine but every transition links equal parities
        assert main(["validate-scheme", "--scheme", str(scheme)]) == 1
        assert "parity violation" in capsys.readouterr().out

    def test_malformed_scheme_value_exits_1(self, tmp_path, capsys):
        scheme = tmp_path / "bad.ini"
        scheme.write_text("[scheme]\narchitecture = Hybrid\n[level.1]\nlabel = g\nparity = 2\n")
        assert main(["validate-scheme", "--scheme", str(scheme)]) == 1
        assert "parity" in capsys.readouterr().err

    def test_unreadable_scheme_exits_1(self, tmp_path, capsys):
        code = main(["validate-scheme", "--scheme", str(tmp_path / "none.ini")])
        assert code == 1


class TestSteadyState:
    def test_default_run_artifacts(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["steady-state", "--out", str(out)]) == 0
        rows = (out / "steady_state.csv").read_text().strip().splitlines()
        assert rows[0] == "i,j,re,im"
        assert len(rows) == 1 + 36
        summary = json.loads((out / "summary.json").read_text())
        pops = summary["populations"]
        assert len(pops) == 6
        assert sum(pops) == pytest.approx(1.0, abs=1e-9)
        assert summary["analytic_comparison"]["max_abs_difference"] < 0.05
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "steady-state"
        assert manifest["scheme"] == "bundled:cesium-six-level"
        assert "timestamp" not in json.dumps(manifest).lower()
        assert str(out) not in (out / "manifest.json").read_text()

    def test_analytic_method(self, tmp_path):
        cfg = "[steady_state]\nmethod = analytic\n"
        out = tmp_path / "out"
        assert run(tmp_path, "steady-state", "--out", str(out), config=cfg) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["method"] == "analytic"
        assert summary["liouvillian_residual"] is None

    def test_unknown_method_exits_1(self, tmp_path, capsys):
        cfg = "[steady_state]\nmethod = magic\n"
        assert run(tmp_path, "steady-state", "--out", str(tmp_path / "o"), config=cfg) == 1
        assert "method" in capsys.readouterr().err

    def test_config_error_exits_1_and_names_key(self, tmp_path, capsys):
        cfg = "[drive]\nomega_p_mhz = fast\n"
        code = run(tmp_path, "steady-state", "--out", str(tmp_path / "o"), config=cfg)
        assert code == 1
        err = capsys.readouterr().err
        assert "omega_p_mhz" in err

    def test_unknown_key_exits_1(self, tmp_path, capsys):
        cfg = "[drive]\nomega_probe_mhz = 5.7\n"
        code = run(tmp_path, "steady-state", "--out", str(tmp_path / "o"), config=cfg)
        assert code == 1
        assert "omega_probe_mhz" in capsys.readouterr().err

    def test_missing_config_file_exits_1(self, tmp_path, capsys):
        code = main(["steady-state", "--config", str(tmp_path / "absent.ini"),
                     "--out", str(tmp_path / "o")])
        assert code == 1

    def test_degenerate_analytic_point_exits_2(self, tmp_path, capsys):
        # all RF off: the closed form rejects this drive at runtime
        cfg = (
            "[drive]\nrf_rabi_mhz = 0, 0, 0, 0\n"
            "[steady_state]\nmethod = analytic\n"
        )
        code = run(tmp_path, "steady-state", "--out", str(tmp_path / "o"), config=cfg)
        assert code == 2
        assert "degenerate" in capsys.readouterr().err

    def test_dry_run_writes_nothing(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["steady-state", "--out", str(out), "--dry-run"]) == 0
        assert not out.exists()
        payload = json.loads(capsys.readouterr().out)
        assert payload["dry_run"] is True
        assert "steady_state.csv" in payload["would_write"]


class TestDynamics:
    CFG = "[dynamics]\nt_end_us = 2\nmax_snapshots = 21\n"

    def test_artifacts_and_determinism(self, tmp_path, capsys):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert run(tmp_path, "dynamics", "--out", str(out_a), config=self.CFG) == 0
        assert run(tmp_path, "dynamics", "--out", str(out_b), config=self.CFG) == 0
        for name in ("trajectory.csv", "summary.json", "manifest.json"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
        rows = (out_a / "trajectory.csv").read_text().strip().splitlines()
        assert rows[0].startswith("t,rho11,")
        assert len(rows) == 1 + 21
        summary = json.loads((out_a / "summary.json").read_text())
        assert summary["snapshots"] == 21
        assert summary["max_trace_drift"] < 1e-10
        assert sum(summary["final_populations"]) == pytest.approx(1.0, abs=1e-9)

    def test_bad_initial_level_exits_1(self, tmp_path, capsys):
        cfg = self.CFG + "initial_level = 9\n"
        assert run(tmp_path, "dynamics", "--out", str(tmp_path / "o"), config=cfg) == 1
        assert "initial_level" in capsys.readouterr().err

    def test_unstable_step_exits_2(self, tmp_path, capsys):
        cfg = "[dynamics]\nt_end_us = 1\ndt_us = 0.5\n"
        assert run(tmp_path, "dynamics", "--out", str(tmp_path / "o"), config=cfg) == 2


class TestFidelityMap:
    def test_small_scan(self, tmp_path, capsys):
        cfg = (
            "[scan]\naxes = 2, 3\n"
            "range_lo_mhz = 2, 2\nrange_hi_mhz = 8, 8\n"
            "resolution = 2\nmethod = null_space\n"
        )
        out = tmp_path / "out"
        assert run(tmp_path, "fidelity-map", "--out", str(out), config=cfg) == 0
        rows = (out / "fidelity_map.csv").read_text().strip().splitlines()
        assert rows[0] == "omega1,omega2,omega3,omega4,fidelity"
        assert len(rows) == 1 + 4
        summary = json.loads((out / "summary.json").read_text())
        assert summary["points"] == 4
        assert summary["failures"] == 0
        assert 0.0 < summary["min_fidelity"] <= summary["max_fidelity"] <= 1.0 + 1e-9
        assert len(summary["min_point_rf_rabi"]) == 4

    def test_bad_axes_exits_1(self, tmp_path, capsys):
        cfg = "[scan]\naxes = 1, 2, 3\n"
        assert run(tmp_path, "fidelity-map", "--out", str(tmp_path / "o"), config=cfg) == 1


class TestOptimizeLo:
    def test_tiny_window(self, tmp_path, capsys):
        cfg = (
            "[optimize]\nsearch_lo_mhz = 5\nsearch_hi_mhz = 6\n"
            "grid_step_mhz = 1\nsum_constraint_mhz = 30\n"
            "samples_per_axis = 1\n"
        )
        out = tmp_path / "out"
        assert run(tmp_path, "optimize-lo", "--out", str(out), config=cfg) == 0
        payload = json.loads((out / "operating_point.json").read_text())
        assert payload["evaluated"] == 16
        assert payload["average_fidelity"] > 0.99
        assert len(payload["operating_point_rad_per_us"]) == 4
        assert payload["operating_point_mhz"][0] == pytest.approx(
            payload["operating_point_rad_per_us"][0] / TWO_PI
        )

    def test_infeasible_constraint_exits_2(self, tmp_path, capsys):
        cfg = (
            "[optimize]\nsearch_lo_mhz = 5\nsearch_hi_mhz = 6\n"
            "grid_step_mhz = 1\nsum_constraint_mhz = 1\n"
        )
        assert run(tmp_path, "optimize-lo", "--out", str(tmp_path / "o"), config=cfg) == 2


class TestWaveform:
    def test_default_pipeline(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["waveform", "--out", str(out)]) == 0
        for name in (
            "waveform.csv", "demod.csv", "spectrogram.csv", "summary.json", "manifest.json"
        ):
            assert (out / name).exists()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["samples"] == 3200
        assert summary["linearization_rms_over_dc"] < 0.02
        assert len(summary["channels"]) == 4
        for ch in summary["channels"]:
            assert abs(ch["magnitude_ratio"] - 1.0) < 0.03
        rows = (out / "waveform.csv").read_text().strip().splitlines()
        assert rows[0] == "t,y_exact,y_linearized"
        assert len(rows) == 1 + 3200
        demod_header = (out / "demod.csv").read_text().splitlines()[0]
        assert demod_header == "channel,t,re,im"

    def test_overlapping_signal_plan_exits_2(self, tmp_path, capsys):
        cfg = "[signal]\noffsets_mhz = 0.2, 0.25, 0.8, 1.1\n"
        assert run(tmp_path, "waveform", "--out", str(tmp_path / "o"), config=cfg) == 2
        assert "overlap" in capsys.readouterr().err

    def test_undersampled_plan_exits_2(self, tmp_path, capsys):
        cfg = "[waveform]\nsample_rate_mhz = 2\n"
        assert run(tmp_path, "waveform", "--out", str(tmp_path / "o"), config=cfg) == 2
        assert "undersamples" in capsys.readouterr().err


class TestSumrate:
    CFG = (
        "[sumrate]\nrabi_set = set2\n"
        "power_min_dbm = -10\npower_max_dbm = 0\npower_step_db = 5\n"
        "bandwidths_mhz = 0.05, 0.1\n"
    )

    def test_small_sweep(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert run(tmp_path, "sumrate", "--out", str(out), config=self.CFG) == 0
        rows = (out / "rates.csv").read_text().strip().splitlines()
        assert rows[0] == "architecture,p_t_dbm,bandwidth_hz,rate_bps"
        assert len(rows) == 1 + 3 * (3 + 2)
        archs = {row.split(",")[0] for row in rows[1:]}
        assert archs == {"Hybrid", "CRS", "PRS"}
        summary = json.loads((out / "summary.json").read_text())
        assert set(summary["y_lo"]) == {"Hybrid", "CRS", "PRS"}
        rates = summary["rate_at_max_power"]
        assert rates["Hybrid"] >= rates["CRS"] >= rates["PRS"] > 0

    def test_bad_rabi_set_exits_1(self, tmp_path, capsys):
        cfg = "[sumrate]\nrabi_set = set9\n"
        assert run(tmp_path, "sumrate", "--out", str(tmp_path / "o"), config=cfg) == 1

    def test_bad_power_range_exits_1(self, tmp_path, capsys):
        cfg = "[sumrate]\npower_min_dbm = 0\npower_max_dbm = -10\n"
        assert run(tmp_path, "sumrate", "--out", str(tmp_path / "o"), config=cfg) == 1
