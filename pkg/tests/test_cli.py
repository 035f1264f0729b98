"""Command-line interface: subcommands, outputs, config handling, exit codes."""
import json
import math
import subprocess
import sys

import pytest

from drivenatom.cli import main

FAST = ["--nodes", "512", "--periods", "8", "--jmax", "8"]


def test_run_produces_all_outputs(tmp_path, capsys) -> None:
    out = tmp_path / "run"
    assert main(["run", "--gamma", "1", "--epsilon", "1", "--out", str(out)] + FAST) == 0
    for name in ("solution.csv", "spectrum.json", "report.json", "solution.png", "spectrum.png"):
        assert (out / name).is_file(), name
    stdout = capsys.readouterr().out
    assert "nu" in stdout

    rows = (out / "solution.csv").read_text().splitlines()
    assert rows[0] == "x,re_u,im_u,re_v,im_v,dipole,inversion,first_integral_dev"
    assert len(rows) == 1 + 512 + 1  # header plus closed grid over one period
    first = [float(c) for c in rows[1].split(",")]
    last = [float(c) for c in rows[-1].split(",")]
    assert first[0] == 0.0 and first[1] == 1.0  # u(0) = 1
    assert last[0] == pytest.approx(2.0 * math.pi, abs=1e-12)

    report = json.loads((out / "report.json").read_text())
    assert report["nu"]["method"] == "cf"
    assert abs(report["nu"]["decomposition"] - 0.01952497653829667) <= 1e-10
    assert report["invariants"]["first_integral_dev"] <= 1e-9

    spectrum = json.loads((out / "spectrum.json").read_text())
    routes = {line["route"] for line in spectrum["lines"]}
    assert routes == {"cf", "projection"}
    assert abs(spectrum["sum_rule_residual"]) <= 1e-6


def test_no_plots_flag(tmp_path) -> None:
    out = tmp_path / "quiet"
    assert main(["run", "--gamma", "1", "--epsilon", "1", "--no-plots", "--out", str(out)] + FAST) == 0
    assert not list(out.glob("*.png"))
    assert (out / "report.json").is_file()


def test_config_file_with_cli_override(tmp_path) -> None:
    cfg = tmp_path / "case.cfg"
    cfg.write_text("# comment line\ngamma = 1.0\nepsilon = 1.0\nnodes = 512\nperiods = 8\njmax = 8\nplots = false\n")
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(["run", "--config", str(cfg), "--out", str(out_a)]) == 0
    assert main(["run", "--config", str(cfg), "--epsilon", "2.0", "--out", str(out_b)]) == 0
    eps_a = json.loads((out_a / "report.json").read_text())["params"]["epsilon"]
    eps_b = json.loads((out_b / "report.json").read_text())["params"]["epsilon"]
    assert eps_a == 1.0 and eps_b == 2.0


def test_frequency_triple_resolves() -> None:
    # omega0/omega/rabi and the direct pair must not be mixed
    assert main(["validate", "--omega0", "2", "--omega", "2", "--rabi", "2", "--out", "/tmp/_dn_freq", "--nodes", "512", "--jmax", "8"]) == 0
    assert main(["validate", "--omega0", "2", "--omega", "2", "--rabi", "2", "--gamma", "1", "--out", "/tmp/_dn_mix"]) == 2


def test_zero_coupling_spectrum(tmp_path) -> None:
    out = tmp_path / "free"
    assert main(["spectrum", "--gamma", "0", "--epsilon", "1", "--out", str(out)] + FAST) == 0
    spectrum = json.loads((out / "spectrum.json").read_text())
    dipole = [l for l in spectrum["lines"] if l["class"].startswith("D")]
    assert all(abs(l["amplitude"]) <= 1e-9 for l in dipole)
    dc = [l for l in spectrum["lines"] if l["class"] == "W" and l["j"] == 0 and l["route"] == "cf"]
    assert dc and dc[0]["amplitude"] == pytest.approx(-1.0, abs=1e-12)


def test_scan_floquet_parallel_matches_serial(tmp_path) -> None:
    base = ["scan-floquet", "--alpha", "1", "--eps-range", "10:11.2:0.1", "--no-plots", "--nodes", "512"]
    out_1 = tmp_path / "serial"
    out_2 = tmp_path / "parallel"
    assert main(base + ["--out", str(out_1)]) == 0
    assert main(base + ["--workers", "2", "--out", str(out_2)]) == 0
    assert (out_1 / "scan.csv").read_bytes() == (out_2 / "scan.csv").read_bytes()
    summary = json.loads((out_1 / "scan_summary.json").read_text())
    assert summary["expected_period"] == pytest.approx(2.0 * 0.5960861086739784, abs=1e-12)
    assert summary["max_dev_wkb"] <= 5e-3


def test_wkb_compare_flags_validity(tmp_path, capsys) -> None:
    out = tmp_path / "low"
    assert main(["wkb-compare", "--alpha", "1", "--epsilon", "4", "--no-plots", "--nodes", "512", "--out", str(out)]) == 0
    summary = json.loads((out / "compare_summary.json").read_text())
    assert summary["validity"]["below_threshold"] is True
    assert "below" in capsys.readouterr().out

    out2 = tmp_path / "high"
    assert main(["wkb-compare", "--alpha", "1", "--epsilon", "12", "--no-plots", "--nodes", "512", "--out", str(out2)]) == 0
    summary2 = json.loads((out2 / "compare_summary.json").read_text())
    assert summary2["validity"]["below_threshold"] is False
    assert summary2["max_abs_err"]["dipole"] <= 0.05


def test_validate_subcommand(tmp_path, capsys) -> None:
    out = tmp_path / "val"
    assert main(["validate", "--gamma", "1", "--epsilon", "1", "--nodes", "512", "--jmax", "8", "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "PASS" in stdout and "FAIL" not in stdout
    report = json.loads((out / "report.json").read_text())
    assert all(entry["pass"] for entry in report["checks"].values())


def test_error_exit_codes(tmp_path) -> None:
    assert main(["run", "--out", str(tmp_path / "x")]) == 2  # no parameters at all
    assert main(["run", "--gamma", "1", "--epsilon", "1", "--routes", "cf,nonsense", "--out", str(tmp_path / "y")]) == 2
    assert main(["scan-floquet", "--alpha", "1", "--eps-range", "backwards", "--out", str(tmp_path / "z")]) == 2
    # quadrature extraction refuses a degenerate exponent: runtime failure
    assert main(["spectrum", "--gamma", "0", "--epsilon", "1", "--routes", "quadrature", "--out", str(tmp_path / "q")] + FAST) == 3
    # output root shadowed by a regular file: environment failure
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["run", "--gamma", "1", "--epsilon", "1", "--out", str(blocker / "sub")] + FAST) == 4


def test_module_entry_point() -> None:
    proc = subprocess.run(
        [sys.executable, "-m", "drivenatom", "--help"],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert proc.returncode == 0
    for sub in ("run", "scan-floquet", "spectrum", "wkb-compare", "validate"):
        assert sub in proc.stdout
