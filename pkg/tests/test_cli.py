import json
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "lszeta.cli"]


def run(*args, expect=0):
    proc = subprocess.run(CLI + list(args), capture_output=True, text=True)
    assert proc.returncode == expect, proc.stderr or proc.stdout
    return proc


def test_describe_rank_one_group():
    out = json.loads(run("describe", "--group", "sl3").stdout)
    assert out["delta"] == 1
    assert out["structure"]["l"] == 1
    assert out["structure"]["alpha_norm2"] == "3/2"


def test_describe_rank_zero_group_has_no_structure():
    out = json.loads(run("describe", "--group", "sl2").stdout)
    assert out["delta"] == 0
    assert "structure" not in out


def test_describe_malformed_json_exits_2():
    proc = run("describe", "--group", '{"family": "so", "p": }', expect=2)
    assert "input error" in proc.stderr


def test_structure_command():
    out = json.loads(run("structure", "--group", "so(3,1)").stdout)
    assert out["sigma_shifts"] == ["-1/1", "0/1", "-1/1"]


def test_structure_rejects_rank_zero():
    run("structure", "--group", "so(2,2)", expect=2)


def test_check_kostant_suite():
    out = json.loads(run("check", "--suite", "kostant").stdout)
    assert out["all_passed"]


def test_check_perturbed_bracket_fails():
    proc = subprocess.run(
        CLI + ["check", "--suite", "bracket-closure", "--perturb"],
        capture_output=True, text=True)
    assert proc.returncode == 3
    out = json.loads(proc.stdout)
    assert not out["all_passed"]


def test_check_factorization_with_synthetic():
    out = json.loads(run("check", "--suite", "factorization",
                         "--spectrum", "synthetic:50", "--sigma", "3").stdout)
    assert out["all_passed"]
    assert all("residual" in r["detail"] for r in out["suites"])


def test_zeta_grid_csv_row_count():
    proc = run("zeta", "--group", "sl3", "--spectrum", "synthetic:50",
               "--sigma-start", "2", "--sigma-stop", "5",
               "--sigma-step", "0.1", "--quiet")
    lines = [l for l in proc.stdout.splitlines() if l.strip()]
    assert lines[0] == "sigma,re,im"
    assert len(lines) == 32           # 31 grid rows plus the header


def test_zeta_deterministic_output():
    args = ("zeta", "--group", "so(3,1)", "--spectrum", "synthetic:20",
            "--which", "selberg:1", "--sigma-start", "2.5",
            "--sigma-stop", "3.5", "--sigma-step", "0.25", "--quiet")
    assert run(*args).stdout == run(*args).stdout


def test_orbital_both_paths_agree():
    out = json.loads(run(
        "orbital", "--group", "so(3,1)", "--length", "1.0",
        "--angles", "1.0471975", "--rep", "eta1", "--time", "1.0").stdout)
    assert out["relative_difference"] <= 1e-6
    assert out["quadrature"]["path"] == "quadrature"


def test_orbital_wrong_angle_count_exits_2():
    run("orbital", "--group", "so(5,3)", "--length", "1.0",
        "--angles", "0.5", "--rep", "eta0", expect=2)


def test_missing_spectrum_file_exits_2():
    run("zeta", "--group", "sl3", "--spectrum", "/nonexistent.csv",
        "--sigma", "3", expect=2)


def test_laurent_command():
    out = json.loads(run("laurent", "--rj", "1,0,1", "--alpha2", "1",
                         "--l", "1").stdout)
    assert out["c_rho"] == "-1/4"
    assert out["r_rho"] == -2


def test_synth_spectrum_deterministic(tmp_path):
    a = run("synth-spectrum", "--group", "sl3", "--classes", "10",
            "--seed", "3").stdout
    b = run("synth-spectrum", "--group", "sl3", "--classes", "10",
            "--seed", "3").stdout
    assert a == b
    # and loadable through the library
    path = tmp_path / "spec.csv"
    path.write_text(a)
    from lszeta.zeta import load_spectrum
    ds = load_spectrum(str(path))
    assert len(ds.classes) == 10
    assert ds.counting is not None


def test_synth_spectrum_json_format(tmp_path):
    path = tmp_path / "spec.json"
    run("synth-spectrum", "--group", "so(3,1)", "--classes", "5",
        "--seed", "1", "--format", "json", "--out", str(path))
    from lszeta.zeta import load_spectrum
    ds = load_spectrum(str(path))
    assert len(ds.classes) == 5
