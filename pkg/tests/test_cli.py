import csv
import io
import json
import math
import subprocess
import sys

import pytest

from epsteinlab import __version__
from epsteinlab.cli import (
    DEFAULT_TOLERANCES,
    EXIT_CAPABILITY,
    EXIT_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    UsageError,
    atomic_write_text,
    main,
    parse_range,
    parse_tolerances,
    rows_to_csv,
)


def run_cli(*argv):
    return main([str(a) for a in argv])


def read_rows(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


# --- the documented runs -----------------------------------------------------------

def test_verify_identities_disk(scenes, tmp_path, capsys):
    out = tmp_path / "ids.csv"
    assert run_cli("verify-identities", "--scene", scenes / "disk.json", "--grid", 20, "--out", out) == EXIT_OK
    assert "PASS: 1260/1260 checks passed, 0 failed" in capsys.readouterr().out
    rows = read_rows(out)
    assert len(rows) == 20 * 9
    assert list(rows[0])[:4] == ["z_re", "z_im", "t", "s"]
    for col in ("eig1", "eig2", "residual_3", "residual_4", "residual_6", "residual_7",
                "area_ratio_residual", "gauss_residual"):
        assert col in rows[0]


def test_bounds_fuchsian_all_zero(scenes, tmp_path):
    out = tmp_path / "b.csv"
    assert run_cli("bounds", "--descriptors", scenes / "fuchsian.json", "--out", out, "--quiet") == EXIT_OK
    (row,) = read_rows(out)
    for col in ("w_lower", "w_upper_sharp", "w_upper_coarse", "max_phi_two", "main_bound",
                "nehari_bound", "anderson_bound", "closure_residual"):
        assert float(row[col]) == 0.0


def test_dome_two_disks(scenes, tmp_path):
    out = tmp_path / "dome.json"
    assert run_cli("dome", "--scene", scenes / "two-disks-c0.5.json", "--out", out, "--quiet") == EXIT_OK
    rep = json.loads(out.read_text(encoding="utf-8"))
    (angle,) = [c for c in rep["checks"] if c["name"] == "bending_angle"]
    assert abs(angle["computed"] - math.pi / 3) < 1e-6 and angle["pass"]
    assert rep["summary"]["failed"] == 0 and rep["summary"]["total"] == len(rep["checks"])


def test_epstein_sample_disk(scenes, tmp_path):
    out = tmp_path / "ep.csv"
    assert run_cli("epstein-sample", "--scene", scenes / "disk.json", "--grid", 30,
                   "--times", "0,0.5", "--out", out, "--quiet") == EXIT_OK
    rows = read_rows(out)
    assert len(rows) == 60
    for r in rows:
        if float(r["t"]) == 0:
            assert abs(float(r["w_re"]) ** 2 + float(r["w_im"]) ** 2 + float(r["height"]) ** 2 - 1) < 1e-9


def test_sweep_columns(tmp_path):
    out = tmp_path / "sweep.csv"
    assert run_cli("sweep", "--L", "0:1:11", "--phi-inf", "0:3:3", "--out", out, "--quiet") == EXIT_OK
    rows = read_rows(out)
    assert len(rows) == 33
    for r in rows:
        L, phi = float(r["L"]), float(r["phi_inf"])
        assert abs(float(r["nehari_bound"]) - 2.5 * math.sqrt(L)) < 1e-12
        if phi == 1.5:
            assert abs(float(r["main_bound"]) - 2.5 * math.sqrt(L)) < 1e-12
        if L == 0:
            assert float(r["main_bound"]) == float(r["nehari_bound"]) == float(r["max_phi_two"]) == 0
    for phi in (0.0, 1.5, 3.0):
        col = [float(r["main_bound"]) for r in rows if float(r["phi_inf"]) == phi]
        assert col == sorted(col)


# --- exit status contract -----------------------------------------------------------

def test_failing_check_gives_nonzero_status(scenes, capsys):
    code = run_cli("verify-identities", "--scene", scenes / "disk.json", "--grid", 2,
                   "--tol", "finite_difference=1e-30")
    assert code == EXIT_FAILED
    assert "FAIL residual_3" in capsys.readouterr().out


def test_empty_check_set_fails(tmp_path, capsys):
    empty = tmp_path / "none.json"
    empty.write_text("[]", encoding="utf-8")
    assert run_cli("bounds", "--descriptors", empty) == EXIT_FAILED
    assert "no checks ran" in capsys.readouterr().out


def test_descriptor_violation_fails(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps([{"chi": -2, "L": 1.0, "phi_inf": 0.3, "phi_two": 1.31}]), encoding="utf-8")
    assert run_cli("bounds", "--descriptors", bad, "--quiet") == EXIT_FAILED


def test_malformed_scene_reports_location(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"domain": {"type": "round-disk", "c": [0, 0], "r": -1}}), encoding="utf-8")
    assert run_cli("epstein-sample", "--scene", bad) == EXIT_USAGE
    err = capsys.readouterr().err
    assert "bad.json" in err and "domain.r" in err


def test_invalid_json_reports_line(tmp_path, capsys):
    bad = tmp_path / "broken.json"
    bad.write_text('{"domain":\n  {"type": }', encoding="utf-8")
    assert run_cli("dome", "--scene", bad) == EXIT_USAGE
    assert "broken.json:2:" in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    assert run_cli("bounds", "--descriptors", tmp_path / "nope.json") == EXIT_USAGE
    assert "cannot read" in capsys.readouterr().err


def test_capability_error(scenes, capsys):
    assert run_cli("dome", "--scene", scenes / "koebe.json") == EXIT_CAPABILITY
    assert "capability error" in capsys.readouterr().err


def test_bad_arguments(scenes):
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == EXIT_USAGE
    assert run_cli("sweep", "--L", "1:2") == EXIT_USAGE
    assert run_cli("sweep", "--tol", "closed_form=-1") == EXIT_USAGE
    assert run_cli("epstein-sample", "--scene", scenes / "disk.json", "--grid", 0) == EXIT_USAGE


# --- outputs ------------------------------------------------------------------------

def test_same_seed_gives_identical_bytes(scenes, tmp_path):
    outs = []
    for k, seed in enumerate((7, 7, 8)):
        out = tmp_path / f"run{k}.csv"
        run_cli("epstein-sample", "--scene", scenes / "koebe.json", "--grid", 25, "--seed", seed,
                "--times", "0,0.3", "--out", out, "--quiet")
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert outs[0] != outs[2]


def test_csv_is_utf8_with_lf(scenes, tmp_path):
    out = tmp_path / "d.csv"
    run_cli("epstein-sample", "--scene", scenes / "disk.json", "--grid", 5, "--out", out, "--quiet")
    data = out.read_bytes()
    data.decode("utf-8")
    assert b"\r" not in data and data.endswith(b"\n")
    assert data.splitlines()[0].startswith(b"z_re,z_im,t,u,")


def test_json_report_header(scenes, tmp_path):
    out = tmp_path / "r.json"
    run_cli("bounds", "--descriptors", scenes / "descriptors.json", "--tol", "closed_form=1e-10",
            "--out", out, "--quiet")
    header = json.loads(out.read_text(encoding="utf-8"))["header"]
    assert header["command"] == "bounds" and header["version"] == __version__
    assert header["tolerances"] == {**DEFAULT_TOLERANCES, "closed_form": 1e-10}
    assert header["config"]["seed"] == 0


def test_atomic_write_leaves_no_temporaries(tmp_path):
    target = tmp_path / "sub" / "file.csv"
    atomic_write_text(target, "a,b\n1,2\n")
    atomic_write_text(target, "a,b\n3,4\n")
    assert target.read_text(encoding="utf-8") == "a,b\n3,4\n"
    assert [p.name for p in target.parent.iterdir()] == ["file.csv"]


def test_rows_to_csv_round_trips_floats():
    x = 0.1 + 0.2
    text = rows_to_csv([{"a": x, "b": 3, "c": "disk-0"}])
    (row,) = csv.DictReader(io.StringIO(text))
    assert float(row["a"]) == x and row["b"] == "3" and row["c"] == "disk-0"
    assert rows_to_csv([]) == ""


def test_parse_helpers():
    assert parse_tolerances(["dome=1e-8"])["dome"] == 1e-8
    for bad in (["dome"], ["nope=1"], ["dome=x"], ["dome=0"], ["dome=inf"]):
        with pytest.raises(UsageError):
            parse_tolerances(bad)
    assert list(parse_range("0:1:3", "--L")) == [0.0, 0.5, 1.0]
    assert list(parse_range("2.5", "--L")) == [2.5]
    for bad in ("0:1", "a:b:c", "0:1:0"):
        with pytest.raises(UsageError):
            parse_range(bad, "--L")


def test_module_entry_point(scenes):
    proc = subprocess.run([sys.executable, "-m", "epsteinlab", "bounds", "--descriptors",
                           str(scenes / "descriptors.json")], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "PASS: 8/8 checks passed, 0 failed" in proc.stdout
