"""End-to-end command tests through main(argv); one subprocess smoke for the
installed entry point."""

import json
import subprocess
import sys

import numpy as np
import pytest

import convexlab.cli as cli
from convexlab.cli import main
from convexlab.geometry import load_body
from convexlab.harness import DeficitReport
from convexlab.yaoyao import load_partition


def run(*argv):
    return main(list(argv))


# ---------------------------------------------------------------------------
# gen / compute
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("kind,extra", [
    ("cube", []),
    ("cross", []),
    ("random-symmetric", ["--verts", "8", "--seed", "3"]),
    ("ball-approx", ["--verts", "32"]),
    ("ellipsoid", ["--seed", "5"]),
    ("kt", ["--t", "0.05"]),
])
def test_gen_kinds(tmp_path, kind, extra):
    out = tmp_path / f"{kind}.json"
    assert run("gen", kind, "--dim", "2", "--out", str(out), *extra) == 0
    body = load_body(out)
    assert body.dim == 2
    data = json.loads(out.read_text())
    assert data["version"] and "config" in data and "seed" in data


def test_gen_requires_out(capsys):
    assert run("gen", "cube", "--dim", "2") == 1
    assert "error" in capsys.readouterr().err


def test_gen_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("gen", "random-symmetric", "--dim", "3", "--verts", "20", "--seed", "7", "--out", str(a))
    run("gen", "random-symmetric", "--dim", "3", "--verts", "20", "--seed", "7", "--out", str(b))
    # identical up to the embedded output path
    assert a.read_bytes().replace(b"a.json", b"X") == b.read_bytes().replace(b"b.json", b"X")


def test_compute_cube(tmp_path, capsys):
    body = tmp_path / "cube.json"
    run("gen", "cube", "--dim", "2", "--out", str(body))
    out = tmp_path / "report.json"
    assert run("compute", str(body), "--out", str(out)) == 0
    data = json.loads(out.read_text())
    assert data["volume"] == pytest.approx(4.0, abs=1e-12)
    assert data["volume_product"] == pytest.approx(8.0, abs=1e-12)
    assert data["ball_functional"] == pytest.approx(8.0 / 9.0, abs=1e-12)
    assert data["santalo_deficit"] == pytest.approx(1.8696044010893586, abs=1e-10)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def test_verify_ellipsoid_all_zero_deficits(tmp_path, capsys):
    body = tmp_path / "ell.json"
    run("gen", "ellipsoid", "--dim", "2", "--seed", "1", "--out", str(body))
    code = run("verify", str(body), "--which", "santalo", "--seed", "0")
    assert code == 0
    assert "[PASS]" in capsys.readouterr().out


def test_verify_all_writes_reports(tmp_path):
    body = tmp_path / "b.json"
    run("gen", "random-symmetric", "--dim", "2", "--verts", "8", "--seed", "3", "--out", str(body))
    out = tmp_path / "reports"
    code = run("verify", str(body), "--which", "all", "--seed", "2",
               "--samples", "60000", "--out", str(out))
    assert code == 0
    jsonl = (tmp_path / "reports.jsonl").read_text().splitlines()
    meta = json.loads(jsonl[0])
    assert meta["seed"] == 2 and meta["version"]
    names = [json.loads(line)["name"] for line in jsonl[1:]]
    assert names[0] == "santalo" and "cone-restricted" in names and "pl-triple" in names
    assert (tmp_path / "reports.csv").read_text().startswith("# {")


def test_verify_cube_frozen_deficits(tmp_path, capsys):
    body = tmp_path / "cube.json"
    run("gen", "cube", "--dim", "2", "--out", str(body))
    assert run("verify", str(body), "--which", "santalo") == 0
    assert run("verify", str(body), "--which", "ball") == 0
    out = capsys.readouterr().out
    assert "deficit=1.869604401" in out
    assert "deficit=0.3448116612" in out


def test_verify_byte_identical_rerun(tmp_path):
    body = tmp_path / "b.json"
    run("gen", "random-symmetric", "--dim", "2", "--verts", "8", "--seed", "1", "--out", str(body))
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    for out in (out1, out2):
        run("verify", str(body), "--which", "all", "--seed", "9",
            "--samples", "60000", "--out", str(out))
    a = (tmp_path / "r1.jsonl").read_text().replace("r1", "rX")
    b = (tmp_path / "r2.jsonl").read_text().replace("r2", "rX")
    assert a == b


def test_verify_violation_exit_code(tmp_path, monkeypatch, capsys):
    body = tmp_path / "cube.json"
    run("gen", "cube", "--dim", "2", "--out", str(body))
    broken = DeficitReport("santalo", 2.0, 1.0, -1.0, 1e-8, "exact", {})
    monkeypatch.setattr(cli, "santalo_deficit", lambda *a, **k: broken)
    assert run("verify", str(body), "--which", "santalo") == 2
    captured = capsys.readouterr()
    assert "[FAIL]" in captured.out
    assert "violation" in captured.err


def test_verify_direction_flag(tmp_path, capsys):
    body = tmp_path / "ell.json"
    run("gen", "ellipsoid", "--dim", "2", "--seed", "4", "--out", str(body))
    assert run("verify", str(body), "--which", "directional", "--direction", "1,1") == 0
    assert capsys.readouterr().out.count("directional") == 1


def test_verify_missing_file():
    assert run("verify", "does-not-exist.json") == 1


def test_verify_bad_direction_length(tmp_path):
    body = tmp_path / "b.json"
    run("gen", "cube", "--dim", "2", "--out", str(body))
    assert run("verify", str(body), "--which", "directional", "--direction", "1,0,0") == 1


# ---------------------------------------------------------------------------
# yaoyao / stability
# ---------------------------------------------------------------------------


def test_yaoyao_command(tmp_path, capsys):
    body = tmp_path / "b.json"
    run("gen", "random-symmetric", "--dim", "2", "--verts", "8", "--seed", "2", "--out", str(body))
    out = tmp_path / "part.json"
    assert run("yaoyao", str(body), "--seed", "4", "--samples", "60000", "--out", str(out)) == 0
    part = load_partition(out)
    assert len(part.cones) == 4
    assert "mass fractions" in capsys.readouterr().out


def test_yaoyao_nonconvergence_exit_code(tmp_path):
    body = tmp_path / "b.json"
    run("gen", "cube", "--dim", "2", "--out", str(body))
    code = run("yaoyao", str(body), "--samples", "20000", "--mass-tol", "1e-12")
    assert code == 3


def test_stability_sweep(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code = run("stability", "kt-sweep", "--dim", "2", "--t", "0.04:0.10:3",
               "--samples", "100000", "--seed", "1", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[1].startswith("t,vol_K")
    assert len(lines) == 5
    assert "slope(deficit_santalo)" in capsys.readouterr().out


def test_stability_single_t(capsys):
    assert run("stability", "kt-sweep", "--dim", "2", "--t", "0.05",
               "--samples", "100000") == 0
    out = capsys.readouterr().out
    assert "t=0.05" in out and "slope" not in out


def test_stability_bad_range():
    assert run("stability", "kt-sweep", "--dim", "2", "--t", "0.5") == 1
    assert run("stability", "kt-sweep", "--dim", "2", "--t", "0.01:0.05") == 1


def test_usage_errors_exit_one():
    assert run("gen", "frobnicate", "--dim", "2", "--out", "x.json") == 1
    assert run("verify") == 1
    assert run("nope") == 1


def test_env_seed(tmp_path, monkeypatch):
    monkeypatch.setenv("CONVEXLAB_SEED", "11")
    a = tmp_path / "a.json"
    assert main(["gen", "random-symmetric", "--dim", "2", "--verts", "8", "--out", str(a)]) == 0
    b = tmp_path / "b.json"
    monkeypatch.delenv("CONVEXLAB_SEED")
    assert main(["gen", "random-symmetric", "--dim", "2", "--verts", "8",
                 "--seed", "11", "--out", str(b)]) == 0
    va, vb = load_body(a), load_body(b)
    np.testing.assert_array_equal(va.vertices, vb.vertices)


def test_entry_point_subprocess(tmp_path):
    out = tmp_path / "cube.json"
    proc = subprocess.run(
        [sys.executable, "-m", "convexlab.cli", "gen", "cube", "--dim", "2", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert load_body(out).dim == 2


def test_version_flag(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.strip()
