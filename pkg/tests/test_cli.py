from __future__ import annotations

import json
import subprocess
import sys

import mpmath
import pytest
from mpmath import mpf

from oscgauss import __version__
from oscgauss.cli import run
from oscgauss.export import SCHEMA, loads
from oscgauss.orthopoly import build_recurrence


def manifest(path):
    return json.loads(path.with_name(path.name + ".manifest.json").read_text())


def test_recurrence_json_is_exact(tmp_path, capsys):
    out = tmp_path / "rec.json"
    assert run(["recurrence", "--n", "6", "--omega", "4", "--out", str(out)]) == 0
    assert capsys.readouterr().out.strip() == str(out)
    rec = loads(out.read_text())
    _m, ref = build_recurrence(6, 4)
    assert rec.a_sq == ref.a_sq and rec.b == ref.b
    m = manifest(out)
    assert m["schema"] == SCHEMA and m["version"] == __version__
    assert m["config"]["n"] == 6 and m["argv"][0] == "recurrence"


def test_lambda_and_omega_are_equivalent(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["moments", "--n", "4", "--lambda", "0.5", "--out", str(a)]) == 0
    assert run(["moments", "--n", "4", "--omega", "2", "--out", str(b)]) == 0
    assert loads(a.read_text()).m == loads(b.read_text()).m


@pytest.mark.parametrize("argv", [
    ["zeros", "--n", "8", "--lambda", "0.5", "--curve-init", "--step", "0.02"],
    ["quadrature", "--n", "5", "--omega", "3", "--format", "csv"],
    ["integrate", "--n", "8", "--omega", "3", "--integrand", "cos"],
    ["curve", "--lambda", "0.5", "--step", "0.05", "--format", "csv"],
    ["classify", "--lambda", "1.5"],
    ["lambda0"],
    ["trajectories", "--lambda", "0.8", "--step", "0.1"],
    ["asymptotics", "--n", "10", "--lambda", "0.5", "--step", "0.02", "--z", "2,1", "--z", "0.3,0.2"],
    ["verify", "--lambda", "0.5", "--ns", "10,20,40", "--quantity", "b"],
    ["verify", "--lambda", "0.5", "--ns", "10,20,40", "--report", "zeros", "--step", "0.02",
     "--format", "csv"],
])
def test_commands_succeed(tmp_path, argv):
    out = tmp_path / "result"
    assert run(argv + ["--out", str(out)]) == 0
    assert out.stat().st_size > 0
    assert manifest(out)["config"]["command"] == argv[0]


def test_integrate_matches_oracle(tmp_path):
    out = tmp_path / "i.json"
    run(["integrate", "--n", "12", "--omega", "5", "--integrand", "exp", "--out", str(out)])
    res = loads(out.read_text())
    assert abs(res["value"] - res["oracle"]) < 1e-20


def test_asymptotics_formula_choice(tmp_path):
    out = tmp_path / "a.json"
    run(["asymptotics", "--n", "20", "--lambda", "0.5", "--step", "0.01", "--z", "1,0.02",
         "--z=-1,0.02", "--out", str(out)])
    rows = loads(out.read_text())
    assert [r["formula"] for r in rows] == ["endpoint+1", "endpoint-1"]
    assert all(r["rel_err"] < 0.05 for r in rows)


@pytest.mark.parametrize("argv,code", [
    (["recurrence", "--n", "4"], 2),
    (["recurrence", "--n", "4", "--omega", "1", "--lambda", "1"], 2),
    (["recurrence", "--n", "0", "--omega", "1"], 2),
    (["recurrence", "--n", "4", "--omega", "1", "--digits", "5"], 2),
    (["curve"], 2),
    (["curve", "--lambda", "2"], 2),
    (["asymptotics", "--n", "4", "--lambda", "0.5", "--z", "x,y"], 2),
    (["asymptotics", "--n", "10", "--lambda", "0.5", "--step", "0.02", "--z", "2,1",
      "--formula", "inner"], 2),
    (["verify", "--lambda", "0.5", "--ns", "a,b"], 2),
    (["recurrence", "--n", "2", "--omega", "3.14159265358979323846264338327950288419716939937510582"], 3),
    (["bogus"], 2),
])
def test_exit_codes(tmp_path, argv, code):
    out = tmp_path / "x.json"
    assert run(argv + ["--out", str(out)]) == code
    if code:
        assert not out.exists()


def test_module_entry_point(tmp_path):
    out = tmp_path / "c.json"
    proc = subprocess.run([sys.executable, "-m", "oscgauss", "classify", "--lambda", "1", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert loads(out.read_text()).regime.value == "single_arc"
    proc = subprocess.run([sys.executable, "-m", "oscgauss", "classify", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "configuration error" in proc.stderr


def test_digits_flag_is_honoured(tmp_path):
    out = tmp_path / "m.json"
    run(["moments", "--n", "2", "--omega", "1", "--digits", "120", "--out", str(out)])
    assert len(json.loads(out.read_text())["data"]["m"][1]["im"]) > 110
    m1 = loads(out.read_text()).m[1]
    with mpmath.workdps(130):
        assert abs(m1.imag - 2 * (mpmath.sin(1) - mpmath.cos(1))) < mpf(10) ** -115


def test_manifest_reproduces_artifact(tmp_path):
    out = tmp_path / "z.json"
    assert run(["zeros", "--n", "20", "--omega", "10", "--digits", "60", "--out", str(out)]) == 0
    first = out.read_bytes()
    assert len(loads(first.decode())) == 20
    assert run(manifest(out)["argv"]) == 0
    assert out.read_bytes() == first
