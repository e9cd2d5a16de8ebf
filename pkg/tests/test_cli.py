import csv
import subprocess
import sys

import pytest

from tsglm.cli import main
from tsglm.methods import METHODS
from tsglm.tableau import load


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_verify_builtins(capsys):
    assert main(["verify", "--method", "order4"]) == 0
    out = capsys.readouterr().out
    assert "uniform order 4, stage order 3" in out and "4/15" in out
    assert main(["verify", "--method", "order5"]) == 0
    out = capsys.readouterr().out
    assert "uniform order 5, stage order 4" in out and "-1.581708242" in out


def test_verify_file_and_declared_order(tmp_path, capsys):
    path = tmp_path / "o4.tab"
    assert main(["export", "--method", "order4", "--out", str(path)]) == 0
    assert load(path) == METHODS["order4"]()
    assert main(["verify", str(path)]) == 0
    text = path.read_text().replace("order = 4", "order = 5")
    bad = tmp_path / "o4-wrong.tab"
    bad.write_text(text)
    assert main(["verify", "--tableau", str(bad)]) == 1
    assert "NOT certified" in capsys.readouterr().out


def test_verify_malformed_file(tmp_path, capsys):
    path = tmp_path / "bad.tab"
    path.write_text("name = x\nkind = rational\ns = 1\nc = [0\n")
    assert main(["verify", str(path)]) == 2
    assert "line 4" in capsys.readouterr().err
    assert main(["verify", str(tmp_path / "missing.tab")]) == 2


def test_verify_float_mode(monkeypatch, capsys):
    monkeypatch.setenv("TSGLM_EXACT", "0")
    assert main(["verify", "--method", "order5"]) == 0
    assert "[real" in capsys.readouterr().out


def test_run_writes_dense_csv(tmp_path, capsys):
    out = tmp_path / "run.csv"
    assert main(["run", "--method", "order4", "--problem", "ode_reduction", "--h", "0.1",
                 "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["t", "y1"]
    assert len(rows) - 1 == 100 * 33 + 1
    summary = capsys.readouterr().out
    assert "steps=100" in summary and "f_evals=204" in summary and "endpoint=" in summary
    assert all(len(r[1]) > 0 and float(r[1]) == float(repr(float(r[1]))) for r in rows[1:5])


def test_run_byte_stable(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        main(["run", "--method", "order4", "--problem", "rotation", "--h", "0.1", "--out", str(p),
              "--probe", "5"])
    assert a.read_bytes() == b.read_bytes()
    assert read_csv(a)[0] == ["t", "y1", "y2"]


def test_run_nonuniform_final_step(tmp_path, capsys):
    out = tmp_path / "run.csv"
    assert main(["run", "--method", "order4", "--problem", "manufactured_smooth", "--h", "0.3",
                 "--out", str(out)]) == 0
    assert "nonuniform-final-step" in capsys.readouterr().out


def test_run_order4_linear_delay_endpoint(tmp_path, capsys):
    out = tmp_path / "run.csv"
    assert main(["run", "--method", "starter", "--problem", "linear_constant_delay", "--h", "0.1",
                 "--out", str(out)]) == 0
    last = read_csv(out)[-1]
    assert float(last[0]) == pytest.approx(4.0) and abs(float(last[1]) - 5 / 24) < 1e-7


def test_run_input_errors(capsys):
    assert main(["run", "--method", "order4", "--problem", "ode_reduction", "--h", "-1"]) == 2
    assert main(["run", "--problem", "ode_reduction", "--h", "0.1"]) == 2
    assert main(["run", "--method", "order4", "--problem", "nope", "--h", "0.1"]) == 2
    assert main(["frobnicate"]) == 2


def test_order_sweep(tmp_path, capsys):
    out = tmp_path / "order.csv"
    assert main(["order", "--method", "order4", "--problem", "manufactured_smooth",
                 "--h-list", "0.2,0.1,0.05,0.025", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["h", "uniform_err", "endpoint_err", "uniform_rate", "endpoint_rate"]
    assert rows[1][3] == ""
    assert 3.7 <= float(rows[-1][3]) <= 4.3
    assert "final rate" in capsys.readouterr().out


def test_order_starter_on_ode(tmp_path):
    out = tmp_path / "order.csv"
    assert main(["order", "--method", "starter", "--problem", "ode_reduction",
                 "--h-list", "0.2,0.1,0.05,0.025", "--out", str(out)]) == 0
    assert float(read_csv(out)[-1][3]) >= 3.7


def test_order_rejects_bad_lists(capsys):
    assert main(["order", "--method", "order4", "--problem", "manufactured_smooth",
                 "--h-list", "0.2,0.1,0.04"]) == 2
    assert main(["order", "--method", "order4", "--problem", "manufactured_smooth",
                 "--h-list", "0.2,0.1"]) == 2


def test_order_divergent_method_exit_code(tmp_path, capsys):
    out = tmp_path / "order.csv"
    code = main(["order", "--method", "order5", "--problem", "linear_constant_delay",
                 "--h-list", "0.1,0.05,0.025", "--out", str(out)])
    assert code == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "tsglm", "verify", "--method", "starter"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "uniform order 3" in res.stdout
