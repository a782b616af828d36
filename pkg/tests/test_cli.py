import json
import subprocess
import sys

import pytest

from conclab.cli import run


def out_of(capsys, argv):
    code = run(argv)
    return code, capsys.readouterr()


def test_bound_example(capsys):
    code, cap = out_of(capsys, ["bound", "--eq", "2.1.3", "--N", "100", "--pA", "0.5", "--k", "20"])
    assert code == 0
    d = json.loads(cap.out.strip().splitlines()[-1])
    assert d["value"] == pytest.approx(0.0366313, abs=1e-7)


def test_verify_exact_example(capsys):
    code, cap = out_of(capsys, ["verify-exact", "--eq", "4.1.2", "--space", "uniform2^3", "--events", "all",
                                "--seed", "0"])
    assert code == 0
    assert json.loads(cap.out)["verdict"] == "pass"


def test_usage_errors(capsys):
    assert run([]) == 2
    assert run(["nonsense"]) == 2
    assert run(["bound", "--eq", "2.1.3", "--N", "100", "--pA", "7", "--k", "20"]) == 2
    assert run(["bound", "--eq", "2.1.3", "--bogus", "1"]) == 2
    assert "error" in capsys.readouterr().err


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"N": 100, "pA": 0.5, "k": 20}))
    code, cap = out_of(capsys, ["bound", "--eq", "2.1.3", "--config", str(cfg)])
    assert code == 0 and json.loads(cap.out)["value"] == pytest.approx(0.0366313, abs=1e-7)
    cfg.write_text(json.dumps({"N": 100, "nope": 1}))
    assert run(["bound", "--eq", "2.1.3", "--config", str(cfg)]) == 2


def test_app_deterministic_and_out_dir(tmp_path, capsys):
    argv = ["app", "lis", "--N", "100", "--samples", "2000", "--seed", "7", "--u-grid", "2,4,6"]
    code1, a = out_of(capsys, argv)
    code2, b = out_of(capsys, argv + ["--workers", "2"])
    assert code1 == code2 == 0
    assert a.out == b.out
    assert run(argv + ["--out", str(tmp_path)]) == 0
    files = list(tmp_path.iterdir())
    assert len(files) == 1 and files[0].read_text().strip() == a.out.strip()


def test_csv_format(capsys):
    code, cap = out_of(capsys, ["verify-exact", "--eq", "2.1.2", "--space", "uniform2^2", "--t-grid", "0.5,1",
                                "--format", "csv"])
    assert code == 0
    assert len(cap.out.strip().splitlines()) == 1 + 15 * 2


def test_mc_uniform(capsys):
    code, cap = out_of(capsys, ["mc", "--statistic", "uniform", "--u-grid", "0.5", "--samples", "1000"])
    assert code == 0
    d = json.loads(cap.out)
    # no curve for a bare uniform draw, so the run only reports
    assert d["verdict"] == "report" and d["estimate"]["n"] == 1000
    assert d["estimate"]["cp_upper"][0] >= d["estimate"]["estimates"][0]


def test_selftest_negative_control():
    # criterion 1 alone keeps this fast; the halved table must be caught
    p = subprocess.run([sys.executable, "-m", "conclab.cli", "selftest", "--quick", "--criteria", "1",
                        "--inject-fault"], capture_output=True, text=True)
    assert p.returncode == 1
    p = subprocess.run([sys.executable, "-m", "conclab.cli", "selftest", "--quick", "--criteria", "1,9"],
                       capture_output=True, text=True)
    assert p.returncode == 0, p.stdout + p.stderr
