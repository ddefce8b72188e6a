import io
import json
import subprocess
import sys

import pytest

from oppenheim.cli import load_form, main, num
from oppenheim.scalars import QuadExt


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def record(*argv):
    code, out, _ = call(*argv)
    assert code == 0, out
    return json.loads(out)


def test_values_small_finds_exact_witness():
    rec = record("values", "--form", "sqrt2", "--eps", "1e-1")
    assert rec["schema"] == 1 and rec["command"] == "values"
    p = rec["payload"]
    assert p["status"] == "found" and p["value"]["mode"] == "exact"
    x = p["x"]
    v = x[0] ** 2 + x[1] ** 2 - QuadExt.sqrt(2) * x[2] ** 2
    assert 0 < abs(float(v)) < 0.1


def test_count_series_and_ratios():
    rec = record("count", "--form", "sqrt2", "--r", "8,16")
    s = rec["payload"]["series"]
    assert [e["r"] for e in s] == [8, 16] and s[0]["count"] > 0
    assert rec["payload"]["exponent"] == 1


def test_counterexample_command():
    rec = record("counterexample", "--N", "10,100")
    mins = [e["minimum"]["float"] for e in rec["payload"]["series"]]
    assert mins[1] <= mins[0]


def test_rationality_command():
    assert record("rationality", "--form", "diag:2,4,-6")["payload"]["tag"] == "Rational"
    assert record("rationality", "--form", "sqrt2")["payload"]["tag"] == "Irrational"


def test_lie_command():
    p = record("lie", "--n", "3", "--trials", "3")["payload"]
    assert p["all_passed"] and p["sl2_counterexample"]["status"]


def test_flow_geodesic_and_eta():
    p = record("flow", "--mode", "geodesic", "--t-max", "5")["payload"]
    assert p["max_abs_error"]["value"] < 1e-9
    p = record("flow", "--mode", "eta", "--degree", "1", "--trials", "200")["payload"]
    assert p["eta"]["value"] == pytest.approx(0.25, abs=1e-9)


def test_sintegral_command():
    p = record("sintegral", "--form", "diag:1,1,-1", "--p", "3", "--e", "1",
               "--eps-inf", "0.1", "--max-radius", "20")["payload"]
    assert p["status"] == "none_found"
    p = record("sintegral", "--form", "sqrt2", "--form-p", "lorentz", "--p", "7", "--e", "1",
               "--eps-inf", "0.3", "--max-radius", "60")["payload"]
    assert p["status"] == "found" and p["padic_abs"]["value"] == "1/7"


def test_exit_code_violation():
    code, _, err = call("values", "--form", "diag:1,1,0")
    assert code == 1 and "NonDegenerateViolation" in err


def test_exit_code_parse():
    assert call("values", "--form", "1 2;")[0] == 2
    assert call("nonsense")[0] == 2
    assert call("values")[0] == 2
    assert call("count", "--form", "sqrt2", "--r", "1.5")[0] == 2
    assert call("flow", "--mode", "spiral")[0] == 2


def test_exit_code_partial():
    code, out, _ = call("count", "--form", "sqrt2", "--r", "64", "--max-evals", "1000")
    assert code == 3
    assert json.loads(out)["payload"]["series"][0]["partial"]


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"form": "sqrt2", "r": "4,8", "seed": 5}))
    rec = record("count", "--config", str(cfg), "--r", "4")
    assert rec["config"]["r"] == "4" and rec["seed"] == 5
    cfg.write_text(json.dumps({"form": "sqrt2", "radius": 3}))
    assert call("count", "--config", str(cfg))[0] == 2


def test_payload_is_reproducible():
    args = ("flow", "--mode", "horocycle", "--T", "20", "--haar-samples", "500", "--seed", "3")
    a, b = record(*args), record(*args)
    for r in (a, b):
        r.pop("wall_time_s")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a["payload"]["closed_control"]["gap_vs_period_average"]["value"] < 1e-6


def test_csv_output_with_sidecar(tmp_path):
    path = tmp_path / "out.csv"
    code, _, _ = call("counterexample", "--N", "10,20", "--format", "csv", "--output", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# seed=0") and lines[1].startswith("N,")
    assert json.loads((tmp_path / "out.json").read_text())["schema"] == 1


def test_mode_annotations():
    from fractions import Fraction
    assert num(3) == {"value": 3, "mode": "exact"}
    assert num(Fraction(1, 2))["mode"] == "exact"
    assert num(0.5)["mode"] == "float-53"


def test_form_loader(tmp_path):
    f = tmp_path / "form.txt"
    f.write_text(load_form("sqrt2").to_text())
    assert load_form(str(f)).to_text() == load_form("sqrt2").to_text()
    assert load_form("diag:1,2,-3").n == 3


def test_console_module_entry():
    proc = subprocess.run([sys.executable, "-m", "oppenheim", "counterexample", "--N", "5"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0 and json.loads(proc.stdout)["schema"] == 1
