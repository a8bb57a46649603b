import csv
import io
import json
import math

import numpy as np
import pytest

from pmlock.cli import load_config, main, parse_grid
from pmlock.optimize import maximize_slope


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    body = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_parse_grid():
    np.testing.assert_allclose(parse_grid("1:100:3"), [1, 10, 100])
    np.testing.assert_allclose(parse_grid("0:1:3:lin"), [0, 0.5, 1])


def test_slope_reference_point(capsys):
    code, out, _ = run(capsys, "slope", "--model", "cpt", "--omega-m", "0.764", "--m", "0.652",
                       "--alpha", "2.356")
    assert code == 0
    row = table(out)[0]
    assert float(row["slope"]) >= 0.995 * maximize_slope("cpt", 0.764).slope_max


def test_slope_zero_index(capsys):
    code, out, _ = run(capsys, "slope", "--model", "cpt", "--m", "0")
    assert code == 0
    assert float(table(out)[0]["slope"]) == 0.0


def test_two_level_slope_ratio(capsys):
    vals = []
    for w in ("20", "40"):
        _, out, _ = run(capsys, "slope", "--model", "two-level", "--omega-m", w, "--m", "1.08")
        vals.append(float(table(out)[0]["slope"]))
    assert vals[1] / vals[0] == pytest.approx(0.5, abs=0.03)


def test_slope_detuning_sweep_is_odd(capsys):
    code, out, _ = run(capsys, "slope", "--model", "dr", "--omega-m", "0.5", "--m", "2",
                       "--delta-grid=-1:1:5:lin", "--alpha", "0.3")
    assert code == 0
    e = [float(r["error_signal"]) for r in table(out)]
    assert e[0] == pytest.approx(-e[4], rel=1e-12) and abs(e[2]) < 1e-12


def test_optimize_and_sweep(capsys):
    _, out, _ = run(capsys, "optimize", "--omega-m", "0.764")
    r = table(out)[0]
    assert float(r["m_opt"]) == pytest.approx(0.652, abs=0.01)
    assert float(r["alpha_over_pi"]) == pytest.approx(0.75, abs=0.02)
    _, out, _ = run(capsys, "sweep", "--omega-grid", "0.5:1.2:8")
    rows = table(out)
    assert max(float(r["slope_norm"]) for r in rows) == 1.0


def test_stationarity_command(capsys):
    code, out, _ = run(capsys, "stationarity", "--omega-grid", "0.01:0.1:3")
    assert code == 0
    dev = [float(r["deviation"]) for r in table(out)]
    assert np.ptp(dev) / np.mean(dev) < 0.02


def test_usage_errors(capsys):
    assert run(capsys, "slope", "--model", "nope")[0] == 1
    assert run(capsys, "slope", "--omega-m", "-1")[0] == 1
    assert run(capsys, "sweep", "--omega-grid", "0:1:3")[0] == 1
    assert run(capsys, "optimize", "--m-range", "5:1")[0] == 1
    assert run(capsys, "bogus")[0] == 1
    code, _, err = run(capsys, "slope", "--config", "/nonexistent/cfg")
    assert code == 1 and "error" in err


def test_verify_cpt_passes(capsys):
    code, out, _ = run(capsys, "verify", "--model", "cpt")
    assert code == 0
    assert all(r["status"] == "pass" for r in table(out))


def test_verify_huge_drive_fails(capsys):
    code, out, err = run(capsys, "verify", "--model", "dr", "--scale", "0.5")
    assert code == 2
    assert all(r["status"] == "fail" for r in table(out))
    assert "verification failed" in err


def test_figure2_outputs(tmp_path, capsys):
    assert run(capsys, "figure2", "--out", str(tmp_path), "--omega-grid", "0.1:200:121")[0] == 0
    a = table((tmp_path / "figure2a.csv").read_text())
    b = table((tmp_path / "figure2b.csv").read_text())
    cpt = [r for r in a if r["model"] == "cpt"]
    tl = [r for r in a if r["model"] == "two-level"]
    assert list(b[0]) == ["omega_m_bar", "slope_norm", "m_opt", "alpha_over_pi"]
    peak = max(cpt, key=lambda r: float(r["slope_norm"]))
    assert float(peak["slope_norm"]) == 1.0
    assert float(peak["omega_m_bar"]) == pytest.approx(0.764, abs=0.05)
    hi = [float(r["slope_norm"]) for r in cpt if float(r["omega_m_bar"]) >= 20]
    assert np.ptp(hi) / np.mean(hi) < 0.01
    tail = [float(r["slope_norm"]) for r in tl if float(r["omega_m_bar"]) >= 2]
    assert np.all(np.diff(tail) < 0)


def test_determinism_and_config_round_trip(tmp_path, capsys):
    args = ["sweep", "--model", "two-level", "--omega-grid", "0.3:3:5", "--scale", "0.25"]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, *args, "--out", str(first))[0] == 0
    assert run(capsys, *args, "--out", str(second))[0] == 0
    assert first.read_bytes() == second.read_bytes()
    assert b"\r" not in first.read_bytes()
    again = tmp_path / "c.csv"
    assert run(capsys, "sweep", "--config", str(first), "--out", str(again))[0] == 0
    assert again.read_bytes() == first.read_bytes()
    assert load_config(first)["scale"] == 0.25


def test_key_value_config_overridden_by_flags(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("model = two-level\nomega-m = 20\nm = 1.0\n")
    _, out, _ = run(capsys, "slope", "--config", str(cfg), "--m", "1.5")
    r = table(out)[0]
    assert r["model"] == "two-level" and float(r["omega_m_bar"]) == 20.0 and float(r["m"]) == 1.5
    cfg.write_text("unknown_key = 3\n")
    assert run(capsys, "slope", "--config", str(cfg))[0] == 1


def test_json_format(tmp_path, capsys):
    out = tmp_path / "o.json"
    assert run(capsys, "optimize", "--omega-m", "2", "--format", "json", "--out", str(out))[0] == 0
    doc = json.loads(out.read_text())
    assert doc["metadata"]["config"]["omega_m"] == 2.0
    assert doc["columns"][0] == "omega_m_bar" and len(doc["rows"]) == 1
    again = tmp_path / "p.json"
    assert run(capsys, "optimize", "--config", str(out), "--format", "json", "--out", str(again))[0] == 0
    assert again.read_bytes() == out.read_bytes()
