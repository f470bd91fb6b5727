from __future__ import annotations

import csv
import json
import subprocess
import sys

import pytest

from transmon_antenna.cli import EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, main

XMON = {"variant": "xmon", "arm_l_um": 165, "trace_s_um": 24, "gap_w_um": 24, "substrate_eps": 11}
JUNCTION = {"R_n_ohm": 7000, "C_j_fF": 9}


@pytest.fixture
def files(tmp_path):
    g = tmp_path / "xmon.json"
    g.write_text(json.dumps(XMON))
    j = tmp_path / "junction.json"
    j.write_text(json.dumps(JUNCTION))
    return g, j


def window(lo, hi, n):
    return ["--f-start-ghz", str(lo), "--f-stop-ghz", str(hi), "--n-points", str(n)]


def test_sweep_writes_csv_svg_and_currents(files, tmp_path):
    g, j = files
    out = tmp_path / "sweep"
    dump = tmp_path / "cur.csv"
    rc = main(["sweep", "--geometry", str(g), "--junction", str(j), *window(20, 180, 81),
               "--out", str(out), "--dump-currents", str(dump)])
    assert rc == EXIT_OK
    rows = list(csv.DictReader(open(out / "impedance.csv")))
    assert list(rows[0]) == ["f_Hz", "Re_Zw", "Im_Zw", "Re_Zrad", "Im_Zrad", "Re_Zj", "Im_Zj"]
    f = [float(r["f_Hz"]) for r in rows]
    re = [float(r["Re_Zrad"]) for r in rows]
    # Fundamental resonance = first local maximum; a narrow subradiant mode
    # near the top of the band is higher in absolute terms.
    peak = next(f[i] for i in range(1, len(re) - 1) if re[i - 1] < re[i] >= re[i + 1])
    assert 85e9 <= peak <= 110e9
    svg = (out / "impedance.svg").read_text()
    assert svg.startswith("<svg") and "Zj*" in svg
    assert next(csv.reader(open(dump))) == ["segment_index", "x", "y", "z", "Re[I]", "Im[I]"]


def test_match_outputs(files, tmp_path, capsys):
    g, j = files
    out = tmp_path / "match"
    rc = main(["match", "--geometry", str(g), "--junction", str(j), *window(60, 150, 181),
               "--out", str(out)])
    assert rc == EXIT_OK
    doc = json.loads((out / "match.json").read_text())
    assert 0.85 * 97 <= doc["f0_GHz"] <= 1.15 * 97
    assert 1 <= doc["delta_f_N_GHz"] <= 5
    assert (out / "match.csv").exists() and (out / "match.svg").exists()
    assert json.loads(capsys.readouterr().out) == doc


def test_sweep_is_deterministic(files, tmp_path):
    g, _ = files
    for name in ("a", "b"):
        assert main(["sweep", "--geometry", str(g), *window(80, 120, 9),
                     "--out", str(tmp_path / name)]) == EXIT_OK
    assert (tmp_path / "a" / "impedance.csv").read_bytes() == \
        (tmp_path / "b" / "impedance.csv").read_bytes()


@pytest.mark.parametrize("bad", [window(100, 100, 5), window(100, 90, 5), window(0, 90, 5)])
def test_empty_window_is_config_error(files, bad, capsys):
    g, _ = files
    assert main(["sweep", "--geometry", str(g), *bad]) == EXIT_CONFIG
    assert "frequency window" in capsys.readouterr().err


def test_bad_inputs(files, tmp_path):
    g, j = files
    assert main(["sweep", "--geometry", str(tmp_path / "nope.json"), *window(80, 90, 3)]) \
        == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({**XMON, "colour": "red"}))
    assert main(["sweep", "--geometry", str(bad), *window(80, 90, 3)]) == EXIT_CONFIG
    assert main(["match", "--geometry", str(g), *window(80, 90, 3)]) == EXIT_CONFIG
    assert main(["sweep", "--geometry", str(g), *window(80, 90, 3),
                 "--segments-per-wavelength", "4"]) == EXIT_CONFIG


def test_solver_error_exit_code(tmp_path):
    # A loop whose gap is too wide for the requested band.
    g = tmp_path / "fat.json"
    g.write_text(json.dumps({"variant": "circular", "r_island_um": 100, "gap_w_um": 60}))
    rc = main(["sweep", "--geometry", str(g), *window(100, 2000, 3), "--out", str(tmp_path / "o")])
    assert rc in (EXIT_CONFIG, EXIT_SOLVER)


def test_poison_forward_and_inverse(capsys, tmp_path):
    assert main(["poison", "--f0-ghz", "97", "--delta-f-ghz", "1.8", "--t-mk", "300"]) == EXIT_OK
    fwd = json.loads(capsys.readouterr().out)
    assert fwd["gamma_pa_Hz"] == pytest.approx(300, rel=0.10)
    assert main(["poison", "--f0-ghz", "97", "--delta-f-ghz", "1.8", "--gamma-hz", "300",
                 "--out", str(tmp_path)]) == EXIT_OK
    inv = json.loads(capsys.readouterr().out)
    assert inv["T_mK"] == pytest.approx(298, abs=10)
    assert json.loads((tmp_path / "poison.json").read_text()) == inv
    assert main(["poison", "--f0-ghz", "97", "--delta-f-ghz", "0", "--gamma-hz", "1"]) == EXIT_CONFIG


def test_t1(capsys):
    assert main(["t1", "--c-ff", "100", "--f01-ghz", "5", "--r-um", "100"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["T1_s"] == pytest.approx(1.5e-3, rel=0.02)
    assert main(["t1", "--c-ff", "100", "--f01-ghz", "5", "--eps-eff", "6", "--r-um", "100"]) \
        == EXIT_OK
    assert json.loads(capsys.readouterr().out)["T1_s"] == pytest.approx(17e-6, rel=0.02)
    area = str(3.141592653589793 * 100**2)
    assert main(["t1", "--c-ff", "100", "--f01-ghz", "5", "--eps-eff", "6", "--area-um2", area]) \
        == EXIT_OK
    assert json.loads(capsys.readouterr().out)["T1_s"] == pytest.approx(16.92e-6, rel=1e-3)
    assert main(["t1", "--c-ff", "100", "--f01-ghz", "5", "--eps-eff", "6", "--r-um", "100",
                 "--gap-um", "10", "--method", "mom"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["method"] == "mom" and doc["T1_s"] == pytest.approx(16.92e-6 / 1.21, rel=0.05)
    assert main(["t1", "--c-ff", "-1", "--f01-ghz", "5", "--r-um", "100"]) == EXIT_CONFIG


def test_reproduce_unknown_id(tmp_path):
    assert main(["reproduce", "fig9", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_reproduce_closed_form_targets(tmp_path, capsys):
    assert main(["reproduce", "closed", "s5", "s6", "--out", str(tmp_path)]) == EXIT_OK
    text = capsys.readouterr().out
    assert "FAIL" not in text and text.count("PASS") >= 12
    rows = list(csv.DictReader(open(tmp_path / "summary.csv")))
    assert {r["result"] for r in rows} == {"PASS"}


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "transmon_antenna", "poison", "--f0-ghz", "97",
                          "--delta-f-ghz", "1.8", "--gamma-hz", "300"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["T_mK"] == pytest.approx(298.3, abs=0.1)
