import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from spinprobe import cli
from spinprobe.atom import make_orbital
from spinprobe.detector import adiabatic_rate_closed, default_charge


def run(args, tmp_path, name="out.csv"):
    out = tmp_path / name
    code = cli.main(list(args) + ["--out", str(out)])
    text = out.read_text(encoding="utf-8") if out.exists() else ""
    return code, text


def table(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def config_of(text):
    first = text.splitlines()[0]
    assert first.startswith("# config: ")
    return json.loads(first[len("# config: "):])


def comments(text):
    return [ln[2:] for ln in text.splitlines() if ln.startswith("# ")]


# -- parsing ---------------------------------------------------------------------

def test_parse_grid():
    np.testing.assert_allclose(cli.parse_grid("-1:1:5"), [-1, -0.5, 0, 0.5, 1])
    g = cli.parse_grid("1e-3:10:5:log")
    assert g[0] == pytest.approx(1e-3) and g[-1] == pytest.approx(10) and g[2] == pytest.approx(0.1)
    for bad in ("1:0:5", "0:1:1", "0:1", "a:b:c", "0:1:3:cubic", "-1:1:3:log"):
        with pytest.raises(cli.CliError):
            cli.parse_grid(bad)


def test_config_file_and_flag_precedence(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# orbital run\nZ = 2\ngrid = 0.1:1:3\ntol=1e-9\n", encoding="utf-8")
    code, text = run(["orbital", "--config", str(cfg_file)], tmp_path)
    assert code == 0
    cfg = config_of(text)
    assert cfg["Z"] == 2 and cfg["grid"] == "0.1:1:3" and cfg["tol"] == 1e-9
    assert cfg["units"] == "hbar=c=a0=1"
    code, text = run(["orbital", "--config", str(cfg_file), "--Z", "3"], tmp_path)
    assert code == 0 and config_of(text)["Z"] == 3


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    cfg_file = tmp_path / "bad.cfg"
    cfg_file.write_text("colour = blue\n", encoding="utf-8")
    code, _ = run(["orbital", "--config", str(cfg_file)], tmp_path)
    assert code == 2
    assert "unrecognised" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    code, _ = run(["orbital", "--config", str(tmp_path / "nope.cfg")], tmp_path)
    assert code == 2


# -- orbital -----------------------------------------------------------------------

def test_orbital_table(tmp_path):
    code, text = run(["orbital"], tmp_path)
    assert code == 0
    rows = table(text)
    assert list(rows[0]) == ["r_over_a0", "g", "f", "phi", "phi_closed_minus_integral"]
    assert len(rows) == 200
    assert float(rows[0]["r_over_a0"]) == pytest.approx(1e-3) and float(rows[-1]["r_over_a0"]) == pytest.approx(20)
    assert max(abs(float(r["phi_closed_minus_integral"])) for r in rows) < 1e-8
    summary = [c for c in comments(text) if c.startswith("summary: ")][0]
    fields = dict(item.split("=") for item in summary[len("summary: "):].split(","))
    assert float(fields["normalization"]) == pytest.approx(1.0, abs=1e-8)
    assert float(fields["g_factor_correction"]) == pytest.approx(1 - 1.775e-5, abs=1e-7)


def test_orbital_rejects_unbound_charge(tmp_path, capsys):
    code, _ = run(["orbital", "--Z", "137"], tmp_path)
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_orbital_rejects_excited_orbital(tmp_path):
    code, _ = run(["orbital", "--n0", "2"], tmp_path)
    assert code == 2


# -- response -------------------------------------------------------------------------

def test_response_spin_has_no_K(tmp_path):
    code, text = run(["response", "--grid", "-2:2:5", "--switching", "gaussian:T=2"], tmp_path)
    assert code == 0
    rows = table(text)
    assert len(rows) == 5
    assert all(math.isnan(float(r["K_re"])) for r in rows)
    mid = rows[2]
    assert float(mid["M_re"]) == float(mid["L_zero"]) and float(mid["M_im"]) == 0.0


def test_response_udw_window(tmp_path):
    code, text = run(["response", "--model", "udw-amplitude", "--gap", "-1", "--switching", "window:0,3"],
                     tmp_path)
    assert code == 0
    (row,) = table(text)
    assert float(row["Omega_a0"]) == -1.0
    assert not math.isnan(float(row["K_re"]))


def test_response_bad_switching(tmp_path):
    code, _ = run(["response", "--switching", "lorentz:T=1"], tmp_path)
    assert code == 2


# -- pflip sweep -----------------------------------------------------------------------

def test_pflip_sweep_small(tmp_path):
    code, text = run(["pflip-sweep", "--grid", "-4:1:11", "--T-list", "5,10"], tmp_path)
    assert code == 0
    rows = table(text)
    assert list(rows[0]) == ["Omega_a0", "T_over_a0", "P_flip"]
    assert len(rows) == 22
    assert all(float(r["P_flip"]) >= 0 for r in rows)


def test_sweep_independent_of_thread_count(tmp_path, monkeypatch):
    args = ["pflip-sweep", "--grid", "-3:1:9", "--T-list", "4,8"]
    monkeypatch.setenv("SPINPROBE_THREADS", "1")
    _, one = run(args, tmp_path, "one.csv")
    monkeypatch.setenv("SPINPROBE_THREADS", "4")
    _, four = run(args, tmp_path, "one.csv")
    assert one == four


def test_bad_thread_count(tmp_path, monkeypatch):
    monkeypatch.setenv("SPINPROBE_THREADS", "many")
    code, _ = run(["pflip-sweep", "--grid", "-3:1:3", "--T-list", "4"], tmp_path)
    assert code == 2


# -- rate -------------------------------------------------------------------------------

def test_rate_rows(tmp_path):
    code, text = run(["rate", "--grid", "-1:1:3"], tmp_path)
    assert code == 0
    rows = {float(r["Omega_a0"]): r for r in table(text)}
    assert float(rows[-1.0]["rel_err"]) < 0.01
    assert float(rows[1.0]["rate_closed"]) == 0.0
    assert all(r["status"] == "ok" for r in rows.values())


def test_rate_scales_with_charge_squared(tmp_path):
    q = default_charge()
    _, base = run(["rate", "--gap", "-1"], tmp_path, "a.csv")
    _, doubled = run(["rate", "--gap", "-1", "--coupling", repr(2 * q)], tmp_path, "b.csv")
    (r1,), (r2,) = table(base), table(doubled)
    assert float(r2["rate_closed"]) == 4 * float(r1["rate_closed"])
    assert float(r2["rate_numeric"]) == pytest.approx(4 * float(r1["rate_numeric"]), rel=1e-12)
    assert float(r1["rate_closed"]) == adiabatic_rate_closed(make_orbital().params, q, -1.0)


def test_rate_error_rows_do_not_stop_the_run(tmp_path):
    code, text = run(["rate", "--grid", "-2:-1:2", "--T-list", "25,25,50"], tmp_path)
    assert code == 1
    rows = table(text)
    assert len(rows) == 2
    assert all(r["status"].startswith("error") for r in rows)
    assert all(math.isnan(float(r["rate_numeric"])) for r in rows)


# -- udw-compare -------------------------------------------------------------------------

def test_udw_compare(tmp_path):
    code, text = run(["udw-compare", "--grid", "-1:1:3", "--switching", "gaussian:T=2",
                      "--bloch", "0.6,0.3,-0.5"], tmp_path)
    assert code == 0
    rows = table(text)
    for r in rows:
        assert float(r["L_der"]) == pytest.approx(float(r["L_spin"]), rel=1e-12)
        assert float(r["M_der_re"]) == pytest.approx(float(r["M_spin_re"]), rel=1e-12)
    gapless = [r for r in rows if float(r["Omega_a0"]) == 0.0][0]
    assert float(gapless["a_amp_x"]) == 0.6
    for r in rows:
        dz_spin = float(r["a_spin_z"]) + 0.5
        dz_der = float(r["a_der_z"]) + 0.5
        assert dz_spin / dz_der == pytest.approx(4 / 3, rel=1e-6)
    assert "initial_bloch=0.59999999999999998,0.29999999999999999,-0.5" in comments(text)


def test_udw_compare_rejects_long_bloch_vector(tmp_path):
    code, _ = run(["udw-compare", "--bloch", "1,1,0"], tmp_path)
    assert code == 2


# -- oracle -----------------------------------------------------------------------------------

def test_oracle_default(tmp_path):
    code, text = run(["oracle", "angular"], tmp_path)
    assert code == 0
    rows = table(text)
    assert len(rows) == 20 * 7 * 4
    assert {r["term"] for r in rows} == {"U2rho", "rhoU2", "U1rhoU1", "R"}
    worst = max(float(r["abs_err"]) for r in rows)
    assert worst < 1e-6
    assert comments(text)[-1] == f"max_abs_err={cli.fmt(worst)}"


def test_oracle_is_bitwise_reproducible(tmp_path):
    _, a = run(["oracle", "angular", "--seed", "7", "--draws", "3"], tmp_path, "a.csv")
    _, b = run(["oracle", "angular", "--seed", "7", "--draws", "3"], tmp_path, "a.csv")
    _, c = run(["oracle", "angular", "--seed", "8", "--draws", "3"], tmp_path, "a.csv")
    assert a == b and a != c
    assert "\r" not in a
    assert config_of(a)["seed"] == 7


def test_oracle_rejects_long_bloch_vector(tmp_path, capsys):
    code, text = run(["oracle", "angular", "--bloch", "0.9,0.9,0"], tmp_path)
    assert code == 2 and text == ""
    assert "exceeds 1" in capsys.readouterr().err


def test_bad_seed(tmp_path):
    code, _ = run(["oracle", "angular", "--seed", "-1"], tmp_path)
    assert code == 2


# -- output formatting --------------------------------------------------------------------------

def test_numbers_round_trip():
    for v in (0.1, 1 / 3, -2.5e-300, 6.02214076e23):
        assert float(cli.fmt(v)) == v
    assert cli.fmt(3) == "3" and cli.fmt("ok") == "ok"


def test_console_entry_point_writes_stdout():
    proc = subprocess.run([sys.executable, "-m", "spinprobe.cli", "orbital", "--grid", "0.5:1:2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("# config: ")
    assert len(table(proc.stdout)) == 2
