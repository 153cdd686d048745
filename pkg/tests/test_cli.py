from __future__ import annotations

import json
import subprocess
import sys

import pytest

from hermite_wavelet import cli
from hermite_wavelet.csvio import read_csv
from hermite_wavelet.meyer_frac import load_table


def run(args):
    code = cli.main(args)
    return code


def test_tables_default(tmp_path):
    assert run(["tables", "--out-dir", str(tmp_path), "--quiet"]) == 0
    d = 2
    tabs = sorted(p.name for p in tmp_path.glob("*.tab"))
    assert len(tabs) == 2 + 2 * d
    rep = json.loads((tmp_path / "tables-report.json").read_text())
    assert rep["max_residual"] < 1e-6
    # the resolved configuration travels with every table
    t = load_table(tmp_path / "psi_h-1.tab")
    assert t.params["run_config"]["h"] == [0.8, 0.85]


def test_tables_rerun_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(["tables", "--out-dir", str(a), "--h", "0.7", "--quiet"])
    run(["tables", "--out-dir", str(b), "--h", "0.7", "--quiet"])
    for p in a.iterdir():
        assert p.read_bytes() == (b / p.name).read_bytes()


def test_tables_csv(tmp_path):
    assert run(["tables", "--out-dir", str(tmp_path), "--h", "0.7", "--format", "csv",
                "--R", "8", "--dx", "0.0625", "--quiet"]) in (0, 1)
    assert len(list(tmp_path.glob("*.csv"))) == 4


def test_tables_invalid_h(tmp_path, capsys):
    assert run(["tables", "--out-dir", str(tmp_path), "--h", "0.4,0.9"]) == 2
    assert "Hermite admissibility condition" in capsys.readouterr().err


def test_generate_example(tmp_path):
    out = tmp_path / "p.csv"
    args = ["generate", "--rep", "approx", "--d", "2", "--h", "0.8,0.85", "--J", "5", "--T", "3",
            "--seed", "1", "--out", str(out), "--quiet"]
    assert run(args) == 0
    header, data = read_csv(out)
    cfg = json.loads(out.with_suffix(".meta.json").read_text())["config"]
    assert header == ["t", "value"]
    assert data.shape[0] == cfg["grid_n"] + 1
    assert tuple(data[0]) == (0.0, 0.0)
    first = out.read_bytes()
    assert run(args) == 0
    assert out.read_bytes() == first


def test_generate_fullseries_needs_T(tmp_path, capsys):
    assert run(["generate", "--rep", "fullseries", "--T", "2", "--out-dir", str(tmp_path)]) == 2
    assert "T > 2" in capsys.readouterr().err


def test_generate_budget(tmp_path, capsys):
    code = run(["generate", "--rep", "fullseries", "--T", "2.5", "--N", "8", "--max-terms", "50",
                "--out-dir", str(tmp_path)])
    assert code == 3
    assert "max_terms" in capsys.readouterr().err


def test_generate_fbm_rejects_d2(tmp_path):
    assert run(["generate", "--rep", "fbm", "--d", "2", "--out-dir", str(tmp_path)]) == 2


def test_unknown_flag_and_abbreviation():
    assert run(["generate", "--Jx", "3"]) == 2
    assert run(["generate", "--gri", "8"]) == 2          # no prefix matching


def test_config_precedence(tmp_path, caplog):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"J": 3, "grid_n": 16, "seed": 4}))
    out = tmp_path / "p.csv"
    with caplog.at_level("INFO", logger="hermite_wavelet"):
        assert run(["generate", "--config", str(cfg), "--J", "4", "--out", str(out)]) == 0
    meta = json.loads(out.with_suffix(".meta.json").read_text())
    assert meta["config"]["J"] == 4 and meta["config"]["grid_n"] == 16
    assert meta["config"]["seed"] == 4 and meta["config"]["T"] == 1.0
    text = caplog.text
    assert "J = 4 [cli]" in text and "grid_n = 16 [file]" in text and "T = 1.0 [default]" in text


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"Jx": 3}))
    assert run(["generate", "--config", str(cfg)]) == 2
    assert "Jx" in capsys.readouterr().err


def test_d_h_mismatch():
    assert run(["generate", "--d", "3", "--h", "0.8,0.85"]) == 2


def test_validate_meyer(tmp_path):
    assert run(["validate", "--suite", "meyer", "--out-dir", str(tmp_path), "--quiet"]) == 0
    rep = json.loads((tmp_path / "report-meyer.json").read_text())
    assert rep["passed"] is True
    assert (tmp_path / "report-meyer.txt").read_text().startswith("[PASS]")


def test_validate_rate_theory(tmp_path):
    assert run(["validate", "--suite", "rate", "--d", "1", "--h", "0.7", "--quick",
                "--out-dir", str(tmp_path), "--quiet"]) == 0
    rep = json.loads((tmp_path / "report-rate-d1.json").read_text())
    assert rep["theory_slope"] == pytest.approx(-0.2)
    assert rep["quick"] is True


def test_sigma_export(tmp_path):
    out = tmp_path / "s.csv"
    assert run(["sigma", "--k-range", "0,2", "--P", "32", "--out", str(out), "--quiet"]) == 0
    header, data = read_csv(out)
    assert header == ["k_1", "k_2", "sigma"] and data.shape == (9, 3)
    meta = json.loads(out.with_suffix(".meta.json").read_text())
    assert meta["route"] == "b" and meta["config"]["P"] == 32


def test_threads_do_not_change_outputs(tmp_path):
    outs = []
    for th in ("1", "4"):
        d = tmp_path / th
        run(["generate", "--d", "2", "--J", "6", "--threads", th, "--out-dir", str(d), "--quiet"])
        outs.append(d)
    for name in ("path-approx.csv", "path-approx.meta.json"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "hermite_wavelet", "--version"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip()
