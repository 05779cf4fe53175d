import json
import subprocess
import sys

import pytest

from metagabor import cli, symplin


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_matrix_preset(capsys):
    code, out, _ = run(capsys, "matrix", "--preset", "a_st")
    rep = json.loads(out)
    assert code == 0 and rep["shift_invertible"] is True and rep["derived"]["det_E"] == 1
    assert rep["factorization"]["product_residual"] < 1e-12


def test_matrix_tau_zero(capsys):
    code, out, _ = run(capsys, "matrix", "--preset", "a_tau:0")
    assert code == 0 and json.loads(out)["shift_invertible"] is False


def test_matrix_invalid_names_relation(tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text("1,0,0,0\n0,1,0,0\n0,0,2,0\n0,0,0,1\n")
    code, _, err = run(capsys, "matrix", "--in", str(p))
    assert code == 2 and "R3a" in err


def test_matrix_malformed_csv(tmp_path, capsys):
    p = tmp_path / "mal.csv"
    p.write_text("1,0,x\n")
    code, _, _ = run(capsys, "matrix", "--in", str(p))
    assert code == 2


def test_wigner_both_paths(tmp_path, capsys):
    out = tmp_path / "w.csv"
    code, text, _ = run(capsys, "wigner", "--matrix", "a_st", "--signal", "gaussian",
                        "--window", "gaussian", "--path", "both", "--out", str(out))
    rep = json.loads(text)
    assert code == 0 and rep["max_deviation"] < 1e-6
    meta = json.loads((tmp_path / "w.csv.json").read_text())
    assert meta["windows"] == ["gaussian", "gaussian"] and meta["matrix_preset"] == "a_st"


def test_wigner_fast_on_singular_E(tmp_path, capsys):
    code, _, _ = run(capsys, "wigner", "--matrix", "a_tau:0", "--signal", "gaussian",
                     "--window", "gaussian", "--path", "fast", "--out", str(tmp_path / "w.csv"))
    assert code == 3


def test_wigner_zero_signal(tmp_path, capsys):
    code, text, _ = run(capsys, "wigner", "--matrix", "a_st", "--signal", "zero",
                        "--window", "gaussian", "--out", str(tmp_path / "w.csv"))
    assert code == 0 and json.loads(text)["norm"] == 0


def test_frame_report(tmp_path, capsys):
    code, text, _ = run(capsys, "frame", "--matrix", "a_st", "--window", "gaussian",
                        "--lattice", "4,4", "--dual", str(tmp_path / "dual.csv"), "--equiv")
    rep = json.loads(text)
    assert code == 0 and rep["is_frame"] is True and rep["redundancy"] == 3
    assert (tmp_path / "dual.csv").exists() and len(rep["equivalence"]) == 3


def test_frame_undersampled(capsys):
    code, text, _ = run(capsys, "frame", "--matrix", "a_st", "--lattice", "12,16")
    assert code == 0 and json.loads(text)["is_frame"] is False


def test_frame_equiv_ratio_is_det_E(capsys):
    code, text, _ = run(capsys, "frame", "--matrix", "a_tau:0.5", "--equiv")
    ratios = [r["ratio"] for r in json.loads(text)["equivalence"][1:]]
    assert code == 0 and all(abs(r - 0.25) < 1e-6 for r in ratios)


def test_frame_incompatible_lattice(capsys):
    code, _, err = run(capsys, "frame", "--matrix", "a_st", "--lattice", "5,4")
    assert code == 4 and "(" in err and "lattice point" in err


def test_frame_coefficients(tmp_path, capsys):
    code, _, _ = run(capsys, "frame", "--coefficients", "hermite:1", "--out-dir", str(tmp_path))
    assert code == 0
    assert (tmp_path / "coefficients.csv").read_text().startswith("lambda_x,lambda_xi,re,im")
    assert (tmp_path / "frame_report.json").exists()


def test_modnorm_usage_error(capsys):
    with pytest.raises(SystemExit) as ei:
        cli.main(["modnorm", "--p", "0", "--q", "1"])
    assert ei.value.code == 1


def test_modnorm_report(capsys):
    code, text, _ = run(capsys, "modnorm", "--matrix", "a_tau:0.5", "--signal", "hermite:2",
                        "--p", "1", "--q", "inf", "--s", "1")
    rep = json.loads(text)
    assert code == 0 and rep["value"] > 0 and rep["spec"]["q"] == "inf"


def test_modnorm_corpus(capsys):
    code, text, _ = run(capsys, "modnorm", "--matrix", "a_tau:0.5", "--corpus", "4")
    assert code == 0 and json.loads(text)["spread"] < 10


def test_verify_suite_clean(capsys):
    code, text, err = run(capsys, "verify", "--suite", "symplin")
    rep = json.loads(text)
    assert code == 0 and rep["passed"] and "PASS" in err


def test_verify_detects_corrupted_preset(monkeypatch, capsys):
    monkeypatch.setattr(symplin, "a_st", lambda d=1: symplin.a_ft2(d))
    code, text, err = run(capsys, "verify", "--suite", "symplin")
    rep = json.loads(text)
    assert code != 0 and not rep["passed"] and rep["first_failure"]
    assert "FAIL" in err


def test_verify_unknown_suite(capsys):
    code, _, _ = run(capsys, "verify", "--suite", "nope")
    assert code == 1


def test_config_overrides_flags(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"lattice": [12, 16], "grid": {"n": 48}}))
    code, text, _ = run(capsys, "--config", str(cfg), "frame", "--lattice", "4,4")
    rep = json.loads(text)
    assert code == 0 and rep["lattice_steps"] == [12, 16]


def test_config_bad_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"nonsense": 1}))
    code, _, _ = run(capsys, "--config", str(cfg), "matrix", "--preset", "a_st")
    assert code == 1


def test_deterministic_output(tmp_path, capsys):
    outs = []
    for i in range(2):
        d = tmp_path / str(i)
        run(capsys, "wigner", "--matrix", "a_tau:0.5", "--signal", "hermite:2", "--window",
            "gaussian", "--path", "fast", "--out", str(tmp_path / f"w{i}.csv"))
        run(capsys, "frame", "--matrix", "a_tau:0.5", "--dual", "--out-dir", str(d))
        outs.append(((tmp_path / f"w{i}.csv").read_bytes(), (d / "dual.csv").read_bytes(),
                     (d / "frame_report.json").read_bytes().replace(str(d).encode(), b"")))
    assert outs[0] == outs[1]


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "metagabor.cli", "matrix", "--preset", "a_hbar"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["shift_invertible"]
