import json
import subprocess
import sys

import mpmath as mp
import pytest

from hurwitzlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def test_eval_trunc_hand_sum(capsys):
    code, doc, _ = run(capsys, "eval", "--n", "2", "--method", "trunc", "--N", "1",
                       "--alpha", "t:1", "t:1", "--s", "2,0", "2,0")
    assert code == 0
    assert doc["value"] == {"re": 0.25, "im": 0.0}
    assert doc["schema_version"] and doc["seed"] == 0 and "config_echo" in doc


def test_eval_afe_matches_continuation(capsys):
    code, doc, _ = run(capsys, "eval", "--n", "1", "--method", "afe", "--s", "1.5,50", "--alpha", "t:1")
    ref = complex(mp.zeta(mp.mpc(1.5, 50)))
    assert code == 0
    assert abs(complex(doc["value"]["re"], doc["value"]["im"]) - ref) < 1e-8


def test_eval_diag(capsys):
    code, doc, _ = run(capsys, "eval", "--n", "2", "--method", "diag", "--alpha", "t:1", "--s", "2,0", "2,0")
    assert code == 0 and abs(doc["value"]["re"] - float(mp.pi**4 / 120)) < 1e-13


def test_exit_codes(capsys):
    with pytest.raises(SystemExit) as e:
        main(["eval", "--n", "1", "--s", "1.5;50", "--alpha", "t:1"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["eval", "--n", "1", "--s", "1.5,50", "--alpha", "x:1"])
    assert e.value.code == 2
    # gcd(q, d) != 1
    code, _, err = run(capsys, "twist", "--alpha", "r:1/3", "--q", "3", "--N0", "100")
    assert code == 3 and "CompatibilityError" in err
    code, _, err = run(capsys, "eval", "--n", "2", "--s", "0.7,5", "0.7,-5", "--alpha", "t:1")
    assert code == 3 and "SignError" in err


def test_decomp_first_table(capsys, tmp_path):
    code, doc, _ = run(capsys, "decomp", "--poly", "s2+s1+s1^2*s2^2", "--C", "10", "--output-dir", str(tmp_path))
    assert code == 0
    tab = doc["tableau"]
    B = tab["B"]
    assert tab["M"] == 11 and B == 64
    owners = [s["j_m"] for s in tab["slots"]]
    assert owners == [2, 1] * 5 + [2]
    assert [s["coefficient"][0] for s in tab["slots"][1::2]] == [B, -B, B, -B, B]
    assert doc["verification"]["box_conditions"] is True
    saved = json.loads((tmp_path / "tableau.json").read_text())
    assert saved == tab


def test_scan_infinite_eps_and_determinism(capsys, tmp_path):
    args = ["scan", "--alpha", "t:1", "--t-range", "0", "20", "--step", "0.5", "--eps", "inf"]
    code, doc, _ = run(capsys, *args, "--output-dir", str(tmp_path / "a"))
    assert code == 0 and doc["density"] == 1.0 and doc["count"] == 41
    run(capsys, *args, "--output-dir", str(tmp_path / "b"))
    a = (tmp_path / "a" / "scan.csv").read_bytes()
    assert a == (tmp_path / "b" / "scan.csv").read_bytes()
    assert a.startswith(b"t_1,sup_distance,pass\n")
    summary = json.loads((tmp_path / "a" / "scan.json").read_text())
    assert summary["seed"] == 0 and "timing" in summary


def test_config_from_environment(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 17, "grid": 3}))
    monkeypatch.setenv("HURWITZLAB_CONFIG", str(cfg))
    code, doc, _ = run(capsys, "scan", "--alpha", "t:1", "--t-range", "0", "2", "--step", "1",
                       "--output-dir", str(tmp_path))
    assert code == 0 and doc["seed"] == 17 and doc["config_echo"]["grid"] == 3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": 1}))
    code, _, err = run(capsys, "decomp", "--poly", "s1+s2", "--config", str(bad), "--output-dir", str(tmp_path))
    assert code == 3 and "colour" in err


def test_meansquare_and_zeros(capsys, tmp_path):
    code, doc, _ = run(capsys, "meansquare", "--n", "1", "--T", "500", "--alpha", "t:1", "--output-dir", str(tmp_path))
    assert code == 0 and 0.6 < doc["ratio"] < 1.05
    code, doc, _ = run(capsys, "zeros", "--alpha", "t:1", "--sigma", "1.5", "1.8", "--t", "0", "50",
                       "--output-dir", str(tmp_path))
    assert code == 0 and doc["count"] == 0
    assert (tmp_path / "zeros.csv").read_text().startswith("re_1,im_1,residual")


def test_twist_report(capsys, tmp_path):
    code, doc, _ = run(capsys, "twist", "--alpha", "r:1/3", "--q", "4", "--N0", "100", "--free", "2:0,1",
                       "--growth", "10000", "--output-dir", str(tmp_path))
    assert code == 0
    assert doc["max_unimodular_deviation"] < 1e-12
    assert doc["twist"]["free_values"]["2"] == [0.0, 1.0]
    assert doc["growth"]["beta"] < 0.5


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "hurwitzlab", "eval", "--n", "1", "--method", "trunc",
                          "--N", "0", "--alpha", "t:1", "--s", "2,0"], capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["value"]["re"] == 1.0
