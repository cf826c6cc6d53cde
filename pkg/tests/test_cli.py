import csv
import io
import json

import numpy as np
import pytest

from magcolloid import cli
from magcolloid.potential import LJParams, characteristic_distances


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_spear_csv(capsys):
    code, out, _ = run(capsys, "spear", "--N", "16", "--beta", "3", "--alpha", "36")
    assert code == 0
    r = rows(out)
    assert len(r) == 15 and list(r[0]) == ["k", "h_k", "h_bar", "h_check", "h_hat", "residual_k"]
    ds = characteristic_distances(LJParams(alpha=36.0))
    h = np.array([float(x["h_k"]) for x in r])
    assert np.all((h >= ds.h_check) & (h <= ds.h_hat))
    assert float(r[0]["h_hat"]) == ds.h_hat  # exact round trip


def test_spear_two(capsys):
    code, out, _ = run(capsys, "spear", "--N", "2")
    r = rows(out)
    assert code == 0 and len(r) == 1
    assert float(r[0]["h_k"]) == pytest.approx(float(r[0]["h_hat"]), abs=1e-10)


def test_spear_bad_params(capsys):
    code, _, err = run(capsys, "spear", "--alpha", "2", "--beta", "3")
    assert code == 1 and "alpha" in err


def test_spear_convergence_failure(capsys):
    code, _, err = run(capsys, "spear", "--N", "64", "--alpha", "36", "--max-iter", "1")
    assert code == 2 and "max_iter" in err


def test_spear_sweep_json(capsys):
    code, out, _ = run(capsys, "spear", "--Ns", "8,16", "--alpha", "36", "--format", "json")
    d = json.loads(out)
    assert code == 0 and [r["N"] for r in d["rows"]] == [8, 16]


def test_ring(capsys):
    code, out, _ = run(capsys, "ring", "--N", "4", "--alpha", "12", "--beta", "3")
    r = rows(out)
    assert code == 0 and list(r[0]) == ["N", "A_tilde", "B_tilde", "r_star", "nn_distance", "nn_error", "h_bar"]
    assert float(r[0]["r_star"]) == pytest.approx(0.8108, abs=1e-4)


def test_thresholds(capsys):
    code, out, _ = run(capsys, "thresholds", "--beta", "3")
    d = json.loads(out)
    assert code == 0 and d["alpha_dag"] == pytest.approx(4.9, abs=0.1)
    assert set(d["distances"]) == {"h_check", "h_bar", "h_hat", "h_tilde", "h_dag", "h_ddag", "h_sharp", "h_flat"}


def test_gershgorin(capsys):
    code, out, _ = run(capsys, "gershgorin", "--count", "5", "--size", "40")
    d = json.loads(out)
    assert code == 0 and d["hypotheses"] and d["max_ratio"] <= 1 and d["counterexample"] is None
    code, out, _ = run(capsys, "gershgorin", "--count", "2", "--c", "0.1")
    d = json.loads(out)
    assert not d["hypotheses"] and d["max_ratio"] is None


def test_dynamics_ring_fixed(capsys, tmp_path):
    snap = tmp_path / "snap.csv"
    code, out, _ = run(capsys, "dynamics", "--init", "ring", "--N", "12", "--perturb", "0",
                       "--horizon", "50", "--tol", "1e-300", "--snapshots", str(snap))
    d = json.loads(out)
    assert code == 0 and d["verdict"] == "ring" and d["drift"] < 1e-8
    text = snap.read_text()
    assert text.splitlines()[0] == "t,k,x1,x2,x3,m1,m2,m3,v1,v2,v3,w1,w2,w3"
    assert len(text.splitlines()) == 1 + 2 * 12


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# spear run\nalpha = 36\nN = 8\nformat = json\n")
    code, out, _ = run(capsys, "spear", "--config", str(cfg), "--N", "6")
    d = json.loads(out)
    assert code == 0 and d["N"] == 6 and d["model"]["alpha"] == 36.0
    cfg.write_text("bogus = 1\n")
    code, _, err = run(capsys, "spear", "--config", str(cfg))
    assert code == 1 and "bogus" in err
    cfg.write_text("alpha = twelve\n")
    code, _, err = run(capsys, "spear", "--config", str(cfg))
    assert code == 1 and "alpha" in err


def test_io_error(capsys, tmp_path):
    code, _, _ = run(capsys, "ring", "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == 3


def test_deterministic_output(tmp_path):
    paths = []
    for i in range(2):
        p = tmp_path / f"out{i}.json"
        assert cli.main(["dynamics", "--N", "5", "--seed", "7", "--horizon", "20", "--out", str(p)]) == 0
        paths.append(p.read_bytes())
    assert paths[0] == paths[1]


def test_round_trip_17_digits():
    for x in (0.1, 1 / 3, 2.0**-1074, 1.7976931348623157e308, -0.12475586):
        assert float(cli.fmt(x)) == x
