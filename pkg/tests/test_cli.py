import pytest
import json

import numpy as np

from dirfdr.cli import main, write_csv_atomic
from dirfdr.simulate import gen_ar_design, gen_response


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


SIM_CONFIG = {
    "design": {"kind": "ar", "n": 160, "p": 200, "rho": 0.0},
    "coefficients": {"k0": 5, "k1": 0, "strong_amp": 6.0},
    "sigma": 0.5,
    "trials": 2,
    "seed": 11,
    "methods": [
        {"name": "recycle", "kind": "knockoff-highdim",
         "config": {"q": 0.2, "n0": 60, "k_max": 30, "mode": "recycle"}},
    ],
}


def test_missing_config_is_exit_1(capsys, tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "nope.json")]) == 1
    assert "nope.json" in capsys.readouterr().err


def test_bad_config_value_is_exit_1(tmp_path):
    cfg = dict(SIM_CONFIG)
    cfg["methods"] = [{"name": "x", "kind": "knockoff-highdim",
                       "config": {"q": 2.0, "n0": 60, "k_max": 30}}]
    assert main(["simulate", "--config", _write(tmp_path / "c.json", cfg)]) == 1


def test_simulate_byte_identical_reruns(tmp_path):
    cfg_path = _write(tmp_path / "sim.json", SIM_CONFIG)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", cfg_path, "--out", str(out1), "--threads", "1"]) == 0
    assert main(["simulate", "--config", cfg_path, "--out", str(out2), "--threads", "3"]) == 0
    assert (out1 / "summary.csv").read_bytes() == (out2 / "summary.csv").read_bytes()
    assert (out1 / "trials.csv").read_bytes() == (out2 / "trials.csv").read_bytes()


def test_construct_writes_outputs(tmp_path):
    cfg = {"design": {"kind": "ar", "n": 60, "p": 8, "rho": 0.25}, "seed": 3}
    cfg_path = _write(tmp_path / "c.json", cfg)
    assert main(["construct", "--config", cfg_path, "--out", str(tmp_path / "o")]) == 0
    kn = np.loadtxt(tmp_path / "o" / "knockoffs.csv", delimiter=",", skiprows=1)
    assert kn.shape == (60, 8)


def test_run_selects_signals(tmp_path):
    X = gen_ar_design(200, 80, 0.0, seed=5)
    beta = np.zeros(80)
    beta[:4] = 6.0
    y = gen_response(X, beta, 0.5, seed=6)
    np.savetxt(tmp_path / "x.csv", X.values, delimiter=",")
    np.savetxt(tmp_path / "y.csv", y.values.reshape(-1, 1), delimiter=",")
    cfg = {"design_csv": str(tmp_path / "x.csv"), "response_csv": str(tmp_path / "y.csv"),
           "pipeline": {"q": 0.2, "n0": 60, "k_max": 20, "mode": "recycle"}, "seed": 7}
    cfg_path = _write(tmp_path / "r.json", cfg)
    assert main(["run", "--config", cfg_path, "--out", str(tmp_path / "o")]) == 0
    lines = (tmp_path / "o" / "selection.csv").read_text().strip().splitlines()
    assert lines[0] == "index,sign"
    selected = {int(l.split(",")[0]) for l in lines[1:]}
    assert selected <= set(range(80))


def test_verify_exits_zero():
    assert main(["verify", "--seed", "0"]) == 0


def test_write_csv_atomic_formatting(tmp_path):
    path = tmp_path / "x.csv"
    write_csv_atomic(str(path), ["a", "b"], [(1.0 / 3.0, 7)])
    assert path.read_text() == "a,b\n0.333333333333,7\n"
