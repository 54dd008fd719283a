import json
import subprocess
import sys

import numpy as np
import pytest

from strategem import data_path
from strategem.cli import StrategyFile, decode_complex, encode_complex, main

SHIPPED = ["identity.json", "bitflip.json", "commit_zero.json", "commit_plus.json",
           "random_r2_a.json", "random_r2_b.json", "random_r2_costrategy.json", "commit_costrategy.json"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def run_json(capsys, *argv):
    code, out = run(capsys, *argv, "--json")
    return code, json.loads(out.out)


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_files_validate_and_roundtrip(capsys, name):
    path = data_path(name)
    code, _ = run(capsys, "validate", path)
    assert code == 0
    with open(path) as fh:
        raw = json.load(fh)
    assert StrategyFile.from_json(raw).to_json() == raw


def test_complex_encoding(rng):
    a = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    assert np.array_equal(decode_complex(encode_complex(a), 2), a)


def test_validate_zero_choi_is_invalid(tmp_path, capsys):
    p = tmp_path / "zero.json"
    p.write_text(json.dumps({"kind": "choi_strategy", "shape": {"x_dims": [2], "y_dims": [2]},
                             "matrices": [encode_complex(np.zeros((4, 4)))]}))
    code, out = run(capsys, "validate", p)
    assert code == 1
    assert "Tr_Y1 P1 = I" in out.out and "FAIL" in out.out


def test_validate_bad_isometry_is_invalid(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"kind": "pure_strategy", "shape": {"x_dims": [2], "y_dims": [2]},
                             "memory_dims": [1], "matrices": [encode_complex(np.diag([1, 0.5]))]}))
    assert run(capsys, "validate", p)[0] == 1


def test_parse_errors(tmp_path, capsys):
    text = open(data_path("identity.json")).read()
    p = tmp_path / "trunc.json"
    p.write_text(text[: len(text) // 2])
    assert run(capsys, "validate", p)[0] == 2
    p.write_text(json.dumps({"kind": "mystery"}))
    assert run(capsys, "validate", p)[0] == 2
    p.write_text(json.dumps({"kind": "choi_strategy", "shape": {"x_dims": [2], "y_dims": [2]},
                             "matrices": [[[1, 2, 3]]]}))
    assert run(capsys, "validate", p)[0] == 2
    assert run(capsys, "validate", tmp_path / "missing.json")[0] == 2


def test_fidelity_command(capsys):
    code, out = run(capsys, "fidelity", data_path("commit_zero.json"), data_path("commit_plus.json"))
    assert code == 0 and "F      = 0.707107" in out.out
    code, out = run(capsys, "fidelity", data_path("identity.json"), data_path("identity.json"))
    assert "F      = 1.000000" in out.out
    code, d = run_json(capsys, "fidelity", data_path("identity.json"), data_path("bitflip.json"))
    assert code == 0 and abs(d["fidelity"]) < 1e-5
    assert set(d) >= {"fidelity", "fidelity_squared", "k_norm", "duality_gap"}


def test_fidelity_oracle_on_random_pair(capsys):
    code, d = run_json(capsys, "fidelity", data_path("random_r2_a.json"), data_path("random_r2_b.json"),
                       "--oracle", "--seed", "3")
    assert code == 0 and d["oracle_agrees"]
    assert d["oracle_lower"] - 1e-6 <= d["fidelity"] <= d["oracle_upper"] + 1e-6


def test_incompatible_files(capsys):
    code, _ = run(capsys, "fidelity", data_path("identity.json"), data_path("random_r2_a.json"))
    assert code == 1
    code, _ = run(capsys, "fidelity", data_path("identity.json"), data_path("commit_costrategy.json"))
    assert code == 1


def test_norm_command(capsys):
    code, out = run(capsys, "norm", data_path("identity.json"), data_path("identity.json"))
    assert code == 0 and "||S - T|| = 0.000000" in out.out
    code, d = run_json(capsys, "norm", data_path("identity.json"), data_path("bitflip.json"))
    assert abs(d["norm"] - 2) < 1e-5


def test_cheat_bounds_command(capsys):
    code, out = run(capsys, "cheat-bounds", data_path("commit_zero.json"), data_path("commit_plus.json"))
    assert code == 0 and "2.414214" in out.out
    code, d = run_json(capsys, "cheat-bounds", data_path("commit_zero.json"), data_path("commit_plus.json"),
                       "--task", "ot")
    assert d["task"] == "ot" and abs(d["alice_lower_bound"] - 0.5) < 1e-5


def test_simulate_command(capsys):
    code, d = run_json(capsys, "simulate", data_path("random_r2_a.json"), data_path("random_r2_costrategy.json"))
    assert code == 0
    rho = decode_complex(d["state"], 2)
    assert abs(np.trace(rho) - 1) < 1e-10 and abs(d["choi_pairing"] - 1) < 1e-9
    assert run(capsys, "simulate", data_path("random_r2_a.json"), data_path("random_r2_b.json"))[0] == 1


def test_check_command_deterministic(capsys):
    code1, d1 = run_json(capsys, "check", "--suite", "fvdg", "--trials", "3", "--seed", "7")
    code2, d2 = run_json(capsys, "check", "--suite", "fvdg", "--trials", "3", "--seed", "7")
    assert code1 == 0 and d1 == d2 and d1["ok"]


def test_check_all_suites(capsys):
    code, out = run(capsys, "check", "--suite", "all", "--trials", "2", "--seed", "1")
    assert code == 0
    assert out.out.count("PASS") == 3


def test_console_script_and_usage_error():
    exe = [sys.executable, "-m", "strategem.cli"]
    r = subprocess.run(exe + ["validate", data_path("identity.json")], capture_output=True, text=True)
    assert r.returncode == 0
    r = subprocess.run(exe + ["frobnicate"], capture_output=True, text=True)
    assert r.returncode == 2


def test_solver_env_var(capsys, monkeypatch):
    monkeypatch.setenv("STRATEGEM_SOLVER", "cvxopt")
    code, d = run_json(capsys, "fidelity", data_path("commit_zero.json"), data_path("commit_plus.json"))
    assert d["backend"] == "cvxopt" and abs(d["fidelity"] - 1 / np.sqrt(2)) < 1e-5
