import json

import numpy as np
import pandas as pd
import pytest
from rich.console import Console

from l0forge.__main__ import main
from l0forge.utils.cli import run


def exit_code(argv):
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    return excinfo.value.code


@pytest.fixture
def separable_files(tmp_path):
    np.savetxt(tmp_path / "A.csv", np.eye(3), delimiter=",")
    np.savetxt(tmp_path / "b.csv", [3.0, 0.1, -2.0], delimiter=",")
    return tmp_path / "A.csv", tmp_path / "b.csv"


def test_solve_from_files(user_dirs, separable_files, capsys):
    A, b = separable_files
    argv = ["--no-history", "solve", "--method", "piht", "--matrix", str(A), "--rhs", str(b), "--lambda", "1"]
    assert run(argv) == 0

    payload = json.loads(capsys.readouterr().out)
    np.testing.assert_allclose(payload["x"], [3.0, 0.0, -2.0])
    assert payload["support"] == [0, 2]
    assert payload["stop_reason"] == "converged"
    assert payload["certificate"]["passed"]
    assert "rel_err" not in payload


def test_solve_generated_instance(user_dirs, capsys):
    argv = ["--no-history", "solve", "--method", "vmepiht", "--gen", "gaussian"]
    argv += ["--n", "64", "--m", "32", "--sparsity", "2", "--noise-variance", "1e-4", "--lambda", "0.01"]
    assert run(argv) == 0

    payload = json.loads(capsys.readouterr().out)
    assert payload["method"] == "vmepiht"
    assert payload["lambda"] == 0.01
    assert payload["rel_err"] >= 0
    assert isinstance(payload["support_match"], bool)


def test_vmepiht_reports_converged(user_dirs, separable_files, capsys):
    A, b = separable_files
    argv = ["--no-history", "solve", "--method", "vmepiht", "--matrix", str(A), "--rhs", str(b), "--lambda", "1"]
    assert run(argv) == 0

    payload = json.loads(capsys.readouterr().out)
    assert payload["stop_reason"] == "converged"
    assert payload["certificate"]["passed"]


def test_solve_max_iters_exit_code(user_dirs, capsys):
    argv = ["--no-history", "solve", "--method", "npiht", "--gen", "bernoulli", "--n", "64", "--m", "32"]
    argv += ["--sparsity", "2", "--lambda", "0.01", "--tol", "1e-15", "--max-iters", "2"]
    assert run(argv) == 2
    assert json.loads(capsys.readouterr().out)["stop_reason"] == "max_iters"


def test_solve_errors_exit_one(user_dirs, separable_files, capsys):
    A, b = separable_files
    assert exit_code(["--no-history", "solve", "--method", "ista", "--matrix", str(A), "--rhs", str(b)]) == 1
    assert "unknown method" in capsys.readouterr().err

    # instances read from files have no ground truth to select lambda with
    assert exit_code(["--no-history", "solve", "--method", "piht", "--matrix", str(A), "--rhs", str(b)]) == 1
    assert exit_code(["--no-history", "solve", "--method", "piht"]) == 1
    assert exit_code(["--no-history", "solve"]) == 1
    assert capsys.readouterr().out == ""


def test_flat_config_file(user_dirs, separable_files, capsys):
    A, b = separable_files
    conf = user_dirs / "run.conf"
    conf.write_text(f"method = vmepiht\nmatrix = {A}\nrhs = {b}\nlambda = 1\nno-history = yes\n")

    assert run(["--config", str(conf), "solve"]) == 0
    assert json.loads(capsys.readouterr().out)["method"] == "vmepiht"

    # flags on the command line win over the file
    assert run(["--config", str(conf), "solve", "--method", "piht"]) == 0
    assert json.loads(capsys.readouterr().out)["method"] == "piht"

    conf.write_text("methd = piht\n")
    assert exit_code(["--config", str(conf), "solve"]) == 1


def test_path_command(user_dirs, capsys):
    assert run(["--no-history", "path", "--gen", "gaussian", "--n", "64", "--m", "32", "--count", "5"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["lambdas"]) == 5
    assert payload["lambdas"][0] == pytest.approx(payload["anchor"])


def test_oracle_verify(user_dirs, capsys):
    argv = ["--no-history", "oracle-verify", "--n", "8", "--seeds", "2", "--method", "vmepiht"]
    argv += ["--lambda-ratio", "0.05"]
    assert run(argv) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["passed"]
    assert [v["seed"] for v in payload["verdicts"]] == [0, 1]


def test_oracle_verify_limits(user_dirs, capsys):
    assert exit_code(["--no-history", "oracle-verify", "--n", "20", "--method", "vmepiht"]) == 1
    assert "oracle" in capsys.readouterr().err

    assert run(["--no-history", "oracle-verify", "--n", "6", "--seeds", "0", "--method", "piht"]) == 0
    captured = capsys.readouterr()
    assert json.loads(captured.out) == {"passed": True, "verdicts": []}
    assert "nothing to verify" in captured.err


def test_bench_writes_reports(user_dirs, capsys):
    outputs = []
    for name in ("first", "second"):
        out = user_dirs / name
        argv = ["--no-history", "bench", "--preset", "tiny", "--methods", "piht,vmepiht", "--seeds", "1"]
        assert run(argv + ["--out", str(out), "--patience", "5"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert str(out / "report.csv") in payload["files"]
        assert len(payload["summary"]) == 2
        outputs.append(pd.read_csv(out / "report.csv").drop(columns="time_s"))

    pd.testing.assert_frame_equal(outputs[0], outputs[1])
    assert list(outputs[0]["method"]) == ["piht", "vmepiht"]


def test_bench_rejects_empty_method_list(user_dirs, capsys):
    assert exit_code(["--no-history", "bench", "--preset", "tiny", "--methods", "", "--out", str(user_dirs)]) == 1
    assert exit_code(["--no-history", "bench", "--preset", "huge", "--out", str(user_dirs)]) == 1


def test_history_is_recorded(user_dirs, separable_files, capsys):
    A, b = separable_files
    assert run(["solve", "--method", "piht", "--matrix", str(A), "--rhs", str(b), "--lambda", "1"]) == 0
    capsys.readouterr()

    assert run(["history", "--limit", "5"], Console(stderr=True, width=200)) == 0
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "piht" in captured.err
    assert (user_dirs / "cache" / "l0forge" / "l0forge.db").exists()
