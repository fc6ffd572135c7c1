import json

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy import special

from stationary_spde.cli import EXIT_INVALID, EXIT_NO_SOLUTION, EXIT_OK, main
from stationary_spde.spdg import read_csv, read_spdg


def _doc(tmp_path, name, d, params, fname="model.json"):
    path = tmp_path / fname
    path.write_text(json.dumps({"name": name, "d": d, "params": params}))
    return str(path)


@pytest.fixture
def matern(tmp_path):
    return _doc(tmp_path, "matern", 2, {"kappa": 1.0, "alpha": 2.0})


def test_check_heat_in_two_dimensions_exits_three(tmp_path, capsys):
    code = main(["check", "--model", _doc(tmp_path, "heat", 2, {"a": 1.0})])
    assert code == EXIT_NO_SOLUTION
    assert json.loads(capsys.readouterr().out)["exists"] is False


def test_check_matern_exits_zero(matern, capsys):
    assert main(["check", "--model", matern]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["exists"] is True and rep["finite"] is True


def test_describe_evolving_matern(tmp_path, capsys):
    doc = _doc(tmp_path, "evolving_matern", 2, {"beta": 1.0, "a": 1.0, "kappa": 1.0, "alpha": 2.0})
    assert main(["describe", "--model", doc]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert (rep["separable"], rep["symmetric"]) == (False, True)
    assert rep["symbol"]["isotropic"] is True


def test_covariance_grid_csv(matern, tmp_path):
    out = tmp_path / "cov.csv"
    assert main(["covariance", "--model", matern, "--grid", "5,0.5,5,0.5", "--out", str(out)]) == EXIT_OK
    axes, values, valid, names = read_csv(out.read_text())
    assert names == ["h1", "h2"] and valid.all()
    # smallest nonzero lag: (0, 0.5)
    assert_allclose(values[2, 3], special.kv(1, 0.5) * 0.5 / (4 * np.pi), rtol=1e-12)


def test_covariance_lags_mask_distributional_origin(tmp_path, capsys):
    doc = _doc(tmp_path, "matern_no_range", 3, {"alpha": 1.0})
    assert main(["covariance", "--model", doc, "--lags", "0,0,0;2,0,0"]) == EXIT_OK
    _, values, valid, _ = read_csv(capsys.readouterr().out)
    assert valid.ravel().tolist() == [False, True]
    assert_allclose(values[-1, -1, -1], 1 / (8 * np.pi), rtol=1e-14)


def test_covariance_spdg_needs_out(matern):
    assert main(["covariance", "--model", matern, "--grid", "3,1,3,1", "--format", "spdg"]) == EXIT_INVALID


def test_simulate_is_byte_identical_across_runs_and_workers(matern, tmp_path):
    paths = []
    for i, workers in enumerate(("1", "1", "3")):
        out = tmp_path / f"run{i}.spdg"
        argv = ["simulate", "--model", matern, "--grid", "16,0.25,16,0.25", "--seed", "9",
                "--realizations", "3", "--workers", workers, "--out", str(out)]
        assert main(argv) == EXIT_OK
        paths.append([tmp_path / f"run{i}.{k:04d}.spdg" for k in range(3)])
    for k in range(3):
        first = paths[0][k].read_bytes()
        assert first == paths[1][k].read_bytes() == paths[2][k].read_bytes()
    assert paths[0][0].read_bytes() != paths[0][1].read_bytes()


def test_simulate_refuses_nonexistent(tmp_path):
    doc = _doc(tmp_path, "wave", 1, {"c": 1.0})
    assert main(["simulate", "--model", doc, "--grid", "8,1,8,1", "--out", str(tmp_path / "x.spdg")]) == EXIT_NO_SOLUTION


def test_empirical_and_compare_pipeline(matern, tmp_path, capsys):
    out = tmp_path / "r.spdg"
    assert main(["simulate", "--model", matern, "--grid", "32,0.25,32,0.25", "--realizations", "20",
                 "--out", str(out)]) == EXIT_OK
    files = sorted(str(p) for p in tmp_path.glob("r.*.spdg"))
    assert len(files) == 20 and read_spdg(files[0]).sizes == (32, 32)
    emp = tmp_path / "emp.csv"
    report = tmp_path / "emp.json"
    assert main(["empirical", *files, "--max-lag", "3,3", "--out", str(emp), "--report", str(report)]) == EXIT_OK
    metrics = json.loads(report.read_text())
    assert metrics["n_realizations"] == 20 and metrics["lag0_stderr"] > 0

    ref = tmp_path / "ref.csv"
    assert main(["covariance", "--model", matern, "--grid", "7,0.25,7,0.25", "--out", str(ref)]) == EXIT_OK
    capsys.readouterr()
    assert main(["compare", str(emp), str(ref)]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["n_compared"] == 49 and rep["max_abs"] < 0.05

    assert main(["compare", str(ref), str(ref), "--out", str(tmp_path / "diff.csv")]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["max_abs"] == 0.0
    _, diff, _, _ = read_csv((tmp_path / "diff.csv").read_text())
    assert_array_equal(diff, 0.0)


def test_empirical_rejects_large_lag(matern, tmp_path):
    out = tmp_path / "r.spdg"
    main(["simulate", "--model", matern, "--grid", "8,1,8,1", "--realizations", "2", "--out", str(out)])
    files = sorted(str(p) for p in tmp_path.glob("r.*.spdg"))
    assert main(["empirical", *files, "--max-lag", "4,1"]) == EXIT_INVALID


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["check"],
    ["check", "--model", "/nonexistent/model.json"],
    ["covariance", "--model", "MODEL", "--grid", "3,x"],
    ["covariance", "--model", "MODEL", "--lags", "1,2,3"],
    ["simulate", "--model", "MODEL", "--grid", "8,1,8,1"],
    ["simulate", "--model", "MODEL", "--grid", "8,1,8,1", "--out", "x", "--realizations", "0"],
    ["check", "--model", "MODEL", "--seed", "-1"],
])
def test_invalid_input_exits_two_with_one_line(argv, matern, capsys):
    argv = [matern if a == "MODEL" else a for a in argv]
    assert main(argv) == EXIT_INVALID
    err = capsys.readouterr().err
    assert err.count("\n") == 1 and err.startswith("error: ")


def test_invalid_documents(tmp_path, capsys):
    bad_json = tmp_path / "bad.json"
    bad_json.write_text("{not json")
    assert main(["check", "--model", str(bad_json)]) == EXIT_INVALID
    assert main(["check", "--model", _doc(tmp_path, "nope", 2, {}, "n.json")]) == EXIT_INVALID
    assert main(["check", "--model", _doc(tmp_path, "matern", 2, {"kappa": -1.0, "alpha": 2.0}, "k.json")]) == EXIT_INVALID
    errs = capsys.readouterr().err.splitlines()
    assert [e.split(":")[1].strip() for e in errs] == ["parse", "not_found", "ModelError"]
