import json

import numpy as np
import pytest

from tropica.cli import SWEEP_HEADER, main, sweep_points, write_sweep_csv
from tropica.model import allocate, derive
from tropica.spectral import Regime, extend_full, reduced_eigenvector

from conftest import EXAMPLE_A


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "junction.json"
    path.write_text(json.dumps({"n": 4, "m": 3, "a": list(EXAMPLE_A)}))
    return str(path)


def test_validate_ok(config_file, capsys):
    assert main(["validate", config_file]) == 0
    out = capsys.readouterr().out
    assert "config ok" in out
    assert "d = 0.25" in out
    assert "d1 = 0.291666666666667" in out
    assert "d2 = 0.541666666666667" in out


def test_validate_constraint_violation(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 4, "m": 3, "a": [0.3, 0.1, 0.2, 0.7, 0.1, 0.2, 0.7]}))
    assert main(["validate", str(path)]) == 1
    assert "a_n + a_{n+m}" in capsys.readouterr().err


def test_validate_malformed(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{nope")
    assert main(["validate", str(path)]) == 2


def test_validate_missing_file(tmp_path):
    assert main(["validate", str(tmp_path / "absent.json")]) == 2


def test_eigen_report(config_file, capsys):
    assert main(["eigen", config_file, "--full", "--verify"]) == 0
    out = capsys.readouterr().out
    assert "region = A" in out
    assert "lambda = 0.214285714285714" in out
    assert "free-flow" in out
    assert "full x" in out
    assert "residuals:" in out and "SZ=" in out


def test_eigen_multivalued(tmp_path, capsys):
    path = tmp_path / "b.json"
    path.write_text(json.dumps({"n": 2, "m": 7, "density": 0.27}))
    assert main(["eigen", str(path)]) == 0
    out = capsys.readouterr().out
    assert "region = B" in out
    assert out.count("lambda = ") == 3


def test_eigen_region_f(tmp_path, capsys):
    path = tmp_path / "f.json"
    path.write_text(json.dumps({"n": 4, "m": 3, "density": 1.0}))
    assert main(["eigen", str(path)]) == 0
    out = capsys.readouterr().out
    assert "region = F" in out
    assert "lambda = 0 (" in out


def test_simulate_eigen_init(config_file, tmp_path, capsys):
    out_csv = tmp_path / "traj.csv"
    code = main(["simulate", config_file, "--steps", "100", "--init", "eigen", "--out", str(out_csv)])
    assert code == 0
    assert "linearity deviation" in capsys.readouterr().out
    lines = out_csv.read_text().strip().splitlines()
    assert len(lines) == 102
    assert lines[0].startswith("k,x_1")


def test_simulate_zero_init_growth(tmp_path, capsys):
    cfg = tmp_path / "uniform.json"
    cfg.write_text(json.dumps({"n": 4, "m": 3, "density": 0.25}))
    out_csv = tmp_path / "traj.csv"
    code = main(
        ["simulate", str(cfg), "--steps", "2000", "--window", "500", "--out", str(out_csv)]
    )
    assert code == 0
    out = capsys.readouterr().out
    mean = float(out.split("mean=")[1].split()[0])
    assert abs(mean - 0.2142857142857143) <= 0.05


def test_simulate_zero_steps(config_file, tmp_path):
    out_csv = tmp_path / "traj.csv"
    assert main(["simulate", config_file, "--steps", "0", "--out", str(out_csv)]) == 0
    assert len(out_csv.read_text().strip().splitlines()) == 2  # header + initial state


def test_simulate_file_init_perturbed_eigenvector(config_file, tmp_path):
    params = derive(allocate(4, 3, 0.25))
    pair = extend_full(allocate(4, 3, 0.25), reduced_eigenvector(params, Regime.FREE_FLOW))
    vec = np.array(pair.x)
    vec[2] += 0.1
    init = tmp_path / "init.txt"
    init.write_text(" ".join(repr(float(v)) for v in vec))
    out_csv = tmp_path / "traj.csv"
    code = main(
        ["simulate", config_file, "--steps", "10", "--init", "file", "--init-file", str(init), "--out", str(out_csv)]
    )
    assert code == 0


def test_simulate_init_file_wrong_length(config_file, tmp_path):
    init = tmp_path / "short.txt"
    init.write_text("0 0 0")
    assert main(["simulate", config_file, "--init", "file", "--init-file", str(init)]) == 2


def test_sweep_example(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--n", "4", "--m", "3", "--points", "5", "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == SWEEP_HEADER
    rows = [line.split(",") for line in lines[1:]]
    assert [row[0] for row in rows] == ["0", "0.25", "0.5", "0.75", "1"]
    assert [row[1] for row in rows] == ["A", "A", "C", "F", "F"]
    lambdas = [float(row[4]) for row in rows]
    assert lambdas == pytest.approx([0.0, 1.5 / 7, 0.25, 0.0, 0.0], abs=1e-12)


def test_sweep_multiplicity_region_b(tmp_path):
    out = tmp_path / "sweep27.csv"
    assert main(["sweep", "--n", "2", "--m", "7", "--points", "101", "--out", str(out)]) == 0
    rows = [line.split(",") for line in out.read_text().strip().splitlines()[1:]]
    inside_b = [row for row in rows if 0.25 < float(row[0]) < 0.28125]
    assert inside_b and all(row[3] == "3" for row in inside_b)
    at_left_edge = [row for row in rows if float(row[0]) == 0.25]
    # at d = r the congestion and jam eigenvalues coincide, leaving two
    assert at_left_edge and at_left_edge[0][3] == "2" and at_left_edge[0][1] == "B"


def test_sweep_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["sweep", "--n", "3", "--m", "6", "--points", "40", "--out", str(a)])
    main(["sweep", "--n", "3", "--m", "6", "--points", "40", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_sweep_bad_points(tmp_path):
    assert main(["sweep", "--n", "4", "--m", "3", "--points", "1", "--out", str(tmp_path / "x.csv")]) == 2


def test_sweep_corollary_column_lipschitz():
    points = 201
    rows = sweep_points(4, 3, points)
    rho, r = rows[0].d1 * 0 + 1 / 6, 2 / 3  # n=4, m=3
    bound = max(1 / (1 + rho), abs(1 / (2 * r - 1 + rho))) * (1 / (points - 1)) + 1e-12
    for left, right in zip(rows, rows[1:]):
        assert left.lambda_corollary is not None
        assert abs(right.lambda_corollary - left.lambda_corollary) <= bound
        assert any(abs(left.lambda_corollary - lam) <= 1e-12 for lam in left.lambdas)


def test_sweep_csv_writer_pads_columns(tmp_path):
    rows = sweep_points(2, 7, 9)
    path = tmp_path / "pad.csv"
    write_sweep_csv(rows, path)
    for line in path.read_text().strip().splitlines()[1:]:
        assert len(line.split(",")) == 10


def test_verify_constructed_pair(config_file, tmp_path, capsys):
    config = allocate(4, 3, 0.25)
    from tropica.model import TrafficConfig

    config = TrafficConfig(4, 3, EXAMPLE_A)
    pair = extend_full(config, reduced_eigenvector(derive(config), Regime.FREE_FLOW))
    vec = tmp_path / "x.txt"
    vec.write_text("\n".join(repr(v) for v in pair.x))
    assert main(["verify", config_file, "--lambda", repr(pair.lam), "--x", str(vec), "--system", "EV"]) == 0
    assert main(["verify", config_file, "--lambda", repr(pair.lam), "--x", str(vec), "--system", "SS"]) == 0
    bad_lam = repr(pair.lam + 0.01)
    assert main(["verify", config_file, "--lambda", bad_lam, "--x", str(vec), "--system", "EV"]) == 1
    assert "residual(EV)" in capsys.readouterr().out


def test_verify_reduced_and_shifted(config_file, tmp_path):
    config_params = derive(allocate(4, 3, 0.25))
    from tropica.model import TrafficConfig
    from tropica.spectral import z_transform

    config = TrafficConfig(4, 3, EXAMPLE_A)
    params = derive(config)
    pair = reduced_eigenvector(params, Regime.FREE_FLOW)
    vec = tmp_path / "s.txt"
    vec.write_text(" ".join(repr(v) for v in pair.vector))
    assert main(["verify", config_file, "--lambda", repr(pair.lam), "--x", str(vec), "--system", "S"]) == 0
    z = z_transform(pair, config.m)
    zvec = tmp_path / "z.txt"
    zvec.write_text(" ".join(repr(v) for v in (z.z1, z.zn, z.zn1, z.znm)))
    assert main(["verify", config_file, "--lambda", repr(pair.lam), "--x", str(zvec), "--system", "SZ"]) == 0


def test_verify_dimension_mismatch(config_file, tmp_path):
    vec = tmp_path / "short.txt"
    vec.write_text("0 0 0")
    assert main(["verify", config_file, "--lambda", "0.1", "--x", str(vec), "--system", "EV"]) == 2


def test_tolerance_env_and_flag(config_file, tmp_path, monkeypatch):
    vec = tmp_path / "x.txt"
    config = allocate(4, 3, 0.25)
    pair = extend_full(config, reduced_eigenvector(derive(config), Regime.FREE_FLOW))
    perturbed = np.array(pair.x)
    perturbed[0] += 1e-6
    vec.write_text(" ".join(repr(float(v)) for v in perturbed))
    uniform_cfg = tmp_path / "uniform.json"
    uniform_cfg.write_text(json.dumps({"n": 4, "m": 3, "density": 0.25}))
    args = ["verify", str(uniform_cfg), "--lambda", repr(pair.lam), "--x", str(vec), "--system", "EV"]
    assert main(args) == 1  # default 1e-9 rejects the 1e-6 perturbation
    monkeypatch.setenv("TROPICA_TOL", "1e-3")
    assert main(args) == 0  # env loosens
    assert main(args + ["--tol", "1e-9"]) == 1  # flag wins over env


def test_usage_error_exit_code():
    assert main(["sweep", "--n", "4"]) == 2
    assert main(["nonsense"]) == 2
