import math
import os

import numpy as np
import pytest

from modbh.cli import BoundaryFileError, main, read_boundary_file
from modbh.experiments import SweepConfig, cond_sweep, error_sweep, sample_geometry, sweep_points
from modbh.smallmatrix import cond2_normalized
from modbh.stable_basis import RadialBasis, mode_matrix

DATA = os.path.join(os.path.dirname(__file__), "data")


def run(argv, tmp_path, name="out.csv"):
    out = tmp_path / name
    assert main(argv + ["--out", str(out)]) == 0
    return out.read_text()


def read_csv(text):
    lines = text.strip().split("\n")
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


def small(**kw):
    base = dict(sweep_axis="lambda", j_min=-2, j_max=0, draws_per_octave=2, n_modes=12,
                n_sources=20, n_targets=20, seed=7)
    base.update(kw)
    return SweepConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(j_min=1, j_max=0)
    with pytest.raises(ValueError):
        SweepConfig(draws_per_octave=0)
    with pytest.raises(ValueError):
        SweepConfig(sweep_axis="mu")
    assert SweepConfig(side="exterior").bases == ["ext-naive", "ext-stable"]


def test_sweep_points_in_octaves():
    cfg = small()
    pts = sweep_points(cfg)
    assert len(pts) == 6
    for j, k, lam, rad in pts:
        assert 2.0 ** j <= lam < 2.0 ** (j + 1) and rad == 0.5


def test_geometry_independent_of_bases():
    a = sample_geometry(small(bases=["int-naive"]), -1, 1, 0.5)
    b = sample_geometry(small(bases=["int-stable", "int-naive"]), -1, 1, 0.5)
    assert np.array_equal(a[0].loc, b[0].loc) and np.array_equal(a[1], b[1])


def test_sample_geometry_regions():
    src, tgt = sample_geometry(small(), 0, 0, 0.5)
    assert np.all(np.hypot(*src.loc.T) > 1.0) and np.all(np.abs(src.loc) <= 1.0)
    assert np.all(np.hypot(*tgt.T) < 0.5)
    src, tgt = sample_geometry(small(side="exterior"), 0, 0, 0.5)
    assert np.all(np.hypot(*src.loc.T) < 0.25) and np.all(np.hypot(*tgt.T) > 0.5)
    assert np.all(src.c >= -1) and np.all(src.c <= 1) and np.all(src.d >= 0) and np.all(src.q >= 0)
    for v in (src.v1, src.v2, src.v3):
        assert np.allclose(np.hypot(*v.T), 1.0, rtol=0, atol=1e-14)


def test_cond_sweep_internal_consistency():
    cfg = small(j_min=0, j_max=0, draws_per_octave=1, bases=["int-naive"])
    rows = cond_sweep(cfg)
    assert len(rows) == 4
    for axis, n, lam, rad, lr, b, kappa in rows:
        assert kappa == cond2_normalized(mode_matrix(RadialBasis.INT_NAIVE, n, lam, rad).scaled)
        assert lr == lam * rad
    # the named point itself
    k = cond2_normalized(mode_matrix(RadialBasis.INT_NAIVE, 1, 0.5, 0.5).scaled)
    assert math.isfinite(k) and k >= 1


def test_error_sweep_benign_values():
    cfg = small(j_min=0, j_max=0, n_modes=49, bases=["int-naive", "int-stable", "exact-difference"])
    for row in error_sweep(cfg):
        assert row[5] <= 1e-11, row


def test_error_sweep_job_count_does_not_change_output():
    cfg = small(bases=["int-stable", "exact-difference"])
    assert error_sweep(cfg, jobs=1) == error_sweep(cfg, jobs=2)


def test_cond_sweep_csv_deterministic(tmp_path):
    argv = ["cond-sweep", "--seed", "3", "--axis", "lambda", "--jmin", "-3", "--jmax", "0",
            "--draws", "2"]
    a = run(argv, tmp_path, "a.csv")
    b = run(argv, tmp_path, "b.csv")
    assert a == b
    head, rows = read_csv(a)
    assert head == ["sweep_axis", "n", "lambda", "radius", "lambda_times_radius", "basis",
                    "cond_normalized"]
    assert len(rows) == 4 * 2 * 4 * 2
    assert "e" in rows[0][2] and len(rows[0][2].split("e")[0].replace("-", "").replace(".", "")) == 17


def test_error_sweep_csv_deterministic(tmp_path):
    argv = ["error-sweep", "--seed", "5", "--jmin", "-1", "--jmax", "0", "--draws", "1",
            "--modes", "10"]
    a = run(argv, tmp_path, "a.csv")
    b = run(argv + ["--jobs", "2"], tmp_path, "b.csv")
    assert a == b
    head, rows = read_csv(a)
    assert head[-3:] == ["e_u", "e_g", "e_h"]
    assert {r[4] for r in rows} == {"int-naive", "int-stable", "exact-difference"}


def test_different_seeds_differ(tmp_path):
    argv = ["cond-sweep", "--jmin", "0", "--jmax", "0", "--draws", "1"]
    assert run(argv + ["--seed", "1"], tmp_path, "a") != run(argv + ["--seed", "2"], tmp_path, "b")


def test_translation_check_csv(tmp_path):
    head, rows = read_csv(run(["translation-check", "--p", "6,12"], tmp_path))
    assert head == ["operator_name", "p", "separation_ratio", "max_rel_err_value",
                    "max_rel_err_gradient"]
    assert len(rows) == 18
    for r in rows:
        if r[0] == "laplace_l2l":
            assert float(r[3]) <= 1e-13
    with pytest.raises(SystemExit):
        main(["translation-check", "--p", "3"])


def test_solve_regression_fixture(tmp_path):
    text = run(["solve", os.path.join(DATA, "interior_solve.txt")], tmp_path)
    with open(os.path.join(DATA, "interior_solve_expected.csv")) as f:
        head_e, exp = read_csv(f.read())
    head, got = read_csv(text)
    assert head == head_e
    got = np.array(got, dtype=float)
    exp = np.array(exp, dtype=float)
    assert np.array_equal(got[:, 0], exp[:, 0])
    for k in (1, 3):
        a = got[:, k] + 1j * got[:, k + 1]
        b = exp[:, k] + 1j * exp[:, k + 1]
        assert np.all(np.abs(a - b) <= 1e-12 * np.abs(b) + 1e-300)


def test_solve_reproduces_boundary_data(tmp_path):
    prob = read_boundary_file(os.path.join(DATA, "interior_solve.txt"))
    m = 2 * prob.n_modes + 2
    th = -np.pi + 2 * np.pi * np.arange(m) / m
    tg = tmp_path / "t.txt"
    np.savetxt(tg, prob.radius * np.stack([np.cos(th), np.sin(th)], -1))
    ev = tmp_path / "ev.csv"
    run(["solve", os.path.join(DATA, "interior_solve.txt"), "--targets", str(tg),
         "--eval-out", str(ev)], tmp_path)
    head, rows = read_csv(ev.read_text())
    assert head == ["x", "y", "u", "u_x", "u_y", "u_xx", "u_xy", "u_yy"]
    u = np.array(rows, dtype=float)[:, 2]
    assert np.max(np.abs(u - prob.boundary_u)) <= 1e-12 * np.max(np.abs(prob.boundary_u))


def test_solve_constant_data(tmp_path):
    n = 4
    src = tmp_path / "c.txt"
    src.write_text("interior 0.5 0.5 %d\n" % n + "2.0 0.0\n" * (2 * n + 2))
    head, rows = read_csv(run(["solve", str(src)], tmp_path))
    rows = np.array(rows, dtype=float)
    zero = rows[rows[:, 0] == 0][0]
    assert zero[1] == pytest.approx(2.0, rel=1e-13)


def test_solve_side_mismatch(tmp_path):
    with pytest.raises(SystemExit, match="does not match"):
        main(["solve", os.path.join(DATA, "interior_solve.txt"), "--side", "exterior"])
    with pytest.raises(SystemExit):
        main(["solve", os.path.join(DATA, "interior_solve.txt"), "--bases", "ext-stable"])


@pytest.mark.parametrize("body, msg", [
    ("interior 0.5 0.5 2\n" + "1 0\n" * 5, "M = 2N\\+2 = 6"),
    ("interior 0.5 0.5 2\n" + "1 0\n" * 7, "found 7 samples"),
    ("inside 0.5 0.5 2\n" + "1 0\n" * 6, "line 1: side"),
    ("interior 0.5 0.5\n", "line 1"),
    ("interior 0.5 0.5 2\n1 0\n1 x\n" + "1 0\n" * 4, "line 3"),
    ("interior -1 0.5 2\n" + "1 0\n" * 6, "lambda > 0"),
])
def test_parse_errors(tmp_path, body, msg):
    p = tmp_path / "bad.txt"
    p.write_text(body)
    with pytest.raises(BoundaryFileError, match=msg):
        read_boundary_file(str(p))
    with pytest.raises(SystemExit):
        main(["solve", str(p)])
