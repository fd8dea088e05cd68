import os
import pathlib

import numpy as np
import pytest

import fracvi

PROBLEMS = pathlib.Path(os.environ.get("FRACVI_SOURCE_DIR", pathlib.Path(__file__).parents[2])) / "problems"


def bump(grid):
    x = grid.coordinates()
    return np.exp(-36.0 * x * x)


def test_grid_properties():
    g = fracvi.Grid(1, 256, 4.0)
    assert g.n == 256
    assert g.spacing == 0.03125
    assert g.coordinates()[0] == -4.0


def test_div_grad_identity():
    g = fracvi.Grid(1, 256, 2.0)
    u = bump(g)
    for sigma in (0.5, 1.0):
        lhs = -fracvi.frac_divergence(g, fracvi.frac_gradient(g, u, sigma), sigma)
        rhs = fracvi.frac_laplacian(g, u, sigma)
        assert np.linalg.norm(lhs - rhs) <= 1e-12 * np.linalg.norm(rhs)


def test_riesz_scales_a_mode():
    g = fracvi.Grid(1, 128, 2.0)
    k = 2 * np.pi * 3 / 4.0
    mode = np.cos(k * g.coordinates())
    out = fracvi.riesz_potential(g, mode, 0.5)
    assert np.allclose(out, k ** -0.5 * mode, atol=1e-12)
    with pytest.raises(ValueError):
        fracvi.riesz_potential(g, mode, 0.5, backend="fft")


def test_penalty_k():
    assert fracvi.penalty_k(-1.0, 0.1) == 0.0
    assert fracvi.penalty_k(100.0, 0.1) == pytest.approx(100.0)


def test_solve_elastoplastic():
    p = fracvi.load_problem(PROBLEMS / "elastoplastic_1d.ini")
    r = fracvi.solve(p)
    x = p.grid.coordinates()
    # parabolic cap inside the contact radius 1/2, slope 1 outside
    exact = np.where(np.abs(x) < 0.5, 0.75 - x * x, np.maximum(1.0 - np.abs(x), 0.0))
    assert np.max(np.abs(r["u"] - exact)) < 2e-2
    assert np.all(r["lambda"] >= 0.0)
    assert r["checks"]["complementarity"][2]


def test_primal_dual_and_errors():
    p = fracvi.load_problem(PROBLEMS / "inactive_1d.ini")
    a = fracvi.solve(p)
    b = fracvi.solve(p, "primal_dual")
    assert np.max(np.abs(a["u"] - b["u"])) < 1e-6
    with pytest.raises(ValueError):
        fracvi.load_problem(PROBLEMS / "inactive_1d.ini", ["no_such_key=1"])


def test_run_command(tmp_path):
    code, log = fracvi.run(PROBLEMS / "inactive_1d.ini", "solve", tmp_path)
    assert code == 0
    assert (tmp_path / "summary.report").exists()
