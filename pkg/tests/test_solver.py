import math

import numpy as np
import pytest

from nldiff import (ConvolutionOperator, Field, Grid, InstabilityError,
                    ResolutionError, SolveConfig, UnsupportedKernel, convolve,
                    deviation_solution, gaussian, integrate, make_grid,
                    polynomial_compact, read_field_csv, reference_solution,
                    singular_compact, tail_mass, uniform_compact,
                    write_field_csv)


def test_grid_construction_and_alignment():
    k = uniform_compact(1.0)
    grid = make_grid(k, 10.0, 1.0 / 16.0)
    assert grid.n % 2 == 1
    assert grid.h == pytest.approx(1.0 / 16.0)
    # support edge lands exactly on a node offset
    assert (1.0 / grid.h) == pytest.approx(round(1.0 / grid.h))
    with pytest.raises(ValueError):
        Grid(10.0, 4)
    with pytest.raises(ValueError):
        Grid(-1.0, 5)
    with pytest.raises(ValueError):
        make_grid(k, 10.0, -0.5)


def test_micro_euler_step_hand_computed():
    # 3 nodes on [-1, 1], J = 1/16 on [-8, 8] so every sample is 1/16.
    # Trapezoid row: h * sum(w * f) * J = (0.5*1 + 1*2 + 0.5*4)/16 = 0.28125
    # at every node; one Euler step of size 0.1 from f = [1, 2, 4] gives
    # f + 0.1 * (0.28125 - f).
    k = uniform_compact(8.0)
    grid = Grid(1.0, 3)
    f = Field(grid, np.array([1.0, 2.0, 4.0]))
    conv = convolve(k, f, "direct")
    assert np.allclose(conv.values, 0.28125, rtol=0, atol=1e-15)
    out = integrate(k, f, SolveConfig(T=0.1, dt=0.1, scheme="euler"))
    want = np.array([0.928125, 1.828125, 3.628125])
    assert np.max(np.abs(out.values - want)) < 1e-14


def test_convolution_paths_agree():
    rng = np.random.default_rng(5)
    k = uniform_compact(1.0)
    grid = make_grid(k, 6.0, 1.0 / 16.0)
    d = ConvolutionOperator(k, grid, "direct")
    f = ConvolutionOperator(k, grid, "fft")
    for _ in range(50):
        v = rng.uniform(-1.0, 1.0, grid.n)
        assert np.max(np.abs(d(v) - f(v))) <= 1e-10


def test_trapezoid_second_order():
    k = polynomial_compact()
    errs = []
    for h in (0.125, 0.0625):
        grid = make_grid(k, 6.0, h)
        op = ConvolutionOperator(k, grid, "direct")
        errs.append(abs(op(np.ones(grid.n))[grid.n // 2] - 1.0))
    assert 3.5 <= errs[0] / errs[1] <= 4.5


def test_interior_row_mass_exact_for_aligned_uniform():
    k = uniform_compact(1.0)
    grid = make_grid(k, 6.0, 1.0 / 16.0)
    op = ConvolutionOperator(k, grid, "direct")
    row = op(np.ones(grid.n))
    interior = row[np.abs(grid.nodes) <= grid.R - 1.0 - 1e-12]
    assert np.max(np.abs(interior - 1.0)) < 1e-13


def test_maximum_principle_and_decay():
    k = uniform_compact(1.0)
    grid = make_grid(k, 8.0, 1.0 / 16.0)
    u1 = integrate(k, Field(grid, np.ones(grid.n)), SolveConfig(T=0.1, dt=0.01))
    u2 = integrate(k, Field(grid, np.ones(grid.n)), SolveConfig(T=0.4, dt=0.01))
    for u in (u1, u2):
        assert np.all(u.values >= -1e-14)
        assert np.all(u.values <= 1.0 + 1e-12)
    assert np.all(u2.values <= u1.values + 1e-12)


def test_comparison_principle():
    k = uniform_compact(1.0)
    grid = make_grid(k, 8.0, 1.0 / 16.0)
    rng = np.random.default_rng(9)
    lo = rng.uniform(0.0, 1.0, grid.n)
    cfg = SolveConfig(T=0.2, dt=0.01)
    a = integrate(k, Field(grid, lo), cfg)
    b = integrate(k, Field(grid, lo + 0.25), cfg)
    assert np.all(a.values <= b.values + 1e-12)


def test_monotone_in_R():
    k = uniform_compact(1.0)
    cfg = SolveConfig(T=0.1, dt=0.005)
    g1, g2 = make_grid(k, 6.0, 0.0625), make_grid(k, 10.0, 0.0625)
    u1 = integrate(k, Field(g1, np.ones(g1.n)), cfg)
    u2 = integrate(k, Field(g2, np.ones(g2.n)), cfg)
    off = (g2.n - g1.n) // 2
    assert np.all(u2.values[off:off + g1.n] >= u1.values - 1e-12)


def test_deviation_solution_matches_one_minus_u():
    k = uniform_compact(1.0)
    grid = make_grid(k, 5.0, 0.0625)
    cfg = SolveConfig(T=0.1, dt=0.005)
    u = integrate(k, Field(grid, np.ones(grid.n)), cfg)
    v = deviation_solution(k, grid, cfg)
    # the two initial-value problems are affine images of each other, so
    # they agree wherever 1 - u has any accurate digits left at all
    big = v.values > 1e-6
    assert np.max(np.abs(v.values[big] - (1.0 - u.values[big]))
                  / v.values[big]) < 1e-8


def test_deviation_source_is_tail_mass():
    k = gaussian()
    grid = make_grid(k, 4.0, 0.125)
    v = deviation_solution(k, grid, SolveConfig(T=1e-4, dt=1e-4))
    # one tiny step: v ~ T * s(x)
    x = grid.nodes[0]
    s = tail_mass(k, grid.R - x) + tail_mass(k, grid.R + x)
    assert v.values[0] == pytest.approx(1e-4 * s, rel=1e-3)


def test_adaptive_scheme_agrees_with_rk4():
    k = uniform_compact(1.0)
    grid = make_grid(k, 5.0, 0.0625)
    u0 = Field(grid, np.ones(grid.n))
    a = integrate(k, u0, SolveConfig(T=0.2, dt=0.005))
    b = integrate(k, u0, SolveConfig(T=0.2, scheme="adaptive",
                                     rtol=1e-10, atol=1e-12))
    assert np.max(np.abs(a.values - b.values)) < 1e-8


def test_solver_error_paths():
    k = uniform_compact(1.0)
    with pytest.raises(ResolutionError):
        ConvolutionOperator(k, Grid(10.0, 21), "direct")   # h = 1 > 1/8
    with pytest.raises(UnsupportedKernel):
        ConvolutionOperator(singular_compact(0.5), make_grid(k, 5.0, 0.0625))
    grid = make_grid(k, 5.0, 0.0625)
    with pytest.raises(ValueError):
        integrate(k, Field(grid, np.ones(grid.n)), SolveConfig(T=0.1, dt=5.0))
    with pytest.raises(ValueError):
        SolveConfig(T=0.1, scheme="adaptive")              # missing tolerances
    with pytest.raises(ValueError):
        SolveConfig(T=-1.0)
    with pytest.raises(ValueError):
        SolveConfig(T=0.1, convolution="simpson")
    with pytest.raises(ValueError):
        Field(grid, np.ones(3))
    with pytest.raises(ValueError):
        Field(grid, np.full(grid.n, math.nan))


def test_instability_guard():
    # forward Euler on du/dt = J*u - u + huge constant source blows past the
    # 10x ceiling and is reported rather than returned
    k = uniform_compact(1.0)
    grid = make_grid(k, 3.0, 0.125)
    from nldiff.solver import ConvolutionOperator as Op, _advance

    op = Op(k, grid, "direct")
    with pytest.raises(InstabilityError):
        _advance(op, np.ones(grid.n), SolveConfig(T=50.0, dt=0.5,
                                                  scheme="euler"),
                 source=np.full(grid.n, 100.0))


def test_reference_solution_exact_for_ones():
    k = uniform_compact(1.0)
    grid = make_grid(k, 5.0, 0.0625)
    ref, err = reference_solution(k, lambda x: 1.0, grid, T=0.3, margin=2.0)
    assert np.all(ref.values == 1.0)
    assert err == 0.0


def test_reference_solution_proxy_for_general_data():
    k = uniform_compact(1.0)
    grid = make_grid(k, 4.0, 0.125)
    bump = lambda x: math.exp(-x * x)
    ref, err = reference_solution(k, bump, grid, T=0.1, margin=6.0)
    assert err > 0.0
    assert ref.values.shape == (grid.n,)
    # mass spreads but stays bounded by the initial sup
    assert np.all(ref.values <= 1.0 + 1e-12)
    assert ref.values[grid.n // 2] < 1.0
    with pytest.raises(ValueError):
        reference_solution(k, bump, grid, T=0.1, margin=0.0)


def test_field_csv_round_trip(tmp_path):
    k = uniform_compact(1.0)
    grid = make_grid(k, 4.0, 0.125)
    u = integrate(k, Field(grid, np.ones(grid.n)), SolveConfig(T=0.1, dt=0.01))
    path = tmp_path / "field.csv"
    write_field_csv(u, path, k, 0.01)
    back = read_field_csv(path)
    assert back.grid.R == grid.R
    assert back.grid.n == grid.n
    assert back.time == u.time
    assert np.array_equal(back.values, u.values)
