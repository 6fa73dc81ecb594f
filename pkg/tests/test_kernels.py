import math

import numpy as np
import pytest

from nldiff import (DomainError, UnsupportedKernel, critical_exp,
                    custom_from_csv, custom_from_table, evaluate, gaussian,
                    kernel_samples, mass, polynomial_compact,
                    singular_compact, stretched_exp, tail_mass,
                    uniform_compact)


def test_uniform_pointwise():
    k = uniform_compact(1.0)
    assert evaluate(k, 0.5) == 0.5
    assert evaluate(k, 2.0) == 0.0
    assert evaluate(k, -0.25) == evaluate(k, 0.25)


def test_polynomial_pointwise():
    k = polynomial_compact()
    assert evaluate(k, 0.0) == pytest.approx(0.375, abs=1e-15)
    assert evaluate(k, 2.0) == 0.0
    assert evaluate(k, 3.0) == 0.0
    assert evaluate(k, 1.0) == pytest.approx((3.0 / 32.0) * 3.0, abs=1e-15)


def test_gaussian_pointwise():
    k = gaussian()
    assert evaluate(k, 0.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi),
                                             rel=1e-15)


def test_masses():
    assert mass(uniform_compact(1.0)) == 1.0
    assert mass(polynomial_compact()) == 1.0
    assert mass(gaussian()) == 1.0
    assert mass(critical_exp()) == 1.0
    assert mass(stretched_exp(2.0)) == pytest.approx(math.sqrt(math.pi),
                                                     rel=1e-14)
    assert math.isinf(mass(singular_compact(0.5)))


def test_polynomial_mass_brute_force():
    k = polynomial_compact()
    y = np.linspace(-2, 2, 200001)
    assert float(np.trapezoid(evaluate(k, y), y)) == pytest.approx(1.0,
                                                                   rel=1e-9)


def test_tail_mass_closed_forms():
    assert tail_mass(uniform_compact(1.0), 0.5) == pytest.approx(0.25)
    assert tail_mass(uniform_compact(1.0), 0.0) == pytest.approx(0.5)
    assert tail_mass(uniform_compact(1.0), 1.5) == 0.0
    # standard normal upper tail at 1
    assert tail_mass(gaussian(), 1.0) == pytest.approx(0.15865525393145707,
                                                       rel=1e-12)
    assert tail_mass(critical_exp(), 2.0) == pytest.approx(0.5 * math.exp(-2))
    assert tail_mass(polynomial_compact(), 2.0) == 0.0
    assert tail_mass(polynomial_compact(), 0.0) == pytest.approx(0.5)


def test_tail_mass_matches_quadrature():
    # brute-force composite Simpson oracle on each family
    from scipy.integrate import simpson

    cases = [
        (polynomial_compact(), 0.7, 2.0),
        (stretched_exp(2.0), 0.9, 12.0),
        (stretched_exp(3.0), 0.4, 6.0),
        (critical_exp(), 1.3, 60.0),
    ]
    for k, a, top in cases:
        y = np.linspace(a, top, 200001)
        want = float(simpson(evaluate(k, y), x=y))
        assert tail_mass(k, a) == pytest.approx(want, rel=1e-8, abs=1e-14)


def test_tail_mass_monotone_and_validated():
    k = gaussian()
    ts = [tail_mass(k, a) for a in np.linspace(0, 5, 20)]
    assert all(b <= a for a, b in zip(ts, ts[1:]))
    with pytest.raises(ValueError):
        tail_mass(k, -0.1)
    with pytest.raises(UnsupportedKernel):
        tail_mass(singular_compact(0.5), 0.1)


def test_singular_evaluation():
    k = singular_compact(0.5)
    assert evaluate(k, 0.5) == pytest.approx(0.5 ** -1.5)
    assert evaluate(k, 1.5) == 0.0
    with pytest.raises(DomainError):
        evaluate(k, 0.0)
    with pytest.raises(DomainError):
        evaluate(k, np.array([0.5, 0.0]))


def test_family_parameter_validation():
    with pytest.raises(ValueError):
        uniform_compact(0.0)
    with pytest.raises(ValueError):
        stretched_exp(1.0)
    with pytest.raises(ValueError):
        singular_compact(2.0)
    with pytest.raises(ValueError):
        singular_compact(0.0)


def test_kernel_samples_edge_average():
    # uniform kernel: nodes landing exactly on the jump get the one-sided
    # average, keeping the trapezoid row mass exact
    k = uniform_compact(1.0)
    offs = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])
    vals = kernel_samples(k, offs)
    assert vals[0] == vals[-1] == 0.25
    assert vals[1] == vals[2] == vals[3] == 0.5
    h = 0.5
    assert h * vals.sum() == pytest.approx(1.0, abs=1e-15)


def test_custom_table_round_trip(tmp_path):
    y = np.linspace(-1.5, 1.5, 301)
    j = np.maximum(0.0, 1.5 - np.abs(y)) / 2.25   # triangle, mass 1
    k = custom_from_table(y, j, support_radius=1.5)
    assert mass(k) == pytest.approx(1.0, rel=1e-4)
    assert evaluate(k, 0.0) == pytest.approx(1.5 / 2.25)
    assert evaluate(k, 2.0) == 0.0
    assert tail_mass(k, 1.5) == 0.0
    assert tail_mass(k, 0.0) == pytest.approx(0.5, rel=1e-4)

    path = tmp_path / "tri.csv"
    with open(path, "w") as fh:
        fh.write("# support=1.5 singularity=0\n")
        fh.write("y,J\n")
        for yi, ji in zip(y, j):
            fh.write(f"{float(yi)!r},{float(ji)!r}\n")
    k2 = custom_from_csv(path)
    ys = np.linspace(-2, 2, 57)
    assert np.allclose(evaluate(k2, ys), evaluate(k, ys))


def test_custom_csv_validation(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("0.0,1.0\n1.0,0.5\n")
    with pytest.raises(ValueError, match="support"):
        custom_from_csv(path)
    with pytest.raises(ValueError):
        custom_from_table([0.0, 1.0], [1.0, -0.5], 1.0)


def test_labels():
    assert uniform_compact(1.0).label() == "uniform:eta=1"
    assert gaussian().label() == "gaussian"
    assert stretched_exp(2.0).label() == "stretched:alpha=2"
